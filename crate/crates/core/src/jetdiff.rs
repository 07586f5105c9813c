//! Green–Griffiths jet differentials along curve jets: Wronskians,
//! logarithmic-pole monomials, metric norms, truncation orders, and local
//! pole-order bookkeeping.
//!
//! A differential lives in one affine chart of P^n (dehomogenized by a
//! chosen coordinate). Its evaluation on a curve reads derivative data off
//! chart-component jets, so everything here reduces to exact truncated
//! series arithmetic.

use crate::curve::{CurveError, HoloCurve};
use crate::divisor::{DivisorError, Hypersurface, LineBundleO};
use crate::jetcore::{Cx, JetError, JetSeries, Real, Vanishing, TAU_REL_DEFAULT};
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JetDiffError {
    #[error("a term has weighted degree {found}, differential declares m = {m}")]
    WeightedDegreeViolation { found: usize, m: usize },
    #[error("evaluation point is a pole of the differential along the curve")]
    PoleAtEvaluationPoint,
    #[error("the point is not on the divisor: pullback does not vanish there")]
    NotOnDivisor,
    #[error("Wronskian of order {k} needs k+1 <= n+1 coordinates, curve has n = {n}")]
    TooManyRows { k: usize, n: usize },
    #[error("chart index {chart} out of range for P^{n}")]
    ChartOutOfRange { chart: usize, n: usize },
    #[error("alpha matrix must be k x n = {k} x {n}")]
    BadAlphaShape { k: usize, n: usize },
    #[error("log flag {0} is not a chart coordinate index in 1..=n")]
    BadLogFlag(usize),
    #[error("vanishing order not resolved at expansion order {0}; re-expand deeper")]
    SaturatedOrder(usize),
    #[error("order routes disagree: direct {direct}, derivative minimum {derivative}")]
    OrderRoutesDisagree { direct: usize, derivative: usize },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Polynomial in the chart coordinates w_1..w_n (sparse).
#[derive(Debug, Clone)]
pub struct ChartPoly {
    terms: BTreeMap<Vec<u32>, Cx>,
}

impl ChartPoly {
    pub fn new(n: usize, terms: Vec<(Vec<u32>, Cx)>) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), n, "chart polynomial exponent arity");
            *map.entry(e).or_insert_with(|| Cx::new(0.0, 0.0)) += c;
        }
        ChartPoly { terms: map }
    }

    pub fn constant(n: usize, c: Cx) -> Self {
        ChartPoly::new(n, vec![(vec![0; n], c)])
    }

    pub fn eval(&self, w: &[Cx]) -> Cx {
        let mut acc = Cx::new(0.0, 0.0);
        for (exps, coeff) in &self.terms {
            let mut t = *coeff;
            for (x, &e) in w.iter().zip(exps) {
                if e > 0 {
                    t *= x.powu(e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluate with series arguments (the chart components along a curve).
    pub fn eval_series(&self, w: &[JetSeries]) -> Result<JetSeries, JetError> {
        let base = w[0].base_point();
        let order = w.iter().map(|s| s.order()).min().unwrap_or(0);
        let mut acc = JetSeries::constant(base, Cx::new(0.0, 0.0), order);
        for (exps, coeff) in &self.terms {
            let mut t = JetSeries::constant(base, *coeff, order);
            for (s, &e) in w.iter().zip(exps) {
                if e > 0 {
                    t = t.mul(&s.powi(e)?)?;
                }
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }
}

/// One monomial of a jet differential: a chart-polynomial coefficient times
/// the product of (d^j w_i)^{alpha[j-1][i-1]}, with coordinates in
/// `log_flags` carrying a 1/w_i logarithmic pole per d^j w_i factor.
#[derive(Debug, Clone)]
pub struct JetTerm {
    pub coeff: ChartPoly,
    pub alpha: Vec<Vec<u32>>,
    pub log_flags: BTreeSet<usize>,
}

impl JetTerm {
    fn weighted_degree(&self) -> usize {
        self.alpha
            .iter()
            .enumerate()
            .map(|(j0, row)| (j0 + 1) * row.iter().map(|&a| a as usize).sum::<usize>())
            .sum()
    }
}

/// A weighted-degree-m, order-k Green–Griffiths jet differential on P^n in
/// a fixed affine chart, with values twisted by a line bundle O(a).
#[derive(Debug, Clone)]
pub struct GGJetDifferential {
    k: usize,
    m: usize,
    n: usize,
    chart: usize,
    twist: LineBundleO,
    terms: Vec<JetTerm>,
}

impl GGJetDifferential {
    pub fn new(
        k: usize,
        m: usize,
        n: usize,
        chart: usize,
        twist: LineBundleO,
        terms: Vec<JetTerm>,
    ) -> Result<Self, JetDiffError> {
        if chart > n {
            return Err(JetDiffError::ChartOutOfRange { chart, n });
        }
        for t in &terms {
            if t.alpha.len() != k || t.alpha.iter().any(|row| row.len() != n) {
                return Err(JetDiffError::BadAlphaShape { k, n });
            }
            let wd = t.weighted_degree();
            if wd != m {
                return Err(JetDiffError::WeightedDegreeViolation { found: wd, m });
            }
            for &i in &t.log_flags {
                if i == 0 || i > n {
                    return Err(JetDiffError::BadLogFlag(i));
                }
            }
        }
        Ok(GGJetDifferential { k, m, n, chart, twist, terms })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chart(&self) -> usize {
        self.chart
    }

    pub fn twist(&self) -> LineBundleO {
        self.twist
    }

    /// Indices of the homogeneous coordinates that become w_1..w_n in this
    /// chart, in increasing order.
    pub fn chart_indices(&self) -> Vec<usize> {
        (0..=self.n).filter(|&i| i != self.chart).collect()
    }

    /// Jets of the chart components w_i = f_{sigma(i)} / f_chart at z0.
    pub fn chart_jets(
        &self,
        f: &HoloCurve,
        z0: Cx,
        order: usize,
    ) -> Result<Vec<JetSeries>, JetDiffError> {
        if f.n() != self.n {
            return Err(JetDiffError::Divisor(DivisorError::DimensionMismatch(f.n(), self.n)));
        }
        let jets = f.jet_at(z0, order)?;
        let den = &jets[self.chart];
        if den.value().norm() == 0.0 {
            return Err(JetDiffError::PoleAtEvaluationPoint);
        }
        self.chart_indices()
            .iter()
            .map(|&i| jets[i].div(den).map_err(JetDiffError::from))
            .collect()
    }

    /// Evaluate on precomputed chart-component jets (order >= k). This is
    /// the jet-space form of the differential, so rescaling the jets by
    /// lambda multiplies the value by lambda^m.
    pub fn eval_on_chart_jets(&self, chart_jets: &[JetSeries]) -> Result<Cx, JetDiffError> {
        assert_eq!(chart_jets.len(), self.n, "one chart jet per affine coordinate");
        for s in chart_jets {
            if s.order() < self.k {
                return Err(JetDiffError::Jet(JetError::InsufficientOrder {
                    needed: self.k,
                    have: s.order(),
                }));
            }
        }
        let w0: Vec<Cx> = chart_jets.iter().map(|s| s.value()).collect();
        let mut acc = Cx::new(0.0, 0.0);
        for term in &self.terms {
            let wd = term.weighted_degree();
            if wd != self.m {
                return Err(JetDiffError::WeightedDegreeViolation { found: wd, m: self.m });
            }
            let mut val = term.coeff.eval(&w0);
            for (j0, row) in term.alpha.iter().enumerate() {
                for (i0, &a) in row.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    let mut d = chart_jets[i0].derivative_at_base(j0 + 1);
                    if term.log_flags.contains(&(i0 + 1)) {
                        if w0[i0].norm() == 0.0 {
                            return Err(JetDiffError::PoleAtEvaluationPoint);
                        }
                        d /= w0[i0];
                    }
                    val *= d.powu(a);
                }
            }
            acc += val;
        }
        Ok(acc)
    }

    /// Evaluate along a curve at z0.
    pub fn eval_along(&self, f: &HoloCurve, z0: Cx) -> Result<Cx, JetDiffError> {
        let jets = self.chart_jets(f, z0, self.k)?;
        self.eval_on_chart_jets(&jets)
    }

    /// Fubini–Study metric norm of the value for a differential twisted by
    /// O(-a): |value| * (|f_chart| / ||f||)^a.
    pub fn metric_norm_along(&self, f: &HoloCurve, z0: Cx) -> Result<Real, JetDiffError> {
        let v = self.eval_along(f, z0)?;
        let a = -(self.twist.0) as Real;
        let w_log = f.coord(self.chart).log_abs(z0) - f.norm_log(z0)?;
        Ok(v.norm() * (a * w_log).exp())
    }

    /// Local pole order of P(j_k(f)) at z_star, through truncated Laurent
    /// bookkeeping: each factor splits into (vanishing order, unit series),
    /// orders add over products, and sums are re-normalized with
    /// cancellation awareness.
    pub fn pole_order_along(&self, f: &HoloCurve, z_star: Cx) -> Result<i64, JetDiffError> {
        let mut depth = (4 * (self.k + self.m)).max(16);
        loop {
            match self.try_value_order(f, z_star, depth) {
                Ok(ord) => return Ok((-ord).max(0)),
                Err(JetDiffError::SaturatedOrder(_)) if depth < 512 => depth *= 2,
                Err(e) => return Err(e),
            }
        }
    }

    fn try_value_order(&self, f: &HoloCurve, z_star: Cx, depth: usize) -> Result<i64, JetDiffError> {
        let w = self.chart_jets(f, z_star, depth)?;
        let mut total: Option<LocalLaurent> = None;
        for term in &self.terms {
            let coeff_series = term.coeff.eval_series(&w)?;
            let mut lau = match LocalLaurent::from_series(&coeff_series) {
                Some(l) => l,
                None => continue, // coefficient vanishes to working depth
            };
            for (j0, row) in term.alpha.iter().enumerate() {
                for (i0, &a) in row.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    let mut d = w[i0].clone();
                    for _ in 0..=j0 {
                        d = d.derivative()?;
                    }
                    let mut factor =
                        LocalLaurent::from_series(&d).ok_or(JetDiffError::SaturatedOrder(depth))?;
                    if term.log_flags.contains(&(i0 + 1)) {
                        let denom = LocalLaurent::from_series(&w[i0])
                            .ok_or(JetDiffError::SaturatedOrder(depth))?;
                        factor = factor.div(&denom)?;
                    }
                    lau = lau.mul(&factor.pow(a)?)?;
                }
            }
            total = Some(match total {
                None => lau,
                Some(t) => match t.add(&lau)? {
                    Some(s) => s,
                    None => return Err(JetDiffError::SaturatedOrder(depth)),
                },
            });
        }
        match total {
            Some(t) => Ok(t.ord),
            None => Err(JetDiffError::SaturatedOrder(depth)),
        }
    }
}

/// JSON description of a jet differential:
/// `{k, m, n, chart, twist, terms:[{coeff_poly, alpha, log_flags}]}`.
#[derive(Debug, Deserialize)]
pub struct JetDiffSpec {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub chart: usize,
    pub twist: i64,
    pub terms: Vec<JetTermSpec>,
}

#[derive(Debug, Deserialize)]
pub struct JetTermSpec {
    /// Constant coefficient, or chart-polynomial terms over w1..wn in the
    /// hypersurface term format (e.g. `"2 * w1^2 w2"`).
    pub coeff_poly: CoeffSpec,
    pub alpha: Vec<Vec<u32>>,
    #[serde(default)]
    pub log_flags: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CoeffSpec {
    Constant(Real),
    Terms(Vec<String>),
}

impl GGJetDifferential {
    pub fn from_spec(spec: &JetDiffSpec) -> Result<Self, JetDiffError> {
        let n = spec.n;
        let mut terms = Vec::new();
        for t in &spec.terms {
            let coeff = match &t.coeff_poly {
                CoeffSpec::Constant(c) => ChartPoly::constant(n, Cx::new(*c, 0.0)),
                CoeffSpec::Terms(strings) => {
                    let mut parsed = Vec::new();
                    for s in strings {
                        // reuse the hypersurface term grammar with w -> x;
                        // chart polynomials index w1..wn, so x0 must not occur
                        let translated = s.replace('w', "x");
                        let (mut exps, c) = crate::divisor::parse_term(&translated, n)?;
                        if exps.first().copied().unwrap_or(0) != 0 {
                            return Err(JetDiffError::BadLogFlag(0));
                        }
                        exps.remove(0);
                        parsed.push((exps, c));
                    }
                    ChartPoly::new(n, parsed)
                }
            };
            terms.push(JetTerm {
                coeff,
                alpha: t.alpha.clone(),
                log_flags: t.log_flags.iter().copied().collect(),
            });
        }
        GGJetDifferential::new(spec.k, spec.m, n, spec.chart, LineBundleO(spec.twist), terms)
    }

    pub fn from_json(json: &str) -> Result<Self, JetDiffError> {
        let spec: JetDiffSpec = serde_json::from_str(json).map_err(|e| {
            JetDiffError::Curve(CurveError::Parse { col: e.column(), msg: e.to_string() })
        })?;
        GGJetDifferential::from_spec(&spec)
    }
}

/// Truncated local Laurent datum: value = t^ord * unit with unit(0) != 0.
#[derive(Debug, Clone)]
struct LocalLaurent {
    ord: i64,
    unit: JetSeries,
}

impl LocalLaurent {
    fn from_series(s: &JetSeries) -> Option<LocalLaurent> {
        match s.vanishing_order(TAU_REL_DEFAULT) {
            Vanishing::Order(nu) => {
                let coeffs = s.coeffs()[nu..].to_vec();
                Some(LocalLaurent { ord: nu as i64, unit: JetSeries::new(s.base_point(), coeffs) })
            }
            Vanishing::Saturated => None,
        }
    }

    fn mul(&self, other: &LocalLaurent) -> Result<LocalLaurent, JetError> {
        Ok(LocalLaurent { ord: self.ord + other.ord, unit: self.unit.mul(&other.unit)? })
    }

    fn div(&self, other: &LocalLaurent) -> Result<LocalLaurent, JetError> {
        Ok(LocalLaurent { ord: self.ord - other.ord, unit: self.unit.div(&other.unit)? })
    }

    fn pow(&self, e: u32) -> Result<LocalLaurent, JetError> {
        Ok(LocalLaurent { ord: self.ord * e as i64, unit: self.unit.powi(e)? })
    }

    /// Sum with cancellation awareness; `None` when the sum vanishes to the
    /// working depth and the caller must re-expand.
    fn add(&self, other: &LocalLaurent) -> Result<Option<LocalLaurent>, JetError> {
        let ord = self.ord.min(other.ord);
        let shift_self = (self.ord - ord) as usize;
        let shift_other = (other.ord - ord) as usize;
        let len = (self.unit.order() + 1 + shift_self).min(other.unit.order() + 1 + shift_other);
        let base = self.unit.base_point();
        let mut coeffs = vec![Cx::new(0.0, 0.0); len];
        for (i, c) in coeffs.iter_mut().enumerate() {
            if i >= shift_self && i - shift_self <= self.unit.order() {
                *c += self.unit.coeff(i - shift_self);
            }
            if i >= shift_other && i - shift_other <= other.unit.order() {
                *c += other.unit.coeff(i - shift_other);
            }
        }
        let s = JetSeries::new(base, coeffs);
        Ok(LocalLaurent::from_series(&s).map(|mut l| {
            l.ord += ord;
            l
        }))
    }
}

/// Determinant of the (k+1) x (k+1) matrix whose (i, j) entry is the i-th
/// derivative of coordinate j at z0 — the classical Wronskian behind
/// Cartan's theorem, read off the first k+1 coordinates.
pub fn wronskian_eval(f: &HoloCurve, z0: Cx, k: usize) -> Result<Cx, JetDiffError> {
    if k > f.n() {
        return Err(JetDiffError::TooManyRows { k, n: f.n() });
    }
    let jets = f.jet_at(z0, k)?;
    wronskian_from_jets(&jets[..=k], k)
}

/// Wronskian on raw coordinate jets (each of order >= k).
pub fn wronskian_from_jets(jets: &[JetSeries], k: usize) -> Result<Cx, JetDiffError> {
    assert!(jets.len() > k, "need k+1 coordinate jets");
    for s in jets.iter().take(k + 1) {
        if s.order() < k {
            return Err(JetDiffError::Jet(JetError::InsufficientOrder {
                needed: k,
                have: s.order(),
            }));
        }
    }
    let mut m: Vec<Vec<Cx>> = (0..=k)
        .map(|i| (0..=k).map(|j| jets[j].derivative_at_base(i)).collect())
        .collect();
    Ok(det_in_place(&mut m))
}

#[allow(clippy::needless_range_loop)]
pub(crate) fn det_in_place(m: &mut [Vec<Cx>]) -> Cx {
    let n = m.len();
    let mut det = Cx::new(1.0, 0.0);
    for col in 0..n {
        let (imax, vmax) = (col..n)
            .map(|i| (i, m[i][col].norm()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if vmax == 0.0 {
            return Cx::new(0.0, 0.0);
        }
        if imax != col {
            m.swap(imax, col);
            det = -det;
        }
        det *= m[col][col];
        for i in (col + 1)..n {
            let factor = m[i][col] / m[col][col];
            for j in col..n {
                let sub = factor * m[col][j];
                m[i][j] -= sub;
            }
        }
    }
    det
}

/// Vanishing order of the Wronskian W(j_k f) at z0, resolved by adaptive
/// jet expansion.
pub fn wronskian_vanishing_order(
    f: &HoloCurve,
    z0: Cx,
    k: usize,
) -> Result<usize, JetDiffError> {
    if k > f.n() {
        return Err(JetDiffError::TooManyRows { k, n: f.n() });
    }
    let mut depth = 4 * (k + 1);
    loop {
        let jets = f.jet_at(z0, depth)?;
        // Wronskian as a series: determinant over series entries.
        let w = wronskian_series(&jets[..=k], k, depth - k)?;
        match w.vanishing_order(TAU_REL_DEFAULT) {
            Vanishing::Order(nu) => return Ok(nu),
            Vanishing::Saturated => {
                if depth >= 512 {
                    return Err(JetDiffError::SaturatedOrder(depth));
                }
                depth *= 2;
            }
        }
    }
}

/// The Wronskian as a JetSeries: rows are derivative series of the
/// coordinate jets, expanded by cofactors along the first row.
pub fn wronskian_series(jets: &[JetSeries], k: usize, order: usize) -> Result<JetSeries, JetDiffError> {
    let mut rows: Vec<Vec<JetSeries>> = Vec::with_capacity(k + 1);
    let mut current: Vec<JetSeries> = jets.iter().take(k + 1).map(|s| s.truncated(order)).collect();
    for i in 0..=k {
        rows.push(current.clone());
        if i < k {
            current = current
                .iter()
                .map(|s| s.derivative())
                .collect::<Result<Vec<_>, _>>()?;
        }
    }
    det_series(&rows).map_err(JetDiffError::from)
}

fn det_series(m: &[Vec<JetSeries>]) -> Result<JetSeries, JetError> {
    let n = m.len();
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let base = m[0][0].base_point();
    let order = m.iter().flatten().map(|s| s.order()).min().unwrap_or(0);
    let mut acc = JetSeries::constant(base, Cx::new(0.0, 0.0), order);
    for col in 0..n {
        let minor: Vec<Vec<JetSeries>> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != col)
                    .map(|j| m[i][j].clone())
                    .collect()
            })
            .collect();
        let sub = det_series(&minor)?;
        let term = m[0][col].mul(&sub)?;
        if col % 2 == 0 {
            acc = acc.add(&term)?;
        } else {
            acc = acc.sub(&term)?;
        }
    }
    Ok(acc)
}

/// Truncated intersection order nu - min(k, nu) at a zero of the pullback,
/// computed twice: from the vanishing order directly and as the minimum
/// vanishing order over the first k derivatives. The two routes must agree.
pub fn truncation_order(
    f: &HoloCurve,
    h: &Hypersurface,
    z0: Cx,
    k: usize,
) -> Result<usize, JetDiffError> {
    let psi = h.pullback(f)?;
    let mut order = (2 * k + 8).max(16);
    let (nu, jet) = loop {
        let jet = psi.jet(z0, order)?;
        match jet.vanishing_order(TAU_REL_DEFAULT) {
            Vanishing::Order(nu) => {
                if order >= nu + k + 4 {
                    break (nu, jet);
                }
                order = nu + k + 4;
            }
            Vanishing::Saturated => {
                if order >= 512 {
                    return Err(JetDiffError::SaturatedOrder(order));
                }
                order *= 2;
            }
        }
    };
    if nu == 0 {
        return Err(JetDiffError::NotOnDivisor);
    }
    let direct = nu - k.min(nu);
    // second route: min over 0 <= l <= k of ord(psi^{(l)})
    let mut min_ord = usize::MAX;
    let mut d = jet;
    for l in 0..=k {
        if let Vanishing::Order(o) = d.vanishing_order(TAU_REL_DEFAULT) {
            min_ord = min_ord.min(o);
        }
        if l < k {
            d = d.derivative()?;
        }
    }
    if min_ord != direct {
        return Err(JetDiffError::OrderRoutesDisagree { direct, derivative: min_ord });
    }
    Ok(direct)
}
