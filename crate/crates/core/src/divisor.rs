//! Hypersurfaces and hyperplane arrangements in P^n, pullbacks under
//! curves, and line-bundle gamma constants.

use crate::curve::{CurveExpr, HoloCurve};
use crate::jetcore::{Cx, Real, TAU_REL_DEFAULT};
use num::rational::Ratio;
use serde::Deserialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DivisorError {
    #[error("general position test requires hyperplanes (all degrees 1)")]
    NotHyperplanes,
    #[error("ambient dimensions differ: curve in P^{0}, hypersurface in P^{1}")]
    DimensionMismatch(usize, usize),
    #[error("pullback is identically zero: the curve lies inside the hypersurface")]
    IdenticallyZero,
    #[error("monomial {0} has total degree {1}, expected {2}")]
    WrongDegree(String, u32, u32),
    #[error("hypersurface polynomial is identically zero")]
    ZeroPolynomial,
    #[error("exponent vector has {0} entries, expected {1}")]
    WrongArity(usize, usize),
    #[error("arrangement is empty")]
    EmptyArrangement,
    #[error("arrangement mixes ambient dimensions")]
    MixedAmbient,
    #[error("hypersurface term parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
}

/// The line bundle O(a) on P^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, Deserialize)]
pub struct LineBundleO(pub i64);

/// Value of a gamma constant: the infimum in the defining positivity
/// condition, which on P^n is a ratio of bundle degrees. `Undefined` covers
/// both an empty condition set and an infimum of minus infinity; no
/// attainment claim is made for the finite case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gamma {
    Finite(Ratio<i64>),
    Undefined,
}

impl Gamma {
    pub fn finite(self) -> Option<Ratio<i64>> {
        match self {
            Gamma::Finite(q) => Some(q),
            Gamma::Undefined => None,
        }
    }

    pub fn to_real(self) -> Option<Real> {
        self.finite().map(|q| *q.numer() as Real / *q.denom() as Real)
    }
}

/// gamma_{D1,D2} on P^n: positivity of O(t a1 + a2) means t a1 + a2 > 0, so
/// the infimum is -a2/a1 when a1 > 0 and fails to be finite otherwise.
pub fn gamma(d1: LineBundleO, d2: LineBundleO) -> Gamma {
    if d1.0 > 0 {
        Gamma::Finite(Ratio::new(-d2.0, d1.0))
    } else {
        Gamma::Undefined
    }
}

/// A degree-d hypersurface in P^n given by a sparse homogeneous polynomial.
#[derive(Debug, Clone)]
pub struct Hypersurface {
    n: usize,
    d: u32,
    terms: BTreeMap<Vec<u32>, Cx>,
    coeff_norm: Real,
}

impl Hypersurface {
    pub fn new(n: usize, d: u32, terms: Vec<(Vec<u32>, Cx)>) -> Result<Self, DivisorError> {
        let mut map: BTreeMap<Vec<u32>, Cx> = BTreeMap::new();
        for (exps, coeff) in terms {
            if exps.len() != n + 1 {
                return Err(DivisorError::WrongArity(exps.len(), n + 1));
            }
            let total: u32 = exps.iter().sum();
            if total != d {
                return Err(DivisorError::WrongDegree(format!("{exps:?}"), total, d));
            }
            *map.entry(exps).or_insert_with(|| Cx::new(0.0, 0.0)) += coeff;
        }
        map.retain(|_, c| c.norm() > 0.0);
        if map.is_empty() {
            return Err(DivisorError::ZeroPolynomial);
        }
        let coeff_norm = map.values().map(|c| c.norm()).fold(0.0, Real::max);
        Ok(Hypersurface { n, d, terms: map, coeff_norm })
    }

    /// A hyperplane `sum coeffs[i] x_i` in P^n.
    pub fn hyperplane(coeffs: &[Cx]) -> Result<Self, DivisorError> {
        let n = coeffs.len() - 1;
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(i, c)| {
                let mut e = vec![0u32; n + 1];
                e[i] = 1;
                (e, *c)
            })
            .collect();
        Hypersurface::new(n, 1, terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn coeff_norm(&self) -> Real {
        self.coeff_norm
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Cx> {
        &self.terms
    }

    /// Coefficient vector of a hyperplane (degree-1 hypersurface).
    pub fn hyperplane_coeffs(&self) -> Option<Vec<Cx>> {
        if self.d != 1 {
            return None;
        }
        let mut v = vec![Cx::new(0.0, 0.0); self.n + 1];
        for (exps, c) in &self.terms {
            let i = exps.iter().position(|&e| e == 1)?;
            v[i] = *c;
        }
        Some(v)
    }

    pub fn eval(&self, point: &[Cx]) -> Cx {
        let mut acc = Cx::new(0.0, 0.0);
        for (exps, coeff) in &self.terms {
            let mut term = *coeff;
            for (x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    term *= x.powu(e);
                }
            }
            acc += term;
        }
        acc
    }

    /// The composed expression Q(f_0, ..., f_n) as a curve expression.
    /// Errors with `IdenticallyZero` when the composition vanishes to order
    /// 64 at three fixed sample points, relative to the per-term scale.
    pub fn pullback(&self, f: &HoloCurve) -> Result<CurveExpr, DivisorError> {
        if f.n() != self.n {
            return Err(DivisorError::DimensionMismatch(f.n(), self.n));
        }
        let mut expr: Option<CurveExpr> = None;
        for (exps, coeff) in &self.terms {
            let mut term = CurveExpr::constant(*coeff);
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = CurveExpr::mul(term, CurveExpr::pow(f.coord(i).clone(), e));
                }
            }
            expr = Some(match expr {
                None => term,
                Some(acc) => CurveExpr::add(acc, term),
            });
        }
        let expr = expr.expect("hypersurface has at least one term");
        // Zero test at three fixed points, scaled by the termwise jets so
        // that cancellation is measured relative to what is being cancelled.
        let order = 64usize;
        let samples = [Cx::new(0.329, 0.541), Cx::new(-0.772, 0.215), Cx::new(0.148, -0.903)];
        let r_cap = if f.r0().is_finite() { 0.5 * f.r0() } else { 1.0 };
        let mut all_zero = true;
        for s in samples {
            let z0 = s * r_cap;
            let jet = match expr.jet(z0, order) {
                Ok(j) => j,
                Err(_) => {
                    all_zero = false;
                    break;
                }
            };
            let mut scale: Real = 0.0;
            for (exps, coeff) in &self.terms {
                let mut term = CurveExpr::constant(*coeff);
                for (i, &e) in exps.iter().enumerate() {
                    if e > 0 {
                        term = CurveExpr::mul(term, CurveExpr::pow(f.coord(i).clone(), e));
                    }
                }
                if let Ok(tj) = term.jet(z0, order) {
                    scale = scale.max(tj.coeffs().iter().map(|c| c.norm()).fold(0.0, Real::max));
                }
            }
            let maxc = jet.coeffs().iter().map(|c| c.norm()).fold(0.0, Real::max);
            if maxc > TAU_REL_DEFAULT * scale.max(Real::MIN_POSITIVE) {
                all_zero = false;
                break;
            }
        }
        if all_zero {
            return Err(DivisorError::IdenticallyZero);
        }
        Ok(expr)
    }
}

/// Parse one term in the hypersurface text format:
/// `coefficient * x0^a0 x1^a1 ...` (factors `xI` default to exponent 1;
/// missing variables mean exponent 0).
pub fn parse_term(src: &str, n: usize) -> Result<(Vec<u32>, Cx), DivisorError> {
    let err = |col: usize, msg: &str| DivisorError::Parse { col, msg: msg.to_string() };
    let bytes = src.as_bytes();
    let mut pos = 0usize;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    skip_ws(&mut pos);
    // coefficient: optional sign, decimal
    let start = pos;
    if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
        pos += 1;
    }
    while pos < bytes.len()
        && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.' || bytes[pos] == b'e' || bytes[pos] == b'E'
            || ((bytes[pos] == b'+' || bytes[pos] == b'-')
                && pos > start
                && (bytes[pos - 1] == b'e' || bytes[pos - 1] == b'E')))
    {
        pos += 1;
    }
    let coeff: Real = if pos == start || (pos == start + 1 && !bytes[start].is_ascii_digit()) {
        // no explicit number: bare sign or none means +-1
        if pos == start + 1 && bytes[start] == b'-' {
            -1.0
        } else {
            1.0
        }
    } else {
        std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| err(start + 1, "malformed coefficient"))?
    };
    skip_ws(&mut pos);
    if pos < bytes.len() && bytes[pos] == b'*' {
        pos += 1;
    }
    let mut exps = vec![0u32; n + 1];
    loop {
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            break;
        }
        if bytes[pos] != b'x' {
            return Err(err(pos + 1, "expected a factor of the form xI or xI^E"));
        }
        pos += 1;
        let istart = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if istart == pos {
            return Err(err(pos + 1, "expected a variable index after 'x'"));
        }
        let idx: usize = std::str::from_utf8(&bytes[istart..pos]).unwrap().parse().unwrap();
        if idx > n {
            return Err(err(istart + 1, "variable index out of range"));
        }
        let mut e = 1u32;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            let estart = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if estart == pos {
                return Err(err(pos + 1, "expected an exponent after '^'"));
            }
            e = std::str::from_utf8(&bytes[estart..pos]).unwrap().parse().unwrap();
        }
        exps[idx] += e;
    }
    Ok((exps, Cx::new(coeff, 0.0)))
}

/// JSON description: `{n, d, terms}` with terms in the text format.
#[derive(Debug, Deserialize)]
pub struct HypersurfaceSpec {
    pub n: usize,
    pub d: u32,
    pub terms: Vec<String>,
}

impl Hypersurface {
    pub fn from_spec(spec: &HypersurfaceSpec) -> Result<Self, DivisorError> {
        let terms = spec
            .terms
            .iter()
            .map(|t| parse_term(t, spec.n))
            .collect::<Result<Vec<_>, _>>()?;
        Hypersurface::new(spec.n, spec.d, terms)
    }

    pub fn from_json(json: &str) -> Result<Self, DivisorError> {
        let spec: HypersurfaceSpec = serde_json::from_str(json).map_err(|e| DivisorError::Parse {
            col: e.column(),
            msg: e.to_string(),
        })?;
        Hypersurface::from_spec(&spec)
    }
}

/// A finite list of hypersurfaces with common ambient dimension.
#[derive(Debug, Clone)]
pub struct Arrangement {
    hypersurfaces: Vec<Hypersurface>,
}

impl Arrangement {
    pub fn new(hypersurfaces: Vec<Hypersurface>) -> Result<Self, DivisorError> {
        if hypersurfaces.is_empty() {
            return Err(DivisorError::EmptyArrangement);
        }
        let n = hypersurfaces[0].n();
        if hypersurfaces.iter().any(|h| h.n() != n) {
            return Err(DivisorError::MixedAmbient);
        }
        Ok(Arrangement { hypersurfaces })
    }

    pub fn n(&self) -> usize {
        self.hypersurfaces[0].n()
    }

    pub fn len(&self) -> usize {
        self.hypersurfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = &Hypersurface> {
        self.hypersurfaces.iter()
    }

    pub fn get(&self, i: usize) -> &Hypersurface {
        &self.hypersurfaces[i]
    }
}

const RANK_PIVOT_REL: Real = 1e-10;

/// Rank of a complex matrix (rows of equal length) by Gaussian elimination
/// with a relative pivot threshold.
#[allow(clippy::needless_range_loop)]
fn rank(rows: &[Vec<Cx>], rel: Real) -> usize {
    let mut m: Vec<Vec<Cx>> = rows.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(|c| c.norm()))
        .fold(0.0, Real::max);
    if scale == 0.0 {
        return 0;
    }
    let nrows = m.len();
    let ncols = m[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < nrows && col < ncols {
        let (imax, vmax) = (rank..nrows)
            .map(|i| (i, m[i][col].norm()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if vmax <= rel * scale {
            col += 1;
            continue;
        }
        m.swap(rank, imax);
        for i in (rank + 1)..nrows {
            let factor = m[i][col] / m[rank][col];
            for j in col..ncols {
                let sub = factor * m[rank][j];
                m[i][j] -= sub;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// General position for a hyperplane arrangement: every subset of size
/// min(q, n+1) of the coefficient vectors is linearly independent.
/// Coefficient vectors are normalized first, so the test is invariant under
/// rescaling any hyperplane.
pub fn general_position(arr: &Arrangement) -> Result<bool, DivisorError> {
    let n = arr.n();
    let mut vectors = Vec::with_capacity(arr.len());
    for h in arr.iter() {
        let v = h.hyperplane_coeffs().ok_or(DivisorError::NotHyperplanes)?;
        let s = v.iter().map(|c| c.norm()).fold(0.0, Real::max);
        vectors.push(v.into_iter().map(|c| c / s).collect::<Vec<_>>());
    }
    let q = vectors.len();
    let size = q.min(n + 1);
    let mut subset: Vec<usize> = (0..size).collect();
    loop {
        let rows: Vec<Vec<Cx>> = subset.iter().map(|&i| vectors[i].clone()).collect();
        if rank(&rows, RANK_PIVOT_REL) < size {
            return Ok(false);
        }
        // next combination
        let mut i = size;
        loop {
            if i == 0 {
                return Ok(true);
            }
            i -= 1;
            if subset[i] != i + q - size {
                subset[i] += 1;
                for j in (i + 1)..size {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}
