//! Holomorphic curves into projective space.
//!
//! A curve is a reduced (n+1)-tuple of entire coordinate functions given as
//! expression trees over one complex variable. Jets are computed by
//! structural recursion on the tree — no numerical differentiation anywhere.

use crate::jetcore::{compose, Cx, JetError, JetSeries, Real};
use crate::poly;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("evaluation point lies outside the curve's domain B(R0)")]
    OutsideDomain,
    #[error("all coordinates vanish at the evaluation point")]
    AllCoordinatesVanish,
    #[error("exp/compose argument must be a polynomial subtree")]
    NonPolynomialArgument,
    #[error("curve has no coordinates or all coordinates are identically zero")]
    DegenerateCoordinates,
    #[error("coordinates share a zero inside B(R0) near z = {0}")]
    CommonZero(Cx),
    #[error("coordinates all vanish at 0 and the tuple is not polynomial; cannot re-center")]
    CannotRecenter,
    #[error("R0 must be positive")]
    InvalidRadius,
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Expression tree for one entire coordinate function.
///
/// `Exp` and the right side of `Compose` are restricted to polynomial
/// subtrees; [`CurveExpr::validate`] checks this, and the smart constructors
/// enforce it.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveExpr {
    Const(Cx),
    Z,
    Add(Box<CurveExpr>, Box<CurveExpr>),
    Mul(Box<CurveExpr>, Box<CurveExpr>),
    Pow(Box<CurveExpr>, u32),
    Exp(Box<CurveExpr>),
    Compose(Box<CurveExpr>, Box<CurveExpr>),
}

impl CurveExpr {
    pub fn constant(v: Cx) -> Self {
        CurveExpr::Const(v)
    }

    pub fn constant_re(v: Real) -> Self {
        CurveExpr::Const(Cx::new(v, 0.0))
    }

    #[allow(clippy::should_implement_trait)] // tree constructor over owned nodes
    pub fn add(a: CurveExpr, b: CurveExpr) -> Self {
        CurveExpr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: CurveExpr, b: CurveExpr) -> Self {
        CurveExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn pow(a: CurveExpr, e: u32) -> Self {
        CurveExpr::Pow(Box::new(a), e)
    }

    pub fn exp(arg: CurveExpr) -> Result<Self, CurveError> {
        if !arg.is_polynomial() {
            return Err(CurveError::NonPolynomialArgument);
        }
        Ok(CurveExpr::Exp(Box::new(arg)))
    }

    pub fn compose_with_poly(outer: CurveExpr, inner: CurveExpr) -> Result<Self, CurveError> {
        if !inner.is_polynomial() {
            return Err(CurveError::NonPolynomialArgument);
        }
        Ok(CurveExpr::Compose(Box::new(outer), Box::new(inner)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: CurveExpr, b: CurveExpr) -> Self {
        CurveExpr::add(a, CurveExpr::mul(CurveExpr::constant_re(-1.0), b))
    }

    pub fn is_polynomial(&self) -> bool {
        match self {
            CurveExpr::Const(_) | CurveExpr::Z => true,
            CurveExpr::Add(a, b) | CurveExpr::Mul(a, b) => a.is_polynomial() && b.is_polynomial(),
            CurveExpr::Pow(a, _) => a.is_polynomial(),
            CurveExpr::Exp(_) => false,
            CurveExpr::Compose(a, b) => a.is_polynomial() && b.is_polynomial(),
        }
    }

    pub fn validate(&self) -> Result<(), CurveError> {
        match self {
            CurveExpr::Const(_) | CurveExpr::Z => Ok(()),
            CurveExpr::Add(a, b) | CurveExpr::Mul(a, b) => {
                a.validate()?;
                b.validate()
            }
            CurveExpr::Pow(a, _) => a.validate(),
            CurveExpr::Exp(arg) => {
                if !arg.is_polynomial() {
                    return Err(CurveError::NonPolynomialArgument);
                }
                arg.validate()
            }
            CurveExpr::Compose(outer, inner) => {
                if !inner.is_polynomial() {
                    return Err(CurveError::NonPolynomialArgument);
                }
                outer.validate()?;
                inner.validate()
            }
        }
    }

    pub fn eval(&self, z: Cx) -> Cx {
        match self {
            CurveExpr::Const(c) => *c,
            CurveExpr::Z => z,
            CurveExpr::Add(a, b) => a.eval(z) + b.eval(z),
            CurveExpr::Mul(a, b) => a.eval(z) * b.eval(z),
            CurveExpr::Pow(a, e) => a.eval(z).powu(*e),
            CurveExpr::Exp(a) => a.eval(z).exp(),
            CurveExpr::Compose(o, i) => o.eval(i.eval(z)),
        }
    }

    /// log|value| with overflow-aware structural rules: products and powers
    /// split in log space, exp contributes Re(arg) exactly.
    pub fn log_abs(&self, z: Cx) -> Real {
        match self {
            CurveExpr::Const(c) => c.norm().ln(),
            CurveExpr::Z => z.norm().ln(),
            CurveExpr::Mul(a, b) => a.log_abs(z) + b.log_abs(z),
            CurveExpr::Pow(a, e) => (*e as Real) * a.log_abs(z),
            CurveExpr::Exp(a) => a.eval(z).re,
            CurveExpr::Compose(o, i) => o.log_abs(i.eval(z)),
            CurveExpr::Add(..) => self.eval(z).norm().ln(),
        }
    }

    /// Degree-K Taylor expansion at `z0` by structural recursion.
    pub fn jet(&self, z0: Cx, order: usize) -> Result<JetSeries, CurveError> {
        Ok(match self {
            CurveExpr::Const(c) => JetSeries::constant(z0, *c, order),
            CurveExpr::Z => JetSeries::identity(z0, order),
            CurveExpr::Add(a, b) => a.jet(z0, order)?.add(&b.jet(z0, order)?)?,
            CurveExpr::Mul(a, b) => a.jet(z0, order)?.mul(&b.jet(z0, order)?)?,
            CurveExpr::Pow(a, e) => a.jet(z0, order)?.powi(*e)?,
            CurveExpr::Exp(a) => a.jet(z0, order)?.exp(),
            CurveExpr::Compose(o, i) => {
                let inner = i.jet(z0, order)?;
                let w0 = inner.value();
                let outer = o.jet(w0, order)?;
                let centered = inner.add_scalar(-w0);
                compose(&outer, &centered)?
            }
        })
    }

    /// Dense polynomial coefficients when the tree is polynomial.
    pub fn poly_coeffs(&self) -> Option<Vec<Cx>> {
        if !self.is_polynomial() {
            return None;
        }
        let bound = self.degree_bound();
        let jet = self.jet(Cx::new(0.0, 0.0), bound).ok()?;
        Some(jet.coeffs().to_vec())
    }

    /// Structural upper bound on the polynomial degree (exact absent
    /// cancellation).
    pub fn degree_bound(&self) -> usize {
        match self {
            CurveExpr::Const(_) => 0,
            CurveExpr::Z => 1,
            CurveExpr::Add(a, b) => a.degree_bound().max(b.degree_bound()),
            CurveExpr::Mul(a, b) => a.degree_bound() + b.degree_bound(),
            CurveExpr::Pow(a, e) => a.degree_bound() * (*e as usize),
            CurveExpr::Exp(_) => 0,
            CurveExpr::Compose(o, i) => o.degree_bound() * i.degree_bound().max(1),
        }
    }

    /// Rebuild an expression from dense coefficients (Horner form).
    pub fn from_poly_coeffs(coeffs: &[Cx]) -> CurveExpr {
        let trimmed = poly::trim(coeffs, 0.0);
        if trimmed.is_empty() {
            return CurveExpr::constant_re(0.0);
        }
        let mut acc = CurveExpr::constant(trimmed[trimmed.len() - 1]);
        for c in trimmed.iter().rev().skip(1) {
            acc = CurveExpr::add(CurveExpr::mul(acc, CurveExpr::Z), CurveExpr::constant(*c));
        }
        acc
    }
}

/// Parse the curve expression grammar:
/// `expr := num | "z" | expr+expr | expr*expr | expr^int | exp(polyexpr)`
/// with parentheses and `-` accepted as additive sugar.
pub fn parse_expr(src: &str) -> Result<CurveExpr, CurveError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    e.validate()?;
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> CurveError {
        CurveError::Parse { col: self.pos + 1, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<CurveExpr, CurveError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = CurveExpr::add(acc, self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = CurveExpr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<CurveExpr, CurveError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = CurveExpr::mul(acc, self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<CurveExpr, CurveError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a nonnegative integer exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("exponent out of range"))?;
            return Ok(CurveExpr::pow(base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<CurveExpr, CurveError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                let a = self.factor()?;
                Ok(CurveExpr::mul(CurveExpr::constant_re(-1.0), a))
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(CurveExpr::Z)
            }
            Some(b'e') if self.src[self.pos..].starts_with(b"exp") => {
                self.pos += 3;
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected '(' after exp"));
                }
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                CurveExpr::exp(arg)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos];
                    if c.is_ascii_digit() || c == b'.' {
                        self.pos += 1;
                    } else if (c == b'e' || c == b'E')
                        && self.pos + 1 < self.src.len()
                        && (self.src[self.pos + 1].is_ascii_digit()
                            || ((self.src[self.pos + 1] == b'+' || self.src[self.pos + 1] == b'-')
                                && self.pos + 2 < self.src.len()
                                && self.src[self.pos + 2].is_ascii_digit()))
                    {
                        self.pos += 2;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: Real = text.parse().map_err(|_| self.err("malformed number"))?;
                Ok(CurveExpr::constant_re(v))
            }
            _ => Err(self.err("expected a number, 'z', 'exp(', '(' or '-'")),
        }
    }
}

/// JSON description of a curve: `{n, R0, coords}` with `R0` a number or
/// `"inf"`.
#[derive(Debug, Deserialize)]
pub struct CurveSpec {
    pub n: usize,
    #[serde(rename = "R0", default)]
    pub r0: RadiusSpec,
    pub coords: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RadiusSpec {
    Number(Real),
    Word(String),
}

impl Default for RadiusSpec {
    fn default() -> Self {
        RadiusSpec::Word("inf".to_string())
    }
}

impl RadiusSpec {
    pub fn value(&self) -> Result<Real, CurveError> {
        match self {
            RadiusSpec::Number(x) if *x > 0.0 => Ok(*x),
            RadiusSpec::Number(_) => Err(CurveError::InvalidRadius),
            RadiusSpec::Word(w) if w == "inf" || w == "infinity" => Ok(Real::INFINITY),
            RadiusSpec::Word(_) => Err(CurveError::InvalidRadius),
        }
    }
}

/// A holomorphic map f: B(R0) -> P^n given by n+1 entire coordinates in
/// reduced representation (no common zero inside the domain).
#[derive(Debug, Clone)]
pub struct HoloCurve {
    n: usize,
    coords: Vec<CurveExpr>,
    r0: Real,
}

impl HoloCurve {
    pub fn new(coords: Vec<CurveExpr>, r0: Real) -> Result<Self, CurveError> {
        if r0 <= 0.0 || r0.is_nan() {
            return Err(CurveError::InvalidRadius);
        }
        if coords.len() < 2 {
            return Err(CurveError::DegenerateCoordinates);
        }
        for c in &coords {
            c.validate()?;
        }
        let n = coords.len() - 1;
        let mut curve = HoloCurve { n, coords, r0 };
        curve.check_not_all_zero()?;
        curve.recenter_if_needed()?;
        curve.check_reduced()?;
        Ok(curve)
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Self, CurveError> {
        if spec.coords.len() != spec.n + 1 {
            return Err(CurveError::DegenerateCoordinates);
        }
        let coords = spec
            .coords
            .iter()
            .map(|s| parse_expr(s))
            .collect::<Result<Vec<_>, _>>()?;
        HoloCurve::new(coords, spec.r0.value()?)
    }

    pub fn from_json(json: &str) -> Result<Self, CurveError> {
        let spec: CurveSpec = serde_json::from_str(json).map_err(|e| CurveError::Parse {
            col: e.column(),
            msg: e.to_string(),
        })?;
        HoloCurve::from_spec(&spec)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[CurveExpr] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &CurveExpr {
        &self.coords[i]
    }

    pub fn r0(&self) -> Real {
        self.r0
    }

    pub fn contains(&self, z: Cx) -> bool {
        z.norm() < self.r0
    }

    fn check_not_all_zero(&self) -> Result<(), CurveError> {
        for z in sample_points(self.r0) {
            let any = self.coords.iter().any(|c| c.eval(z).norm() > 0.0);
            if any {
                return Ok(());
            }
        }
        Err(CurveError::DegenerateCoordinates)
    }

    /// Standard normalization: when all coordinates vanish at 0, divide by
    /// z^nu with nu the minimal vanishing order. Exact for polynomial
    /// tuples; other trees cannot be factored in this node set.
    fn recenter_if_needed(&mut self) -> Result<(), CurveError> {
        let norm0: Real = self
            .coords
            .iter()
            .map(|c| c.eval(Cx::new(0.0, 0.0)).norm_sqr())
            .sum();
        if norm0 > 0.0 {
            return Ok(());
        }
        if !self.coords.iter().all(|c| c.is_polynomial()) {
            return Err(CurveError::CannotRecenter);
        }
        let coeff_vecs: Vec<Vec<Cx>> = self
            .coords
            .iter()
            .map(|c| poly::trim(&c.poly_coeffs().unwrap(), poly::COEFF_TRIM_REL))
            .collect();
        let nu = coeff_vecs
            .iter()
            .filter(|v| !v.is_empty())
            .map(|v| v.iter().position(|c| c.norm() > 0.0).unwrap_or(v.len()))
            .min()
            .ok_or(CurveError::DegenerateCoordinates)?;
        if nu == 0 {
            return Ok(());
        }
        self.coords = coeff_vecs
            .iter()
            .map(|v| {
                if v.len() <= nu {
                    CurveExpr::constant_re(0.0)
                } else {
                    CurveExpr::from_poly_coeffs(&v[nu..])
                }
            })
            .collect();
        Ok(())
    }

    /// Reduced-representation check: exact via gcd for polynomial tuples,
    /// sampled otherwise.
    fn check_reduced(&self) -> Result<(), CurveError> {
        if self.coords.iter().all(|c| c.is_polynomial()) {
            let mut g: Vec<Cx> = vec![];
            for c in &self.coords {
                let v = c.poly_coeffs().unwrap();
                g = poly::gcd(&g, &v, poly::COEFF_TRIM_REL);
                if g.len() == 1 {
                    return Ok(());
                }
            }
            if g.len() > 1 {
                for root in poly::roots(&g) {
                    if root.norm() < self.r0 * (1.0 - 1e-12) {
                        return Err(CurveError::CommonZero(root));
                    }
                }
            }
            Ok(())
        } else {
            for z in sample_points(self.r0) {
                let norm: Real = self.coords.iter().map(|c| c.eval(z).norm_sqr()).sum();
                if norm == 0.0 {
                    return Err(CurveError::CommonZero(z));
                }
            }
            Ok(())
        }
    }

    /// The k-jet of the curve at z0: one JetSeries per coordinate.
    pub fn jet_at(&self, z0: Cx, order: usize) -> Result<Vec<JetSeries>, CurveError> {
        if !self.contains(z0) {
            return Err(CurveError::OutsideDomain);
        }
        self.coords.iter().map(|c| c.jet(z0, order)).collect()
    }

    /// log of the Euclidean norm of the coordinate vector, computed in log
    /// space so exp-dominated coordinates cannot overflow.
    pub fn norm_log(&self, z: Cx) -> Result<Real, CurveError> {
        if !self.contains(z) {
            return Err(CurveError::OutsideDomain);
        }
        let logs: Vec<Real> = self.coords.iter().map(|c| c.log_abs(z)).collect();
        let m = logs.iter().copied().fold(Real::NEG_INFINITY, Real::max);
        if m == Real::NEG_INFINITY {
            return Err(CurveError::AllCoordinatesVanish);
        }
        let s: Real = logs.iter().map(|l| (2.0 * (l - m)).exp()).sum();
        Ok(m + 0.5 * s.ln())
    }

    pub fn is_polynomial(&self) -> bool {
        self.coords.iter().all(|c| c.is_polynomial())
    }
}

/// Deterministic sample points inside the domain, used by the sampled
/// degeneracy checks.
fn sample_points(r0: Real) -> Vec<Cx> {
    let r = if r0.is_finite() { 0.8 * r0 } else { 3.0 };
    // Fixed angles/radii; no run-to-run variation.
    [
        (0.37, 0.0),
        (0.81, 2.1),
        (0.55, 4.4),
        (0.93, 1.3),
        (0.21, 5.6),
        (0.68, 3.0),
    ]
    .iter()
    .map(|&(t, a): &(Real, Real)| Cx::from_polar(t * r, a))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: Real, im: Real) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn parse_and_eval() {
        let e = parse_expr("z^2 - 1").unwrap();
        assert_eq!(e.eval(c(3.0, 0.0)), c(8.0, 0.0));
        let e = parse_expr("exp(2*z)").unwrap();
        assert!((e.eval(c(1.0, 0.0)) - c(2.0f64.exp(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn parse_rejects_exp_of_exp() {
        assert!(parse_expr("exp(exp(z))").is_err());
    }

    #[test]
    fn parse_error_carries_column() {
        match parse_expr("z + $") {
            Err(CurveError::Parse { col, .. }) => assert_eq!(col, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn jet_of_linear_curve() {
        let f = HoloCurve::new(vec![parse_expr("1").unwrap(), parse_expr("z").unwrap()], Real::INFINITY).unwrap();
        let a = c(0.7, -0.2);
        let jets = f.jet_at(a, 2).unwrap();
        assert_eq!(jets[0].coeffs(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(jets[1].coeffs(), &[a, c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn jet_of_exp_at_origin() {
        let f = HoloCurve::new(vec![parse_expr("1").unwrap(), parse_expr("exp(z)").unwrap()], Real::INFINITY).unwrap();
        let jets = f.jet_at(c(0.0, 0.0), 3).unwrap();
        let expect = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (k, &e) in expect.iter().enumerate() {
            assert!((jets[1].coeff(k) - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn jet_of_square_at_one() {
        let f = HoloCurve::new(vec![parse_expr("1").unwrap(), parse_expr("z^2").unwrap()], Real::INFINITY).unwrap();
        let jets = f.jet_at(c(1.0, 0.0), 2).unwrap();
        assert_eq!(jets[1].coeffs(), &[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn norm_log_of_line_is_theta_independent() {
        let f = HoloCurve::new(vec![parse_expr("1").unwrap(), parse_expr("z").unwrap()], Real::INFINITY).unwrap();
        let r: Real = 2.5;
        let expect = 0.5 * (1.0 + r * r).ln();
        for k in 0..8 {
            let z = Cx::from_polar(r, 0.7 * k as Real);
            assert!((f.norm_log(z).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_log_constant_three_four() {
        let f = HoloCurve::new(
            vec![parse_expr("3").unwrap(), parse_expr("4").unwrap()],
            Real::INFINITY,
        )
        .unwrap();
        assert!((f.norm_log(c(1.0, 1.0)).unwrap() - 5.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn norm_log_unit_coordinate_in_p2() {
        let f = HoloCurve::new(
            vec![parse_expr("1").unwrap(), parse_expr("0").unwrap(), parse_expr("0").unwrap()],
            Real::INFINITY,
        )
        .unwrap();
        assert!(f.norm_log(c(0.3, 0.1)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn recenter_divides_out_common_power() {
        // (z, z^2) -> (1, z)
        let f = HoloCurve::new(vec![parse_expr("z").unwrap(), parse_expr("z^2").unwrap()], Real::INFINITY).unwrap();
        let z = c(0.5, 0.25);
        let v0 = f.coord(0).eval(z);
        let v1 = f.coord(1).eval(z);
        assert!((v0 - c(1.0, 0.0)).norm() < 1e-14);
        assert!((v1 - z).norm() < 1e-14);
    }

    #[test]
    fn domain_is_enforced() {
        let f = HoloCurve::new(
            vec![parse_expr("1").unwrap(), parse_expr("z").unwrap()],
            2.0,
        )
        .unwrap();
        assert!(f.jet_at(c(1.0, 0.5), 2).is_ok());
        assert!(matches!(f.jet_at(c(3.0, 0.0), 2), Err(CurveError::OutsideDomain)));
        assert!(matches!(f.norm_log(c(0.0, 2.5)), Err(CurveError::OutsideDomain)));
    }

    #[test]
    fn common_zero_is_rejected() {
        // (z-1, z-1) has a genuine common zero at 1
        let e = parse_expr("z - 1").unwrap();
        assert!(matches!(
            HoloCurve::new(vec![e.clone(), e], Real::INFINITY),
            Err(CurveError::CommonZero(_))
        ));
    }

    #[test]
    fn jet_truncation_consistency() {
        let exprs = [
            parse_expr("exp(z^2 + 1) * z + 3").unwrap(),
            parse_expr("(z^2 - 1)^3 + exp(z)").unwrap(),
        ];
        for e in &exprs {
            for &(re, im) in &[(0.3, 0.7), (-1.1, 0.2), (0.0, 0.0)] {
                let z0 = c(re, im);
                let j5 = e.jet(z0, 5).unwrap();
                let j4 = e.jet(z0, 4).unwrap();
                for k in 0..=4 {
                    let scale = 1.0 + j5.coeff(k).norm();
                    assert!((j5.coeff(k) - j4.coeff(k)).norm() < 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn compose_chain_rule_matches_series_composition() {
        // g(p(z)) with g = exp (as a tree composed with polynomial p)
        let g = parse_expr("exp(z)").unwrap();
        let p = parse_expr("z^2 + 2*z").unwrap();
        let composed = CurveExpr::compose_with_poly(g.clone(), p.clone()).unwrap();
        let z0 = c(0.4, -0.3);
        let direct = composed.jet(z0, 6).unwrap();
        // independent route: series-compose the component jets
        let pj = p.jet(z0, 6).unwrap();
        let gj = g.jet(pj.value(), 6).unwrap();
        let centered = pj.add_scalar(-pj.value());
        let via_series = compose(&gj, &centered).unwrap();
        for k in 0..=6 {
            let scale = 1.0 + direct.coeff(k).norm();
            assert!((direct.coeff(k) - via_series.coeff(k)).norm() < 1e-10 * scale);
        }
    }
}
