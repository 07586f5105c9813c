//! Circle quadrature and the radial Nevanlinna functionals: the
//! characteristic T, counting functions N and their truncations, proximity
//! m, First-Main-Theorem residuals, and the integral ratio checks behind
//! the logarithmic-derivative and jet-differential lemmas.

pub mod quad;
pub mod zeros;

pub use quad::circle_integral;
pub use zeros::{winding_number_circle, zero_set_of_expr, ZeroRecord, ZeroSet};

use crate::curve::{CurveError, CurveExpr, HoloCurve};
use crate::divisor::{DivisorError, Hypersurface};
use crate::jetcore::{Cx, JetError, Real};
use crate::jetdiff::{GGJetDifferential, JetDiffError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RadialError {
    #[error("quadrature did not converge within {nodes} nodes")]
    NoConvergence { nodes: usize },
    #[error("zero within the merging radius of the scan boundary at {0}; perturb r_max")]
    BoundaryZero(Cx),
    #[error("grid radius {r} exceeds the scanned radius {r_max}")]
    GridExceedsScan { r: Real, r_max: Real },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("scan cap exceeded: {0}")]
    ScanCapExceeded(String),
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("input function is identically zero")]
    IdenticallyZeroInput,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    JetDiff(#[from] JetDiffError),
}

/// Default quadrature tolerance.
pub const QUAD_TOL_DEFAULT: Real = 1e-10;

/// Quantity tag for a sampled radial function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProfileLabel {
    T,
    N,
    NTrunc(u32),
    M,
    S,
    Margin,
    Residual,
    Ratio,
}

impl std::fmt::Display for ProfileLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileLabel::T => write!(f, "T"),
            ProfileLabel::N => write!(f, "N"),
            ProfileLabel::NTrunc(k) => write!(f, "N^({k})"),
            ProfileLabel::M => write!(f, "m"),
            ProfileLabel::S => write!(f, "S"),
            ProfileLabel::Margin => write!(f, "margin"),
            ProfileLabel::Residual => write!(f, "residual"),
            ProfileLabel::Ratio => write!(f, "ratio"),
        }
    }
}

/// A sampled function of the radius.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub r_grid: Vec<Real>,
    pub values: Vec<Real>,
    pub label: ProfileLabel,
}

impl RadialProfile {
    pub fn new(r_grid: Vec<Real>, values: Vec<Real>, label: ProfileLabel) -> Self {
        assert_eq!(r_grid.len(), values.len());
        RadialProfile { r_grid, values, label }
    }

    /// Value at a grid radius (must match a node up to relative 1e-9).
    pub fn at(&self, r: Real) -> Option<Real> {
        self.r_grid
            .iter()
            .position(|&g| (g - r).abs() <= 1e-9 * (1.0 + g.abs()))
            .map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.r_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_grid.is_empty()
    }

    /// Index of the first node of the top-20% tail of the grid.
    pub fn tail_start(&self) -> usize {
        let n = self.len();
        n - (n / 5).max(1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value,label\n");
        for (r, v) in self.r_grid.iter().zip(&self.values) {
            out.push_str(&format!("{r},{v},{}\n", self.label));
        }
        out
    }
}

/// Strictly increasing linear grid in [r_min, r_max].
pub fn linear_grid(r_min: Real, r_max: Real, points: usize) -> Result<Vec<Real>, RadialError> {
    if points < 2 || r_min.is_nan() || r_min <= 0.0 || r_max <= r_min {
        return Err(RadialError::InvalidGrid(format!(
            "need points >= 2 and 0 < r_min < r_max, got ({r_min}, {r_max}) x {points}"
        )));
    }
    Ok((0..points)
        .map(|i| r_min + (r_max - r_min) * i as Real / (points - 1) as Real)
        .collect())
}

fn check_grid(f: &HoloCurve, r_grid: &[Real]) -> Result<(), RadialError> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RadialError::InvalidGrid("grid must be strictly increasing".into()));
    }
    if r_grid[0] <= 0.0 {
        return Err(RadialError::InvalidGrid("grid radii must be positive".into()));
    }
    if *r_grid.last().unwrap() >= f.r0() {
        return Err(RadialError::Curve(CurveError::OutsideDomain));
    }
    Ok(())
}

/// Characteristic function relative to O(d_twist):
/// T(r) = d * (mean of log||f|| on the circle of radius r - log||f(0)||).
pub fn characteristic_t(
    f: &HoloCurve,
    d_twist: i64,
    r_grid: &[Real],
    tol: Real,
) -> Result<RadialProfile, RadialError> {
    check_grid(f, r_grid)?;
    let base = f.norm_log(Cx::new(0.0, 0.0))?;
    let mut values = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let mean = circle_integral(|z| f.norm_log(z).unwrap_or(Real::NAN), r, tol)?;
        values.push(d_twist as Real * (mean - base));
    }
    Ok(RadialProfile::new(r_grid.to_vec(), values, ProfileLabel::T))
}

/// Zero set of the pullback of `q` under `f` scanned out to `r_max`, with
/// automatic boundary perturbation retries.
pub fn zero_set(f: &HoloCurve, q: &Hypersurface, r_max: Real) -> Result<ZeroSet, RadialError> {
    let psi = q.pullback(f)?;
    zero_set_of_expr_retry(&psi, r_max)
}

pub fn zero_set_of_expr_retry(psi: &CurveExpr, r_max: Real) -> Result<ZeroSet, RadialError> {
    let mut r = r_max;
    for _ in 0..4 {
        match zero_set_of_expr(psi, r) {
            Err(RadialError::BoundaryZero(_)) => r *= 1.0 + 1e-4,
            other => return other,
        }
    }
    zero_set_of_expr(psi, r)
}

/// Logarithmically weighted counting function with optional truncation:
/// N(r) = min(nu_0, c) log r + sum over 0 < |a| <= r of min(nu_a, c) log(r/|a|).
pub fn counting_n(
    zs: &ZeroSet,
    r_grid: &[Real],
    trunc: Option<u32>,
) -> Result<RadialProfile, RadialError> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RadialError::InvalidGrid("grid must be strictly increasing".into()));
    }
    if r_grid[0] < 1.0 {
        return Err(RadialError::InvalidGrid(
            "counting convention needs grid radii >= 1".into(),
        ));
    }
    let cap = |nu: u32| -> Real {
        match trunc {
            Some(c) => nu.min(c) as Real,
            None => nu as Real,
        }
    };
    let mut values = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if r > zs.r_max * (1.0 + 1e-12) {
            return Err(RadialError::GridExceedsScan { r, r_max: zs.r_max });
        }
        let mut n = cap(zs.origin_order) * r.ln();
        for rec in &zs.records {
            let d = rec.location.norm();
            if d <= r {
                n += cap(rec.order) * (r / d).ln();
            }
        }
        values.push(n);
    }
    let label = match trunc {
        Some(c) => ProfileLabel::NTrunc(c),
        None => ProfileLabel::N,
    };
    Ok(RadialProfile::new(r_grid.to_vec(), values, label))
}

/// Proximity function:
/// m(r) = mean of log( ||f||^d * coeff_norm / |Q(f)| ) on the circle.
pub fn proximity_m(
    f: &HoloCurve,
    q: &Hypersurface,
    r_grid: &[Real],
    tol: Real,
) -> Result<RadialProfile, RadialError> {
    check_grid(f, r_grid)?;
    let psi = q.pullback(f)?;
    let d = q.d() as Real;
    let log_cn = q.coeff_norm().ln();
    let mut values = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let mean = circle_integral(
            |z| d * f.norm_log(z).unwrap_or(Real::NAN) + log_cn - psi.log_abs(z),
            r,
            tol,
        )?;
        values.push(mean);
    }
    Ok(RadialProfile::new(r_grid.to_vec(), values, ProfileLabel::M))
}

/// First Main Theorem residual: d T(r) - m(r) - N(r), offset so the first
/// grid value is zero. The theorem says this stays bounded; at desk scale
/// it stays near zero.
pub fn fmt_residual(
    f: &HoloCurve,
    q: &Hypersurface,
    r_grid: &[Real],
    tol: Real,
) -> Result<RadialProfile, RadialError> {
    check_grid(f, r_grid)?;
    let t = characteristic_t(f, q.d() as i64, r_grid, tol)?;
    let m = proximity_m(f, q, r_grid, tol)?;
    let scan_r = r_grid.last().unwrap() * (1.0 + 1e-6);
    let zs = zero_set(f, q, scan_r)?;
    let n = counting_n(&zs, r_grid, None)?;
    let raw: Vec<Real> = (0..r_grid.len())
        .map(|i| t.values[i] - m.values[i] - n.values[i])
        .collect();
    let offset = raw[0];
    let values = raw.iter().map(|v| v - offset).collect();
    Ok(RadialProfile::new(r_grid.to_vec(), values, ProfileLabel::Residual))
}

/// Output of one integral-lemma ratio check.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaCheck {
    pub r: Real,
    pub big_r: Real,
    pub lhs: Real,
    pub rhs_core: Real,
    pub ratio: Real,
}

/// Logarithmic-derivative integral against its lemma core:
/// lhs = mean of |phi^(l)/phi|^t at radius r,
/// rhs_core = (R/(r(R-r)) * T_phi(R))^p.
/// The testable content is that lhs/rhs_core stays bounded over sweeps; the
/// lemma's constant K is never computed.
pub fn logderiv_bound_check(
    phi: &CurveExpr,
    l: usize,
    t: Real,
    p: Real,
    r: Real,
    big_r: Real,
    tol: Real,
) -> Result<LemmaCheck, RadialError> {
    if !(l >= 1 && t > 0.0 && t * (l as Real) < p && p < 1.0) {
        return Err(RadialError::ParameterViolation(format!(
            "need 0 < t*l < p < 1, got t = {t}, l = {l}, p = {p}"
        )));
    }
    if !(0.0 < r && r < big_r) {
        return Err(RadialError::ParameterViolation(format!(
            "need 0 < r < R, got r = {r}, R = {big_r}"
        )));
    }
    let lhs = circle_integral(
        |z| {
            let jet = match phi.jet(z, l) {
                Ok(j) => j,
                Err(_) => return Real::NAN,
            };
            let v = jet.coeff(0);
            if v.norm() == 0.0 {
                return Real::NAN;
            }
            (jet.derivative_at_base(l) / v).norm().powf(t)
        },
        r,
        tol,
    )?;
    // T of phi as the curve (1, phi)
    let curve = HoloCurve::new(vec![CurveExpr::constant_re(1.0), phi.clone()], Real::INFINITY)?;
    let t_phi = characteristic_t(&curve, 1, &[big_r], tol)?.values[0];
    let rhs_core = (big_r / (r * (big_r - r)) * t_phi).powf(p);
    Ok(LemmaCheck { r, big_r, lhs, rhs_core, ratio: lhs / rhs_core })
}

/// Jet-differential integral against the main-lemma core: the plain |P|^t
/// mean for an untwisted differential, the metric-norm mean otherwise;
/// rhs_core = (R/(r(R-r)) * T_{f,A}(R))^p with A = O(1).
pub fn main_lemma_check(
    p_diff: &GGJetDifferential,
    f: &HoloCurve,
    t: Real,
    p: Real,
    r: Real,
    big_r: Real,
    tol: Real,
) -> Result<LemmaCheck, RadialError> {
    let m = p_diff.m();
    if !(t > 0.0 && t * (m as Real) < p && p < 1.0) {
        return Err(RadialError::ParameterViolation(format!(
            "need 0 < t*m < p < 1, got t = {t}, m = {m}, p = {p}"
        )));
    }
    if !(0.0 < r && r < big_r && big_r < f.r0()) {
        return Err(RadialError::ParameterViolation(format!(
            "need 0 < r < R < R0, got r = {r}, R = {big_r}"
        )));
    }
    let twisted = p_diff.twist().0 != 0;
    let lhs = circle_integral(
        |z| {
            let v = if twisted {
                p_diff.metric_norm_along(f, z)
            } else {
                p_diff.eval_along(f, z).map(|c| c.norm())
            };
            match v {
                Ok(x) => x.powf(t),
                Err(_) => Real::NAN,
            }
        },
        r,
        tol,
    )?;
    let t_fa = characteristic_t(f, 1, &[big_r], tol)?.values[0];
    let rhs_core = (big_r / (r * (big_r - r)) * t_fa).powf(p);
    Ok(LemmaCheck { r, big_r, lhs, rhs_core, ratio: lhs / rhs_core })
}
