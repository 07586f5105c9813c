//! Second-Main-Theorem margin reports and defect estimates.
//!
//! Every inequality here holds up to an additive O(1), so each check
//! calibrates a single offset at the first grid radius, discloses it, and
//! asserts tail behavior only. Tail limits are estimated by the minimum
//! over the top 20% of the grid and are always labeled estimates.

use crate::curve::HoloCurve;
use crate::divisor::{self, Arrangement, DivisorError, Hypersurface};
use crate::jetcore::{Cx, Real, Vanishing, TAU_REL_DEFAULT};
use crate::jetdiff::{wronskian_series, GGJetDifferential, JetDiffError};
use crate::radial::{
    characteristic_t, counting_n, zero_set, ProfileLabel, RadialError, RadialProfile,
};
use num::rational::Ratio;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("radius {0} is not a grid node of the profile")]
    RadiusOutsideProfile(Real),
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("characteristic function is bounded on the grid; defect estimate needs growth")]
    BoundedCharacteristic,
    #[error("a zero of the pullback has order {found} < claimed multiplicity {claimed}")]
    MultiplicityHypothesisFailed { found: u32, claimed: u32 },
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    JetDiff(#[from] JetDiffError),
}

/// Which error-term regime the report used.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum ErrorCase {
    InfiniteRadius,
    FiniteRadius { r0: Real, k_const: Real },
}

/// Default epsilon in the error term S(r, f, A).
pub const EPSILON_DEFAULT: Real = 0.5;

fn log_plus(x: Real) -> Real {
    x.max(1.0).ln()
}

/// The error term S(r, f, A) of the second main theorems, with the O(1)
/// taken as 0 (the harness absorbs constants into its offset calibration).
///
/// Infinite-radius case:
///   m ((1+eps) log+ T(r) + (1+eps)^2 log+ log+ T(r));
/// finite-radius case:
///   K (log(1/(R0-r)) + log+ T(r)).
pub fn error_term_s(
    t_profile: &RadialProfile,
    m: u32,
    eps: Real,
    case: ErrorCase,
    r: Real,
) -> Result<Real, SmtError> {
    if eps <= 0.0 {
        return Err(SmtError::ParameterViolation("epsilon must be positive".into()));
    }
    let t = t_profile.at(r).ok_or(SmtError::RadiusOutsideProfile(r))?;
    Ok(match case {
        ErrorCase::InfiniteRadius => {
            (m as Real)
                * ((1.0 + eps) * log_plus(t) + (1.0 + eps) * (1.0 + eps) * log_plus(log_plus(t)))
        }
        ErrorCase::FiniteRadius { r0, k_const } => {
            if r >= r0 {
                return Err(SmtError::ParameterViolation(format!("r = {r} must be below R0 = {r0}")));
            }
            k_const * ((1.0 / (r0 - r)).ln() + log_plus(t))
        }
    })
}

/// Margin report for a second-main-theorem check.
///
/// `margin` is RHS - LHS with the error term S included, shifted so the
/// first grid value is zero; `offset` is the raw first value (the O(1)
/// disclosure). `sharpness` is the same difference without S, under its
/// own calibration: near-equality of the theorem shows up as a small
/// sharpness profile, while `tail_clean` asserts the S-padded inequality.
#[derive(Debug, Clone, Serialize)]
pub struct SMTReport {
    pub margin: RadialProfile,
    pub sharpness: RadialProfile,
    pub offset: Real,
    pub violating_measure: Real,
    pub tail_clean: bool,
    pub error_case: ErrorCase,
    pub t_profile: RadialProfile,
}

/// Which second-main-theorem harness to run.
pub enum SmtSpec<'a> {
    /// Cartan case through the Wronskian: hyperplanes in general position,
    /// jet order k = n, LHS = (q - n - 1) T, RHS = sum of N^{(n)} plus S.
    CartanWronskian { arrangement: &'a Arrangement },
    /// General logarithmic jet differential: LHS = m_tilde T, RHS = m N^{(1)}
    /// plus S.
    GeneralJetDiff {
        p_diff: &'a GGJetDifferential,
        divisor: &'a Hypersurface,
        m: u32,
        m_tilde: u32,
    },
}

fn degenerate_constant_check(f: &HoloCurve) -> Result<(), SmtError> {
    let probes = [Cx::new(0.31, 0.17), Cx::new(-0.62, 0.45), Cx::new(0.08, -0.77)];
    let scale = if f.r0().is_finite() { 0.5 * f.r0() } else { 1.0 };
    for z in probes {
        let jets = f.jet_at(z * scale, 1).map_err(RadialError::from)?;
        // nonconstant iff some ratio f_i/f_j moves: check the derivative of
        // f_i * f_j(0)-weighted combinations; cheaper: any coordinate pair
        // with nonproportional 1-jets
        for i in 0..jets.len() {
            for j in (i + 1)..jets.len() {
                let det = jets[i].coeff(0) * jets[j].coeff(1) - jets[j].coeff(0) * jets[i].coeff(1);
                let scale2 = jets[i].coeff(0).norm() * jets[j].coeff(1).norm()
                    + jets[j].coeff(0).norm() * jets[i].coeff(1).norm();
                if det.norm() > 1e-12 * scale2.max(1e-300) {
                    return Ok(());
                }
            }
        }
    }
    Err(SmtError::DegenerateInput("constant curve (hypothesis: f non-constant)".into()))
}

fn wronskian_nonzero_check(f: &HoloCurve, k: usize) -> Result<(), SmtError> {
    let probes = [Cx::new(0.27, -0.33), Cx::new(0.81, 0.52), Cx::new(-0.44, 0.69)];
    let scale = if f.r0().is_finite() { 0.5 * f.r0() } else { 1.0 };
    for z in probes {
        let jets = f.jet_at(z * scale, 64).map_err(RadialError::from)?;
        let w = wronskian_series(&jets[..=k], k, 64 - k)?;
        if !matches!(w.vanishing_order(TAU_REL_DEFAULT), Vanishing::Saturated) {
            return Ok(());
        }
    }
    Err(SmtError::DegenerateInput(
        "Wronskian vanishes identically (hypothesis: f linearly non-degenerate)".into(),
    ))
}

/// Lebesgue measure of the sub-grid where `values` < 0, trapezoid-estimated
/// with linear interpolation at sign crossings.
fn negative_measure(grid: &[Real], values: &[Real]) -> Real {
    let mut measure = 0.0;
    for i in 0..grid.len() - 1 {
        let (a, b) = (values[i], values[i + 1]);
        let dr = grid[i + 1] - grid[i];
        measure += if a < 0.0 && b < 0.0 {
            dr
        } else if a < 0.0 {
            dr * a / (a - b)
        } else if b < 0.0 {
            dr * b / (b - a)
        } else {
            0.0
        };
    }
    measure
}

/// Assemble a second-main-theorem margin report over the grid.
pub fn smt_margin(
    f: &HoloCurve,
    spec: &SmtSpec,
    r_grid: &[Real],
    eps: Real,
    tol: Real,
) -> Result<SMTReport, SmtError> {
    degenerate_constant_check(f)?;
    let n = f.n();
    let t1 = characteristic_t(f, 1, r_grid, tol)?;
    let scan_r = r_grid.last().copied().unwrap_or(1.0) * (1.0 + 1e-6);
    let error_case = if f.r0().is_finite() {
        ErrorCase::FiniteRadius { r0: f.r0(), k_const: 1.0 }
    } else {
        ErrorCase::InfiniteRadius
    };

    let (rhs_counting, lhs_factor, s_degree): (Vec<Real>, Real, u32) = match spec {
        SmtSpec::CartanWronskian { arrangement } => {
            if !divisor::general_position(arrangement)? {
                return Err(SmtError::DegenerateInput(
                    "arrangement not in general position".into(),
                ));
            }
            wronskian_nonzero_check(f, n)?;
            let q = arrangement.len();
            let mut sum = vec![0.0; r_grid.len()];
            for h in arrangement.iter() {
                let zs = zero_set(f, h, scan_r)?;
                let nk = counting_n(&zs, r_grid, Some(n as u32))?;
                for (acc, v) in sum.iter_mut().zip(&nk.values) {
                    *acc += v;
                }
            }
            // L + [D] = O(q - n - 1); the Wronskian has weighted degree
            // n(n+1)/2, which scales the error term
            (sum, (q as i64 - n as i64 - 1) as Real, (n * (n + 1) / 2) as u32)
        }
        SmtSpec::GeneralJetDiff { p_diff, divisor: d, m, m_tilde } => {
            // hypothesis: P(j_k f) not identically zero along the curve
            let probes = [Cx::new(0.13, 0.29), Cx::new(-0.57, 0.41), Cx::new(0.36, -0.65)];
            let scale = if f.r0().is_finite() { 0.5 * f.r0() } else { 1.0 };
            let nonzero = probes.iter().any(|&z| {
                p_diff
                    .eval_along(f, z * scale)
                    .map(|v| v.norm() > 1e-250)
                    .unwrap_or(false)
            });
            if !nonzero {
                return Err(SmtError::DegenerateInput(
                    "P(j_k(f)) vanishes identically (hypothesis of the jet-differential theorem)"
                        .into(),
                ));
            }
            let zs = zero_set(f, d, scan_r)?;
            let n1 = counting_n(&zs, r_grid, Some(1))?;
            let sum = n1.values.iter().map(|v| v * *m as Real).collect();
            (sum, *m_tilde as Real, *m)
        }
    };

    let mut margin_raw = Vec::with_capacity(r_grid.len());
    let mut sharp_raw = Vec::with_capacity(r_grid.len());
    for (i, &r) in r_grid.iter().enumerate() {
        let s = error_term_s(&t1, s_degree, eps, error_case, r)?;
        let lhs = lhs_factor * t1.values[i];
        margin_raw.push(rhs_counting[i] + s - lhs);
        sharp_raw.push(rhs_counting[i] - lhs);
    }
    let offset = margin_raw[0];
    let margin: Vec<Real> = margin_raw.iter().map(|v| v - offset).collect();
    let sharp0 = sharp_raw[0];
    let sharpness: Vec<Real> = sharp_raw.iter().map(|v| v - sharp0).collect();

    let violating_measure = negative_measure(r_grid, &margin);
    let tail = RadialProfile::new(r_grid.to_vec(), margin.clone(), ProfileLabel::Margin);
    let tail_clean = margin[tail.tail_start()..].iter().all(|&v| v >= -1e-9);

    Ok(SMTReport {
        margin: tail,
        sharpness: RadialProfile::new(r_grid.to_vec(), sharpness, ProfileLabel::Margin),
        offset,
        violating_measure,
        tail_clean,
        error_case,
        t_profile: t1,
    })
}

/// Defect estimate from the ratio profile
/// (T_{f,D}(r) - N^{(mu0)}(r, D)) / T_{f,A}(r).
#[derive(Debug, Clone, Serialize)]
pub struct DefectEstimate {
    pub ratio_profile: RadialProfile,
    pub liminf_estimate: Real,
    pub mu0: u32,
    /// Degree of the target divisor (the estimate lives in [0, d] up to
    /// numeric slack).
    pub d: u32,
    /// False when the tail oscillates; the estimate is evidence for a
    /// liminf, never a certified limit.
    pub tail_monotone: bool,
}

/// Estimate the Nevanlinna defect cut by mu0 against the divisor `q`, with
/// ampleness twist A = O(a_twist).
pub fn defect_estimate(
    f: &HoloCurve,
    q: &Hypersurface,
    a_twist: i64,
    mu0: u32,
    r_grid: &[Real],
    tol: Real,
) -> Result<DefectEstimate, SmtError> {
    if mu0 == 0 {
        return Err(SmtError::ParameterViolation("mu0 must be at least 1".into()));
    }
    if a_twist <= 0 {
        return Err(SmtError::ParameterViolation("A must be ample: a_twist >= 1".into()));
    }
    let t1 = characteristic_t(f, 1, r_grid, tol)?;
    let t_a_first = a_twist as Real * t1.values[0];
    let t_a_last = a_twist as Real * t1.values[r_grid.len() - 1];
    if t_a_last <= t_a_first + 1.0 {
        return Err(SmtError::BoundedCharacteristic);
    }
    let scan_r = r_grid.last().unwrap() * (1.0 + 1e-6);
    let zs = zero_set(f, q, scan_r)?;
    let n_mu0 = counting_n(&zs, r_grid, Some(mu0))?;
    let d = q.d() as Real;
    let ratio: Vec<Real> = (0..r_grid.len())
        .map(|i| (d * t1.values[i] - n_mu0.values[i]) / (a_twist as Real * t1.values[i]))
        .collect();
    let profile = RadialProfile::new(r_grid.to_vec(), ratio.clone(), ProfileLabel::Ratio);
    let tail_start = profile.tail_start();
    let tail = &ratio[tail_start..];
    let liminf_estimate = tail.iter().copied().fold(Real::INFINITY, Real::min);
    let increasing = tail.windows(2).all(|w| w[1] >= w[0] - 1e-6);
    let decreasing = tail.windows(2).all(|w| w[1] <= w[0] + 1e-6);
    Ok(DefectEstimate {
        ratio_profile: profile,
        liminf_estimate,
        mu0,
        d: q.d(),
        tail_monotone: increasing || decreasing,
    })
}

/// Contact multiplicity everywhere along the divisor: finite or "omitted".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Finite(u32),
    Infinite,
}

/// Lower bound (1 - mu0/mu) / gamma for the non-integrated defect when
/// every intersection has multiplicity at least mu; mu = infinity (the
/// omitted case) gives 1/gamma.
pub fn defect_lower_bound(mu0: u32, mu: Multiplicity, gamma: Ratio<i64>) -> Result<Real, SmtError> {
    if mu0 < 1 {
        return Err(SmtError::ParameterViolation("mu0 must be at least 1".into()));
    }
    if gamma <= Ratio::new(0, 1) {
        return Err(SmtError::ParameterViolation("gamma must be positive".into()));
    }
    let g = *gamma.numer() as Real / *gamma.denom() as Real;
    match mu {
        Multiplicity::Infinite => Ok(1.0 / g),
        Multiplicity::Finite(mu) => {
            if mu < mu0 {
                return Err(SmtError::ParameterViolation(format!(
                    "need mu >= mu0 >= 1, got mu = {mu}, mu0 = {mu0}"
                )));
            }
            Ok((1.0 - mu0 as Real / mu as Real) / g)
        }
    }
}

/// Which defect-relation bound to measure a defect sum against.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum BoundSpec {
    /// Hyperplane bound n + 1 + rho n (n+1).
    Fujimoto { n: u32, rho: Real },
    /// Jet-differential bound gamma_{A,L} + 2 rho m.
    GammaBound { gamma_al: Real, rho: Real, m: u32 },
    /// High-degree hypersurface bound d - (c - 2 rho).
    Brotbek { d: u32, c: u32, rho: Real },
    /// Truncated-counting bound gamma - m_tilde / m.
    XieBound { gamma: Real, m: u32, m_tilde: u32 },
}

impl BoundSpec {
    pub fn value(&self) -> Result<Real, SmtError> {
        Ok(match *self {
            BoundSpec::Fujimoto { n, rho } => {
                if rho < 0.0 {
                    return Err(SmtError::ParameterViolation("rho must be >= 0".into()));
                }
                (n + 1) as Real + rho * (n * (n + 1)) as Real
            }
            BoundSpec::GammaBound { gamma_al, rho, m } => {
                if rho < 0.0 {
                    return Err(SmtError::ParameterViolation("rho must be >= 0".into()));
                }
                gamma_al + 2.0 * rho * m as Real
            }
            BoundSpec::Brotbek { d, c, rho } => {
                if rho < 0.0 {
                    return Err(SmtError::ParameterViolation("rho must be >= 0".into()));
                }
                d as Real - (c as Real - 2.0 * rho)
            }
            BoundSpec::XieBound { gamma, m, m_tilde } => {
                if m == 0 {
                    return Err(SmtError::ParameterViolation("m must be positive".into()));
                }
                gamma - m_tilde as Real / m as Real
            }
        })
    }
}

/// bound - sum(defects): nonnegative is the relation's claim for
/// admissible inputs; this only computes the number.
pub fn defect_relation_margin(defects: &[Real], bound: BoundSpec) -> Result<Real, SmtError> {
    if defects.iter().any(|&d| d < 0.0 || !d.is_finite()) {
        return Err(SmtError::ParameterViolation(
            "defects must be finite and nonnegative".into(),
        ));
    }
    Ok(bound.value()? - defects.iter().sum::<Real>())
}

/// Composed consistency of the lower bound through the defect comparison:
/// checks every scanned zero has order >= mu_claimed, then compares
/// (1 - mu0/mu)/gamma against the liminf estimate with 0.05 slack.
pub fn defect_consistency(
    f: &HoloCurve,
    q: &Hypersurface,
    mu0: u32,
    mu_claimed: Multiplicity,
    gamma: Ratio<i64>,
    r_grid: &[Real],
    tol: Real,
) -> Result<bool, SmtError> {
    let scan_r = r_grid.last().copied().unwrap_or(1.0) * (1.0 + 1e-6);
    let zs = zero_set(f, q, scan_r)?;
    if let Multiplicity::Finite(mu) = mu_claimed {
        let mut orders: Vec<u32> = zs.records.iter().map(|z| z.order).collect();
        if zs.origin_order > 0 {
            orders.push(zs.origin_order);
        }
        for found in orders {
            if found < mu {
                return Err(SmtError::MultiplicityHypothesisFailed { found, claimed: mu });
            }
        }
    } else if zs.origin_order > 0 || !zs.records.is_empty() {
        return Err(SmtError::MultiplicityHypothesisFailed {
            found: zs.records.first().map(|z| z.order).unwrap_or(zs.origin_order),
            claimed: u32::MAX,
        });
    }
    let bound = defect_lower_bound(mu0, mu_claimed, gamma)?;
    let est = defect_estimate(f, q, 1, mu0, r_grid, tol)?;
    Ok(bound <= est.liminf_estimate + 0.05)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::parse_expr;
    use crate::divisor::{gamma, Hypersurface, LineBundleO};
    use crate::radial::linear_grid;

    fn c(re: Real) -> Cx {
        Cx::new(re, 0.0)
    }

    fn curve(coords: &[&str]) -> HoloCurve {
        HoloCurve::new(
            coords.iter().map(|s| parse_expr(s).unwrap()).collect(),
            Real::INFINITY,
        )
        .unwrap()
    }

    fn line(coeffs: &[Real]) -> Hypersurface {
        Hypersurface::hyperplane(&coeffs.iter().map(|&x| c(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn error_term_values() {
        let grid = vec![1.0, 2.0];
        let t = RadialProfile::new(grid.clone(), vec![std::f64::consts::E, 1.0], ProfileLabel::T);
        // case (i): T = e, m = 1, eps = 0.5: 1.5 * 1 + 2.25 * 0 = 1.5
        let s = error_term_s(&t, 1, 0.5, ErrorCase::InfiniteRadius, 1.0).unwrap();
        assert!((s - 1.5).abs() < 1e-12);
        // T <= 1: both log+ terms vanish
        let s = error_term_s(&t, 3, 0.5, ErrorCase::InfiniteRadius, 2.0).unwrap();
        assert_eq!(s, 0.0);
        // case (ii): K = 1, R0 = 1, r = 1 - e^{-2}, T = 1 -> 2
        let grid = vec![1.0 - (-2.0f64).exp()];
        let t = RadialProfile::new(grid.clone(), vec![1.0], ProfileLabel::T);
        let s = error_term_s(
            &t,
            1,
            0.5,
            ErrorCase::FiniteRadius { r0: 1.0, k_const: 1.0 },
            grid[0],
        )
        .unwrap();
        assert!((s - 2.0).abs() < 1e-9);
        // off-grid radius
        assert!(matches!(
            error_term_s(&t, 1, 0.5, ErrorCase::InfiniteRadius, 0.123),
            Err(SmtError::RadiusOutsideProfile(_))
        ));
    }

    #[test]
    fn cartan_margin_for_line_with_three_points() {
        // f = (1, z) against 3 distinct hyperplanes of P^1:
        // LHS = (3-1-1) T = T ~ log r, N^{(1)} ~ 3 log r: margin grows
        let f = curve(&["1", "z"]);
        let arr = Arrangement::new(vec![
            line(&[0.0, 1.0]),
            line(&[1.0, 0.0]),
            line(&[1.0, -1.0]),
        ])
        .unwrap();
        let grid = linear_grid(2.0, 20.0, 16).unwrap();
        let report =
            smt_margin(&f, &SmtSpec::CartanWronskian { arrangement: &arr }, &grid, 0.5, 1e-9)
                .unwrap();
        assert!(report.tail_clean);
        assert_eq!(report.violating_measure, 0.0);
        // margin grows ~ 2 log r over the grid
        let last = *report.margin.values.last().unwrap();
        assert!(last > 2.0, "margin should grow, got {last}");
    }

    #[test]
    fn constant_curve_is_degenerate() {
        let f = curve(&["3", "4"]);
        let arr = Arrangement::new(vec![line(&[0.0, 1.0]), line(&[1.0, 0.0])]).unwrap();
        let grid = linear_grid(2.0, 10.0, 8).unwrap();
        assert!(matches!(
            smt_margin(&f, &SmtSpec::CartanWronskian { arrangement: &arr }, &grid, 0.5, 1e-9),
            Err(SmtError::DegenerateInput(_))
        ));
    }

    #[test]
    fn linearly_degenerate_curve_is_rejected() {
        // (1, z, 2z): coordinates linearly dependent, Wronskian vanishes
        let f = curve(&["1", "z", "2*z"]);
        let arr = Arrangement::new(vec![
            line(&[1.0, 0.0, 0.0]),
            line(&[0.0, 1.0, 0.0]),
            line(&[0.0, 0.0, 1.0]),
            line(&[1.0, 1.0, 1.0]),
        ])
        .unwrap();
        let grid = linear_grid(2.0, 10.0, 8).unwrap();
        assert!(matches!(
            smt_margin(&f, &SmtSpec::CartanWronskian { arrangement: &arr }, &grid, 0.5, 1e-9),
            Err(SmtError::DegenerateInput(_))
        ));
    }

    #[test]
    fn violating_measure_is_stable_as_the_grid_extends() {
        // the margin's negative set is bounded (the exceptional-set
        // surrogate); extending the grid does not grow its measure
        let f = curve(&["1", "exp(z)"]);
        let arr = Arrangement::new(vec![
            line(&[0.0, 1.0]),
            line(&[1.0, 0.0]),
            line(&[1.0, 1.0]),
        ])
        .unwrap();
        let short = linear_grid(2.0, 20.0, 19).unwrap();
        let long = linear_grid(2.0, 30.0, 29).unwrap();
        let spec = SmtSpec::CartanWronskian { arrangement: &arr };
        let m_short = smt_margin(&f, &spec, &short, 0.5, 1e-9).unwrap().violating_measure;
        let m_long = smt_margin(&f, &spec, &long, 0.5, 1e-9).unwrap().violating_measure;
        assert!(m_short.is_finite() && m_long.is_finite());
        assert!(m_long <= m_short + 0.1, "measure grew: {m_short} -> {m_long}");
    }

    #[test]
    fn finite_radius_case_uses_the_boundary_error_term() {
        let f = HoloCurve::new(
            vec![parse_expr("1").unwrap(), parse_expr("exp(z)").unwrap()],
            40.0,
        )
        .unwrap();
        let arr = Arrangement::new(vec![
            line(&[0.0, 1.0]),
            line(&[1.0, 0.0]),
            line(&[1.0, 1.0]),
        ])
        .unwrap();
        let grid = linear_grid(2.0, 30.0, 16).unwrap();
        let report =
            smt_margin(&f, &SmtSpec::CartanWronskian { arrangement: &arr }, &grid, 0.5, 1e-9)
                .unwrap();
        assert!(matches!(report.error_case, ErrorCase::FiniteRadius { r0, .. } if r0 == 40.0));
        assert!(report.tail_clean);
    }

    #[test]
    fn defect_of_omitted_divisor_is_one() {
        let f = curve(&["1", "exp(z)"]);
        let q = line(&[0.0, 1.0]); // x1 = 0 is omitted by e^z
        let grid = linear_grid(2.0, 30.0, 24).unwrap();
        let est = defect_estimate(&f, &q, 1, 1, &grid, 1e-9).unwrap();
        assert!((est.liminf_estimate - 1.0).abs() < 0.01, "{}", est.liminf_estimate);
    }

    #[test]
    fn defect_of_hit_divisor_is_zero() {
        let f = curve(&["1", "z"]);
        let q = line(&[-1.0, 1.0]); // x1 - x0: hit at z = 1
        let grid = linear_grid(2.0, 40.0, 24).unwrap();
        let est = defect_estimate(&f, &q, 1, 1, &grid, 1e-9).unwrap();
        assert!(est.liminf_estimate.abs() < 0.05, "{}", est.liminf_estimate);
    }

    #[test]
    fn truncation_consistency_when_orders_exceed_mu0() {
        // all zeros of the pullback have order 2 >= mu0 + 1, so
        // N^{(mu0)} = mu0 N^{(1)} pointwise
        let f = curve(&["1", "(z - 1)^2 * (z + 3)^2"]);
        let q = line(&[0.0, 1.0]);
        let grid = linear_grid(2.0, 12.0, 8).unwrap();
        let scan = grid.last().unwrap() * 1.001;
        let zs = zero_set(&f, &q, scan).unwrap();
        assert!(zs.records.iter().all(|z| z.order == 2));
        let mu0 = 2u32;
        let n1 = counting_n(&zs, &grid, Some(1)).unwrap();
        let nmu = counting_n(&zs, &grid, Some(mu0)).unwrap();
        for (a, b) in nmu.values.iter().zip(&n1.values) {
            assert!((a - mu0 as Real * b).abs() < 1e-12);
        }
    }

    #[test]
    fn defect_lower_bound_values() {
        // omitted divisor of degree d: gamma_{D,-A} = 1/d, bound = d
        let g = gamma(LineBundleO(7), LineBundleO(-1)).finite().unwrap();
        assert!((defect_lower_bound(1, Multiplicity::Infinite, g).unwrap() - 7.0).abs() < 1e-12);
        // mu = mu0: bound 0
        let one = Ratio::new(1, 1);
        assert_eq!(defect_lower_bound(3, Multiplicity::Finite(3), one).unwrap(), 0.0);
        // mu0 = 2, mu = 4, gamma = 1: 0.5
        assert!((defect_lower_bound(2, Multiplicity::Finite(4), one).unwrap() - 0.5).abs() < 1e-12);
        assert!(defect_lower_bound(2, Multiplicity::Finite(1), one).is_err());
    }

    #[test]
    fn relation_margins() {
        // two omitted values of exp against the hyperplane bound: sharp
        let m = defect_relation_margin(&[1.0, 1.0], BoundSpec::Fujimoto { n: 1, rho: 0.0 })
            .unwrap();
        assert!(m.abs() < 1e-12);
        // empty defects give the bound itself
        let m = defect_relation_margin(&[], BoundSpec::GammaBound { gamma_al: 4.0, rho: 0.0, m: 3 })
            .unwrap();
        assert!((m - 4.0).abs() < 1e-12);
        // Thm: delta_1 <= d - c at rho = 0 with the extremal defect d - c
        let m = defect_relation_margin(&[5.0], BoundSpec::Brotbek { d: 8, c: 3, rho: 0.0 })
            .unwrap();
        assert!(m.abs() < 1e-12);
        assert!(defect_relation_margin(&[-0.1], BoundSpec::Fujimoto { n: 1, rho: 0.0 }).is_err());
    }

    #[test]
    fn xie_and_gamma_bound_values() {
        // gamma_{A,-D} = d for a degree-d divisor, so the truncated bound
        // is d - m_tilde/m
        let g = gamma(LineBundleO(1), LineBundleO(-7)).finite().unwrap();
        let g_real = *g.numer() as Real / *g.denom() as Real;
        let m = defect_relation_margin(
            &[2.0],
            BoundSpec::XieBound { gamma: g_real, m: 3, m_tilde: 6 },
        )
        .unwrap();
        assert!((m - (7.0 - 2.0 - 2.0)).abs() < 1e-12);
        assert!(defect_relation_margin(&[], BoundSpec::XieBound { gamma: 1.0, m: 0, m_tilde: 1 })
            .is_err());
    }

    #[test]
    fn defect_ratio_profiles_stay_in_range() {
        // estimates live in [-0.05, d + 0.05] for degree-d targets
        let grid = linear_grid(2.0, 25.0, 16).unwrap();
        let cases: [(&[&str], Hypersurface); 3] = [
            (&["1", "exp(z)"], line(&[0.0, 1.0])),
            (&["1", "z"], line(&[-1.0, 1.0])),
            (&["1", "z^2"], line(&[0.0, 1.0])),
        ];
        for (coords, q) in cases {
            let f = curve(coords);
            let est = defect_estimate(&f, &q, 1, 1, &grid, 1e-9).unwrap();
            let d = est.d as Real;
            for v in &est.ratio_profile.values {
                assert!((-0.05..=d + 0.05).contains(v), "ratio {v} outside [-0.05, {d}+0.05]");
            }
        }
    }

    #[test]
    fn consistency_for_omitted_and_branched() {
        let grid = linear_grid(2.0, 30.0, 20).unwrap();
        // omitted: bound 1/gamma = 1 vs estimate ~= 1
        let f = curve(&["1", "exp(z)"]);
        let q = line(&[0.0, 1.0]);
        let g = gamma(LineBundleO(1), LineBundleO(-1)).finite().unwrap();
        assert!(defect_consistency(&f, &q, 1, Multiplicity::Infinite, g, &grid, 1e-9).unwrap());
        // branched double cover: all contact orders 2, bound 0.5 vs ~0.5
        let f = curve(&["1", "z^2"]);
        assert!(defect_consistency(&f, &q, 1, Multiplicity::Finite(2), g, &grid, 1e-9).unwrap());
        // claiming more multiplicity than the curve has
        let f = curve(&["1", "z"]);
        assert!(matches!(
            defect_consistency(&f, &q, 1, Multiplicity::Finite(2), g, &grid, 1e-9),
            Err(SmtError::MultiplicityHypothesisFailed { .. })
        ));
    }
}
