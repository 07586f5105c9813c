//! Circle quadrature: the periodic trapezoid rule, spectrally accurate for
//! analytic integrands, with singular-node perturbation for integrands that
//! carry logarithmic singularities at finitely many angles.

use crate::jetcore::{Cx, Real};
use crate::radial::RadialError;

/// Node cap: doubling stops at 2^20 nodes.
pub const NODE_CAP: usize = 1 << 20;

const N_START: usize = 64;

/// Mean of `g` over the circle of radius `r` (the measure dtheta/2pi).
/// Node counts double until successive estimates differ by less than `tol`.
/// A node where `g` is not finite is re-evaluated half a step away.
pub fn circle_integral(
    g: impl Fn(Cx) -> Real,
    r: Real,
    tol: Real,
) -> Result<Real, RadialError> {
    let eval = |theta: Real, h: Real| -> Result<Real, RadialError> {
        let at = |t: Real| g(Cx::from_polar(r, t));
        let mut v = at(theta);
        if !v.is_finite() {
            v = at(theta + 0.5 * h);
        }
        if !v.is_finite() {
            v = at(theta - 0.25 * h);
        }
        if v.is_finite() {
            Ok(v)
        } else {
            Err(RadialError::NoConvergence { nodes: 0 })
        }
    };

    let mut n = N_START;
    let h = 2.0 * std::f64::consts::PI / n as Real;
    let mut sum = 0.0;
    for j in 0..n {
        sum += eval(j as Real * h, h)?;
    }
    let mut estimate = sum / n as Real;
    while n < NODE_CAP {
        // refine with the odd nodes only
        let h2 = std::f64::consts::PI / n as Real; // step of the 2n-grid
        let mut odd = 0.0;
        for j in 0..n {
            odd += eval((2 * j + 1) as Real * h2, h2)?;
        }
        let next = 0.5 * (estimate + odd / n as Real);
        n *= 2;
        let done = (next - estimate).abs() < tol;
        estimate = next;
        if done {
            return Ok(estimate);
        }
    }
    Err(RadialError::NoConvergence { nodes: n })
}
