//! Truncated power-series (jet) arithmetic over complex scalars.
//!
//! A `JetSeries` is the computational form of a k-jet: the first K+1 Taylor
//! coefficients of a function at a base point, with exact truncated-ring
//! semantics. Results never carry more coefficients than both operands can
//! justify (order of a binary result is the min of the operand orders), so
//! no coefficient is ever fabricated.

use num_complex::Complex;
use thiserror::Error;

/// Working real precision. The whole crate funnels through this alias (and
/// [`Cx`]); switching precision is a rebuild with a different alias, not a
/// redesign.
pub type Real = f64;

/// Working complex scalar.
pub type Cx = Complex<Real>;

/// Default relative threshold separating genuine vanishing from roundoff
/// when reading orders off a jet.
pub const TAU_REL_DEFAULT: Real = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum JetError {
    #[error("operands have different base points ({0} vs {1})")]
    MismatchedBasePoint(Cx, Cx),
    #[error("division by a series that vanishes to its full order")]
    DivisionByZeroSeries,
    #[error("quotient has a pole: divisor vanishes to higher order than dividend")]
    QuotientPole,
    #[error("operation needs order >= {needed}, series has order {have}")]
    InsufficientOrder { needed: usize, have: usize },
}

/// Result of reading a vanishing order off a truncated series.
///
/// `Saturated` means every stored coefficient is below the relative
/// threshold: the order is at least K+1 and the caller must re-expand
/// deeper to resolve it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vanishing {
    Order(usize),
    Saturated,
}

impl Vanishing {
    pub fn order(self) -> Option<usize> {
        match self {
            Vanishing::Order(k) => Some(k),
            Vanishing::Saturated => None,
        }
    }
}

/// Truncated Taylor expansion `sum_{k<=K} coeffs[k] t^k` with `t` the local
/// parameter centered at `base_point`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetSeries {
    base_point: Cx,
    coeffs: Vec<Cx>,
}

impl JetSeries {
    /// Build from raw coefficients; `coeffs.len()` must be K+1 >= 1.
    pub fn new(base_point: Cx, coeffs: Vec<Cx>) -> Self {
        assert!(!coeffs.is_empty(), "a jet carries at least the 0-th coefficient");
        JetSeries { base_point, coeffs }
    }

    /// Jet of the constant function `value` to order `order`.
    pub fn constant(base_point: Cx, value: Cx, order: usize) -> Self {
        let mut coeffs = vec![Cx::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        JetSeries { base_point, coeffs }
    }

    /// Jet of the identity `z` at `base_point`: constant term is the base
    /// point itself, linear term 1.
    pub fn identity(base_point: Cx, order: usize) -> Self {
        let mut coeffs = vec![Cx::new(0.0, 0.0); order + 1];
        coeffs[0] = base_point;
        if order >= 1 {
            coeffs[1] = Cx::new(1.0, 0.0);
        }
        JetSeries { base_point, coeffs }
    }

    pub fn base_point(&self) -> Cx {
        self.base_point
    }

    /// Truncation order K.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Cx {
        self.coeffs[k]
    }

    /// Value of the underlying function at the base point.
    pub fn value(&self) -> Cx {
        self.coeffs[0]
    }

    /// k-th derivative at the base point (coefficient times k!).
    pub fn derivative_at_base(&self, k: usize) -> Cx {
        let mut fact = 1.0;
        for j in 2..=k {
            fact *= j as Real;
        }
        self.coeffs[k] * fact
    }

    /// Drop coefficients beyond order `k`.
    pub fn truncated(&self, k: usize) -> JetSeries {
        let k = k.min(self.order());
        JetSeries {
            base_point: self.base_point,
            coeffs: self.coeffs[..=k].to_vec(),
        }
    }

    fn check_base(&self, other: &JetSeries) -> Result<(), JetError> {
        if self.base_point != other.base_point {
            return Err(JetError::MismatchedBasePoint(self.base_point, other.base_point));
        }
        Ok(())
    }

    #[allow(clippy::should_implement_trait)] // Result-returning: base points must match
    pub fn add(&self, other: &JetSeries) -> Result<JetSeries, JetError> {
        self.check_base(other)?;
        let k = self.order().min(other.order());
        let coeffs = (0..=k).map(|i| self.coeffs[i] + other.coeffs[i]).collect();
        Ok(JetSeries { base_point: self.base_point, coeffs })
    }

    #[allow(clippy::should_implement_trait)] // Result-returning: base points must match
    pub fn sub(&self, other: &JetSeries) -> Result<JetSeries, JetError> {
        self.check_base(other)?;
        let k = self.order().min(other.order());
        let coeffs = (0..=k).map(|i| self.coeffs[i] - other.coeffs[i]).collect();
        Ok(JetSeries { base_point: self.base_point, coeffs })
    }

    #[allow(clippy::should_implement_trait)] // Result-returning: base points must match
    pub fn mul(&self, other: &JetSeries) -> Result<JetSeries, JetError> {
        self.check_base(other)?;
        let k = self.order().min(other.order());
        let mut coeffs = vec![Cx::new(0.0, 0.0); k + 1];
        for i in 0..=k {
            for j in 0..=(k - i) {
                coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        Ok(JetSeries { base_point: self.base_point, coeffs })
    }

    /// Truncated division. The common vanishing order of the divisor is
    /// factored out of both operands first; after that the divisor must have
    /// a nonzero constant term, else the quotient would carry a pole.
    #[allow(clippy::should_implement_trait)] // Result-returning: base points must match
    pub fn div(&self, other: &JetSeries) -> Result<JetSeries, JetError> {
        self.check_base(other)?;
        let nu_b = match other.coeffs.iter().position(|c| c.norm_sqr() != 0.0) {
            Some(i) => i,
            None => return Err(JetError::DivisionByZeroSeries),
        };
        let nu_a = self.coeffs.iter().position(|c| c.norm_sqr() != 0.0);
        if let Some(nu_a) = nu_a {
            if nu_b > nu_a {
                return Err(JetError::QuotientPole);
            }
        }
        // Shift both down by nu_b; the quotient is then known only to
        // min(Ka, Kb) - nu_b.
        let k = self.order().min(other.order());
        if k < nu_b {
            return Err(JetError::InsufficientOrder { needed: nu_b, have: k });
        }
        let k = k - nu_b;
        let a: Vec<Cx> = self.coeffs[nu_b..].to_vec();
        let b: Vec<Cx> = other.coeffs[nu_b..].to_vec();
        let mut q = vec![Cx::new(0.0, 0.0); k + 1];
        for i in 0..=k {
            let mut acc = a[i];
            for j in 0..i {
                acc -= q[j] * b[i - j];
            }
            q[i] = acc / b[0];
        }
        Ok(JetSeries { base_point: self.base_point, coeffs: q })
    }

    /// Termwise derivative; maps order K to K-1.
    pub fn derivative(&self) -> Result<JetSeries, JetError> {
        let k = self.order();
        if k == 0 {
            return Err(JetError::InsufficientOrder { needed: 1, have: 0 });
        }
        let coeffs = (1..=k).map(|i| self.coeffs[i] * (i as Real)).collect();
        Ok(JetSeries { base_point: self.base_point, coeffs })
    }

    /// The C*-action on jets: reparametrize t -> lambda t, multiplying the
    /// t^k coefficient by lambda^k.
    pub fn rescale(&self, lambda: Cx) -> JetSeries {
        let mut pow = Cx::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * pow;
                pow *= lambda;
                out
            })
            .collect();
        JetSeries { base_point: self.base_point, coeffs }
    }

    pub fn neg(&self) -> JetSeries {
        JetSeries {
            base_point: self.base_point,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: Cx) -> JetSeries {
        JetSeries {
            base_point: self.base_point,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: Cx) -> JetSeries {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Integer power by repeated squaring; order is preserved.
    pub fn powi(&self, e: u32) -> Result<JetSeries, JetError> {
        let mut acc = JetSeries::constant(self.base_point, Cx::new(1.0, 0.0), self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// exp of the series, via the recurrence b' = a' b.
    pub fn exp(&self) -> JetSeries {
        let k = self.order();
        let mut b = vec![Cx::new(0.0, 0.0); k + 1];
        b[0] = self.coeffs[0].exp();
        for i in 1..=k {
            let mut acc = Cx::new(0.0, 0.0);
            for j in 1..=i {
                acc += (j as Real) * self.coeffs[j] * b[i - j];
            }
            b[i] = acc / (i as Real);
        }
        JetSeries { base_point: self.base_point, coeffs: b }
    }

    /// Smallest k with |coeffs[k]| > tau_rel * max_j |coeffs[j]|, or
    /// `Saturated` when no coefficient clears the threshold.
    pub fn vanishing_order(&self, tau_rel: Real) -> Vanishing {
        let max = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0 as Real, Real::max);
        if max == 0.0 || !max.is_finite() {
            return Vanishing::Saturated;
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() > tau_rel * max {
                return Vanishing::Order(k);
            }
        }
        Vanishing::Saturated
    }
}

/// Composition `outer(inner(t))` truncated to the inner order. The inner
/// series must have zero constant term (pre-centered); the outer base point
/// is ignored and the result lives at the inner base point.
pub fn compose(outer: &JetSeries, inner: &JetSeries) -> Result<JetSeries, JetError> {
    if inner.coeffs[0].norm_sqr() != 0.0 {
        return Err(JetError::InsufficientOrder { needed: 1, have: 0 });
    }
    let k = outer.order().min(inner.order());
    // Horner on truncated series.
    let mut acc = JetSeries::constant(inner.base_point, outer.coeffs[outer.order().min(k)], k);
    let inner_k = inner.truncated(k);
    for i in (0..outer.order().min(k)).rev() {
        acc = acc.mul(&inner_k)?;
        acc.coeffs[0] += outer.coeffs[i];
    }
    Ok(acc)
}
