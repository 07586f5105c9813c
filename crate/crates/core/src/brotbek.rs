//! Exact integer and rational arithmetic for the high-degree hypersurface
//! parameter chain: the threshold r0, the degree bound, the decomposition
//! d = eps + (r + k) delta, the named inequality chain, and the alpha
//! threshold for the twist ratio. No floating point anywhere in this
//! module; odd c makes c/2 a true rational and every comparison is exact.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

/// Exact integers serialize as strings: JSON numbers stop being exact at
/// 2^53 and these values routinely exceed that.
mod big_string {
    use num::bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BrotbekError {
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("degree {d} is below the decomposition threshold {threshold}")]
    BelowThreshold { d: BigInt, threshold: BigInt },
    #[error("internal bound check failed: {0} (this cannot occur above threshold)")]
    BoundViolation(String),
    #[error("no admissible alpha exists: r is at or below the threshold")]
    PreconditionViolation,
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(big(x))
}

fn rat_of(x: BigInt) -> BigRational {
    BigRational::from_integer(x)
}

/// Exact parameters of the degree arithmetic for dimension n and twist
/// constant c: k = n+1, k' = k(k+1)/2, delta = (k+1)n + k, and the
/// threshold seed r0, computed by two independent closed forms that must
/// agree exactly.
#[derive(Debug, Clone, Serialize)]
pub struct BrotbekParams {
    pub n: u32,
    pub c: u32,
    #[serde(with = "big_string")]
    pub k: BigInt,
    #[serde(with = "big_string")]
    pub k_prime: BigInt,
    #[serde(with = "big_string")]
    pub delta: BigInt,
    #[serde(with = "big_string")]
    pub r0: BigInt,
}

pub fn params(n: u32, c: u32) -> Result<BrotbekParams, BrotbekError> {
    if n < 2 {
        return Err(BrotbekError::ParameterViolation(format!("need n >= 2, got {n}")));
    }
    if c < 3 {
        return Err(BrotbekError::ParameterViolation(format!("need c >= 3, got {c}")));
    }
    let nn = big(n as i64);
    let cc = big(c as i64);
    let k: BigInt = &nn + 1;
    let k_plus: BigInt = &k + 1;
    let k_prime: BigInt = &k * &k_plus / 2;
    let delta: BigInt = &k_plus * &nn + &k;
    // delta = n^2 + 3n + 1, so k' = (delta + 1)/2 exactly
    debug_assert_eq!(delta, &nn * &nn + 3 * &nn + 1);
    let delta_pow: BigInt = delta.pow(n); // delta^{k-1} with k = n+1
    // first form: c delta^{k-1} k' + delta^{k-1} (delta+1)^2
    let delta1: BigInt = &delta + 1;
    let r0_a: BigInt = &cc * &delta_pow * &k_prime + &delta_pow * delta1.pow(2);
    // second form: delta^{k-1} (delta+1) (delta + 1 + c/2)
    let r0_b: BigRational =
        rat_of(&delta_pow * &delta1) * (rat_of(delta1.clone()) + rat_of(cc) / rat(2));
    if rat_of(r0_a.clone()) != r0_b {
        return Err(BrotbekError::BoundViolation(format!(
            "r0 closed forms disagree: {r0_a} vs {r0_b}"
        )));
    }
    Ok(BrotbekParams { n, c, k, k_prime, delta, r0: r0_a })
}

impl BrotbekParams {
    /// delta^{k-1} as a big integer.
    pub fn delta_pow(&self) -> BigInt {
        self.delta.pow(self.n)
    }

    /// The decomposition threshold (r0 + k) delta + 2 delta.
    pub fn threshold(&self) -> BigInt {
        (&self.r0 + &self.k + 2) * &self.delta
    }
}

/// The exact degree bound (n+1)^{n+3} (n+1+c/2)^{n+3}; an integer when c
/// is even.
pub fn degree_bound(n: u32, c: u32) -> Result<BigRational, BrotbekError> {
    if n < 2 {
        return Err(BrotbekError::ParameterViolation(format!("need n >= 2, got {n}")));
    }
    if c == 0 {
        return Err(BrotbekError::ParameterViolation("need c >= 1".into()));
    }
    let e = n + 3;
    let base = rat(n as i64 + 1) + rat(c as i64) / rat(2);
    Ok(rat(n as i64 + 1).pow(e as i32) * base.pow(e as i32))
}

/// Result of writing d = eps + (r + k) delta with k <= eps <= k + delta - 1.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    #[serde(with = "big_string")]
    pub d: BigInt,
    #[serde(with = "big_string")]
    pub epsilon: BigInt,
    #[serde(with = "big_string")]
    pub r: BigInt,
    /// The strict lower bound c delta^{k-1} k' + delta^{k-1} k (eps + k delta)
    /// that r must exceed.
    #[serde(with = "big_string")]
    pub r_lower_bound: BigInt,
}

/// Decompose a degree d above the threshold; the decomposition is unique
/// and its r automatically clears the required lower bound (that is the
/// content of the threshold computation, re-verified here).
pub fn decompose(d: &BigInt, n: u32, c: u32) -> Result<Decomposition, BrotbekError> {
    let p = params(n, c)?;
    let threshold = p.threshold();
    if d < &threshold {
        return Err(BrotbekError::BelowThreshold { d: d.clone(), threshold });
    }
    // unique eps = d (mod delta) in [k, k + delta - 1]
    let rem = (d - &p.k) % &p.delta; // in [0, delta)
    let epsilon = &p.k + rem;
    let r: BigInt = (d - &epsilon) / &p.delta - &p.k;
    let dp = p.delta_pow();
    let r_lower_bound: BigInt =
        big(c as i64) * &dp * &p.k_prime + &dp * &p.k * (&epsilon + &p.k * &p.delta);
    if r <= r_lower_bound {
        return Err(BrotbekError::BoundViolation(format!(
            "r = {r} does not exceed {r_lower_bound}"
        )));
    }
    // the weaker constraint r > delta^{k-1} k (eps + k delta) and eps >= k
    let weak: BigInt = &dp * &p.k * (&epsilon + &p.k * &p.delta);
    if r <= weak || epsilon < p.k {
        return Err(BrotbekError::BoundViolation(format!(
            "decomposition constraints failed: r = {r}, eps = {epsilon}"
        )));
    }
    Ok(Decomposition { d: d.clone(), epsilon, r, r_lower_bound })
}

/// One named exact inequality in the verification chain.
#[derive(Debug, Clone, Serialize)]
pub struct ChainCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub strict: bool,
    pub pass: bool,
}

/// The full verification report for one (n, c).
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub n: u32,
    pub c: u32,
    #[serde(with = "big_string")]
    pub r0: BigInt,
    #[serde(with = "big_string")]
    pub threshold: BigInt,
    pub degree_bound: String,
    pub checks: Vec<ChainCheck>,
    pub all_pass: bool,
}

impl ChainReport {
    pub fn check(&self, name: &str) -> Option<&ChainCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Evaluate the named inequality chain exactly:
/// (a) k(k + delta - 1 + k delta) < (delta+1)^2,
/// (b) (r0+k) delta + 2 delta <= (n^2+3n+2)^{n+2} (n^2+3n+2+c/2),
/// (c) (n+1)(n+1+c/2) > n^2+3n+2+c/2,
/// (d) (r0+k) delta + 2 delta < degree_bound(n, c).
/// Check (c) is reported exactly as stated; it fails at the boundary
/// n = 2, c = 3 (13.5 > 13.5 is false) while the final bound (d) still
/// holds there, and the report surfaces that instead of adjusting it.
pub fn verify_chain(n: u32, c: u32) -> Result<ChainReport, BrotbekError> {
    let p = params(n, c)?;
    let threshold = p.threshold();
    let bound = degree_bound(n, c)?;
    let mut checks = Vec::new();

    // (a)
    let lhs_a: BigInt = &p.k * (&p.k + &p.delta - 1 + &p.k * &p.delta);
    let delta1: BigInt = &p.delta + 1;
    let rhs_a: BigInt = delta1.pow(2);
    checks.push(ChainCheck {
        name: "a".into(),
        lhs: lhs_a.to_string(),
        rhs: rhs_a.to_string(),
        strict: true,
        pass: lhs_a < rhs_a,
    });

    // (b)
    let base: BigInt = big(n as i64) * big(n as i64) + 3 * big(n as i64) + 2;
    let rhs_b: BigRational =
        rat_of(base.pow(n + 2)) * (rat_of(base.clone()) + rat(c as i64) / rat(2));
    let lhs_b = rat_of(threshold.clone());
    checks.push(ChainCheck {
        name: "b".into(),
        lhs: lhs_b.to_string(),
        rhs: rhs_b.to_string(),
        strict: false,
        pass: lhs_b <= rhs_b,
    });

    // (c)
    let lhs_c = rat(n as i64 + 1) * (rat(n as i64 + 1) + rat(c as i64) / rat(2));
    let rhs_c = rat_of(base) + rat(c as i64) / rat(2);
    checks.push(ChainCheck {
        name: "c".into(),
        lhs: lhs_c.to_string(),
        rhs: rhs_c.to_string(),
        strict: true,
        pass: lhs_c > rhs_c,
    });

    // (d)
    let lhs_d = rat_of(threshold.clone());
    checks.push(ChainCheck {
        name: "d".into(),
        lhs: lhs_d.to_string(),
        rhs: bound.to_string(),
        strict: true,
        pass: lhs_d < bound,
    });

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(ChainReport {
        n,
        c,
        r0: p.r0,
        threshold,
        degree_bound: bound.to_string(),
        checks,
        all_pass,
    })
}

/// Complete report for one (n, c): parameters, the inequality chain, and
/// optionally the decomposition and alpha threshold for a concrete degree.
#[derive(Debug, Clone, Serialize)]
pub struct FullReport {
    pub params: BrotbekParams,
    pub chain: ChainReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaThreshold>,
}

impl FullReport {
    pub fn to_json(&self) -> Result<String, String> {
        serde_json::to_string_pretty(self).map_err(|e| e.to_string())
    }
}

pub fn full_report(
    n: u32,
    c: u32,
    d: Option<&BigInt>,
    beta: &BigInt,
    beta_tilde: &BigInt,
) -> Result<FullReport, BrotbekError> {
    let params = params(n, c)?;
    let chain = verify_chain(n, c)?;
    let (decomposition, alpha) = match d {
        Some(d_val) => {
            let dec = decompose(d_val, n, c)?;
            let a = alpha_threshold(n, c, &dec.epsilon, &dec.r, beta, beta_tilde)?;
            (Some(dec), Some(a))
        }
        None => (None, None),
    };
    Ok(FullReport { params, chain, decomposition, alpha })
}

/// Twist counts m(alpha) = beta + alpha delta^{k-1} k' and
/// m~(alpha) = alpha (r - delta^{k-1} k (eps + k delta)) - beta~, with the
/// least alpha making m~ > c m and m~ > 0, and the exact ratio limit
/// m~/m -> (r - delta^{k-1} k (eps + k delta)) / (delta^{k-1} k') > c.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaThreshold {
    #[serde(with = "big_string")]
    pub alpha_min: BigInt,
    #[serde(with = "big_string")]
    pub m_alpha: BigInt,
    #[serde(with = "big_string")]
    pub m_tilde_alpha: BigInt,
    #[serde(serialize_with = "ratio_string")]
    pub ratio_limit: BigRational,
}

fn ratio_string<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Least integer alpha with q * alpha > s (q > 0).
fn least_alpha_strict(s: &BigInt, q: &BigInt) -> BigInt {
    // alpha > s/q  =>  alpha = floor(s/q) + 1
    let fl = s.div_floor(q);
    let candidate: BigInt = &fl + 1;
    if candidate.is_negative() {
        BigInt::zero()
    } else {
        candidate
    }
}

pub fn alpha_threshold(
    n: u32,
    c: u32,
    epsilon: &BigInt,
    r: &BigInt,
    beta: &BigInt,
    beta_tilde: &BigInt,
) -> Result<AlphaThreshold, BrotbekError> {
    if beta.is_negative() || beta_tilde.is_negative() {
        return Err(BrotbekError::ParameterViolation("beta, beta~ must be nonnegative".into()));
    }
    let p = params(n, c)?;
    let dp = p.delta_pow();
    let growth_tilde: BigInt = r - &dp * &p.k * (epsilon + &p.k * &p.delta);
    let growth: BigInt = &dp * &p.k_prime;
    // precondition: r > c delta^{k-1} k' + delta^{k-1} k (eps + k delta),
    // equivalently growth_tilde > c * growth
    let net: BigInt = &growth_tilde - big(c as i64) * &growth;
    if net <= BigInt::zero() {
        return Err(BrotbekError::PreconditionViolation);
    }
    let ratio_limit = rat_of(growth_tilde.clone()) / rat_of(growth.clone());
    // m~(alpha) > c m(alpha): alpha * net > beta~ + c beta
    let s1: BigInt = beta_tilde + big(c as i64) * beta;
    let a1 = least_alpha_strict(&s1, &net);
    // m~(alpha) > 0: alpha * growth_tilde > beta~
    let a2 = least_alpha_strict(beta_tilde, &growth_tilde);
    let alpha_min = a1.max(a2).max(BigInt::zero());
    let m_alpha: BigInt = beta + &alpha_min * &growth;
    let m_tilde_alpha: BigInt = &alpha_min * &growth_tilde - beta_tilde;
    Ok(AlphaThreshold { alpha_min, m_alpha, m_tilde_alpha, ratio_limit })
}

/// Predicate m~(alpha) > c m(alpha) and m~(alpha) > 0 at a given alpha;
/// used to confirm minimality of alpha_min.
pub fn alpha_admissible(
    n: u32,
    c: u32,
    epsilon: &BigInt,
    r: &BigInt,
    beta: &BigInt,
    beta_tilde: &BigInt,
    alpha: &BigInt,
) -> Result<bool, BrotbekError> {
    let p = params(n, c)?;
    let dp = p.delta_pow();
    let growth_tilde: BigInt = r - &dp * &p.k * (epsilon + &p.k * &p.delta);
    let growth: BigInt = &dp * &p.k_prime;
    let m: BigInt = beta + alpha * &growth;
    let mt: BigInt = alpha * &growth_tilde - beta_tilde;
    Ok(mt > big(c as i64) * m && mt > BigInt::zero())
}
