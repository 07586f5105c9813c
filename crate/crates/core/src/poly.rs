//! Dense univariate polynomials over complex floating point.
//!
//! Support code for exact-at-desk-scale root extraction: trimming, Euclidean
//! gcd with a relative threshold, Yun square-free decomposition, and
//! companion-matrix roots.

use crate::jetcore::{Cx, Real};
use nalgebra::DMatrix;

/// Relative threshold below which a coefficient is treated as zero.
pub const COEFF_TRIM_REL: Real = 1e-12;

fn max_norm(p: &[Cx]) -> Real {
    p.iter().map(|c| c.norm()).fold(0.0, Real::max)
}

/// Drop trailing coefficients that are negligible relative to the largest.
pub fn trim(p: &[Cx], rel: Real) -> Vec<Cx> {
    let scale = max_norm(p);
    if scale == 0.0 {
        return vec![];
    }
    let mut deg = None;
    for (i, c) in p.iter().enumerate() {
        if c.norm() > rel * scale {
            deg = Some(i);
        }
    }
    match deg {
        Some(d) => p[..=d].to_vec(),
        None => vec![],
    }
}

/// Degree after trimming; `None` for the zero polynomial.
pub fn degree(p: &[Cx]) -> Option<usize> {
    let t = trim(p, COEFF_TRIM_REL);
    if t.is_empty() {
        None
    } else {
        Some(t.len() - 1)
    }
}

pub fn eval(p: &[Cx], z: Cx) -> Cx {
    let mut acc = Cx::new(0.0, 0.0);
    for c in p.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

pub fn derivative(p: &[Cx]) -> Vec<Cx> {
    if p.len() <= 1 {
        return vec![];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * (i as Real))
        .collect()
}

pub fn mul(a: &[Cx], b: &[Cx]) -> Vec<Cx> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Cx::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Euclidean remainder. Operands are normalized by the caller; `floor` is an
/// absolute magnitude below which a trailing coefficient is roundoff, not
/// signal — trimming against the remainder's own scale would let a
/// pure-noise remainder survive as a spurious nonzero constant.
fn rem(a: &[Cx], b: &[Cx], floor: Real) -> Vec<Cx> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() >= b.len() {
        let dr = r.len() - 1;
        let q = r[dr] / lead;
        let shift = dr - db;
        for i in 0..=db {
            r[shift + i] -= q * b[i];
        }
        r.pop();
        while r.last().is_some_and(|c| c.norm() <= floor) {
            r.pop();
        }
        if r.is_empty() {
            break;
        }
    }
    r
}

fn normalize(p: &[Cx]) -> Vec<Cx> {
    let s = max_norm(p);
    if s == 0.0 {
        return vec![];
    }
    p.iter().map(|c| c / s).collect()
}

/// Monic gcd via the Euclidean algorithm with relative-threshold truncation.
/// Reliable for the small-degree, well-scaled polynomials this crate meets;
/// callers validate downstream (root confirmation via jets, winding totals).
pub fn gcd(a: &[Cx], b: &[Cx], rel: Real) -> Vec<Cx> {
    let mut a = normalize(&trim(a, rel));
    let mut b = normalize(&trim(b, rel));
    if a.is_empty() {
        return make_monic(&b);
    }
    if b.is_empty() {
        return make_monic(&a);
    }
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = rem(&a, &b, rel);
        if r.is_empty() {
            return make_monic(&b);
        }
        a = b;
        b = normalize(&r);
    }
}

fn make_monic(p: &[Cx]) -> Vec<Cx> {
    if p.is_empty() {
        return vec![];
    }
    let lead = p[p.len() - 1];
    p.iter().map(|c| c / lead).collect()
}

/// Exact quotient (ignores the remainder); used after a gcd step where the
/// division is known to be exact up to roundoff.
pub fn div_exact(a: &[Cx], b: &[Cx]) -> Vec<Cx> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    let mut q = vec![Cx::new(0.0, 0.0); a.len().saturating_sub(db)];
    while r.len() >= b.len() {
        let dr = r.len() - 1;
        let qc = r[dr] / lead;
        q[dr - db] = qc;
        for i in 0..=db {
            r[dr - db + i] -= qc * b[i];
        }
        r.pop();
    }
    q
}

/// Yun square-free decomposition: returns `(factor, multiplicity)` pairs with
/// each factor monic and square-free. Falls back to treating the input as
/// square-free when the fp factorization fails to reproduce the input.
pub fn square_free_decomposition(p: &[Cx], rel: Real) -> Vec<(Vec<Cx>, u32)> {
    let p = make_monic(&trim(p, rel));
    if p.len() <= 1 {
        return vec![];
    }
    if p.len() == 2 {
        return vec![(p, 1)];
    }
    let dp = derivative(&p);
    let g = gcd(&p, &dp, rel);
    if g.len() <= 1 {
        return vec![(p, 1)];
    }
    let mut out = Vec::new();
    let mut w = div_exact(&p, &g); // product of distinct factors
    let mut y = div_exact(&dp, &g);
    let mut mult = 1u32;
    // Yun's loop: peel factors of equal multiplicity.
    while w.len() > 1 {
        let wd = derivative(&w);
        let mut z: Vec<Cx> = y
            .iter()
            .enumerate()
            .map(|(i, c)| c - wd.get(i).copied().unwrap_or_else(|| Cx::new(0.0, 0.0)))
            .collect();
        // the floor must come from the operand scale: a difference that is
        // pure gcd roundoff would survive a trim relative to its own max
        let scale = y
            .iter()
            .chain(wd.iter())
            .map(|c| c.norm())
            .fold(0.0, Real::max)
            .max(1e-300);
        while z.last().is_some_and(|c| c.norm() <= rel.max(1e-13) * scale) {
            z.pop();
        }
        let f = if z.is_empty() {
            w.clone()
        } else {
            gcd(&w, &z, rel)
        };
        if f.len() > 1 {
            out.push((make_monic(&f), mult));
            w = div_exact(&w, &f);
            if !z.is_empty() {
                y = div_exact(&z, &f);
            }
        } else {
            if z.is_empty() {
                break;
            }
            y = z;
        }
        mult += 1;
        if mult > 64 {
            break;
        }
    }
    // Validate: the product of factor^mult must reproduce p.
    let mut recon = vec![Cx::new(1.0, 0.0)];
    for (f, m) in &out {
        for _ in 0..*m {
            recon = mul(&recon, f);
        }
    }
    let ok = recon.len() == p.len() && {
        let scale = max_norm(&p).max(1e-300);
        recon
            .iter()
            .zip(&p)
            .all(|(x, y)| (x - y).norm() <= 1e-6 * scale)
    };
    if ok {
        out
    } else {
        vec![(p, 1)]
    }
}

/// Roots of a polynomial via the companion matrix (complex Schur
/// eigenvalues), Newton-polished on the input.
pub fn roots(p: &[Cx]) -> Vec<Cx> {
    let p = make_monic(&trim(p, COEFF_TRIM_REL));
    let n = match p.len() {
        0 | 1 => return vec![],
        2 => return vec![-p[0]],
        n => n - 1,
    };
    let mut m = DMatrix::<Cx>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Cx::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -p[i];
    }
    let eig = m
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect::<Vec<_>>())
        .unwrap_or_default();
    let dp = derivative(&p);
    eig.into_iter()
        .map(|mut z| {
            for _ in 0..8 {
                let fv = eval(&p, z);
                let dv = eval(&dp, z);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = fv / dv;
                z -= step;
                if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                    break;
                }
            }
            z
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(coeffs: &[Real]) -> Vec<Cx> {
        coeffs.iter().map(|&x| Cx::new(x, 0.0)).collect()
    }

    #[test]
    fn roots_of_cubic() {
        // z^3 - 1
        let p = rp(&[-1.0, 0.0, 0.0, 1.0]);
        let mut rs = roots(&p);
        rs.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert_eq!(rs.len(), 3);
        for r in &rs {
            assert!((eval(&p, *r)).norm() < 1e-10);
        }
    }

    #[test]
    fn square_free_of_multiple_roots() {
        // (z-1)^2 (z+2): z^3 - 3z + 2... expand: (z^2-2z+1)(z+2) = z^3 - 3z + 2
        let p = rp(&[2.0, -3.0, 0.0, 1.0]);
        let sf = square_free_decomposition(&p, 1e-12);
        let mut mults: Vec<u32> = sf.iter().map(|(_, m)| *m).collect();
        mults.sort();
        assert_eq!(mults, vec![1, 2]);
    }

    #[test]
    fn gcd_of_coprime_is_constant() {
        let a = rp(&[1.0, 1.0]); // z+1
        let b = rp(&[-1.0, 1.0]); // z-1
        assert_eq!(gcd(&a, &b, 1e-12).len(), 1);
    }

    #[test]
    fn gcd_extracts_common_factor() {
        // (z-2)(z+1) and (z-2)(z-5)
        let a = rp(&[-2.0, -1.0, 1.0]);
        let b = rp(&[10.0, -7.0, 1.0]);
        let g = gcd(&a, &b, 1e-12);
        assert_eq!(g.len(), 2);
        assert!((eval(&g, Cx::new(2.0, 0.0))).norm() < 1e-10);
    }
}
