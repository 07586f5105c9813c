//! Zero location inside disks.
//!
//! Polynomial pullbacks go through exact coefficient extraction, square-free
//! decomposition and companion-matrix roots. Transcendental pullbacks are
//! scanned by recursive rectangle subdivision on the argument principle
//! (adaptive phase tracking gives exact integer winding numbers), followed
//! by Newton refinement with the winding count as the multiplicity.

use crate::curve::CurveExpr;
use crate::jetcore::{Cx, Real};
use crate::poly;
use crate::radial::RadialError;

/// Merging radius: locations closer than this are one zero.
pub const MERGE_RADIUS: Real = 1e-8;

/// Largest scan disk.
pub const R_MAX_CAP: Real = 50.0;

/// Largest number of zeros a scan will record.
pub const ZERO_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRecord {
    pub location: Cx,
    pub order: u32,
}

/// Zeros of a pullback inside the disk of radius `r_max`, with the zero at
/// the origin (if any) split out for the counting convention.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    pub records: Vec<ZeroRecord>,
    pub r_max: Real,
    pub origin_order: u32,
}

impl ZeroSet {
    /// Total multiplicity inside radius r (origin included).
    pub fn count_inside(&self, r: Real) -> u64 {
        self.origin_order as u64
            + self
                .records
                .iter()
                .filter(|z| z.location.norm() <= r)
                .map(|z| z.order as u64)
                .sum::<u64>()
    }
}

/// All zeros of `psi` in the closed disk of radius `r_max`.
pub fn zero_set_of_expr(psi: &CurveExpr, r_max: Real) -> Result<ZeroSet, RadialError> {
    if r_max.is_nan() || r_max <= 0.0 {
        return Err(RadialError::ParameterViolation("r_max must be positive".into()));
    }
    if r_max > R_MAX_CAP {
        return Err(RadialError::ScanCapExceeded(format!(
            "scan radius {r_max} exceeds the cap {R_MAX_CAP}"
        )));
    }
    let raw = if psi.is_polynomial() {
        polynomial_zeros(psi)?
    } else {
        transcendental_zeros(psi, r_max)?
    };
    // Boundary guard, then classify and merge.
    let mut origin_order = 0u32;
    let mut kept: Vec<ZeroRecord> = Vec::new();
    for rec in raw {
        let d = rec.location.norm();
        if (d - r_max).abs() <= MERGE_RADIUS {
            return Err(RadialError::BoundaryZero(rec.location));
        }
        if d > r_max {
            continue;
        }
        if d <= MERGE_RADIUS {
            origin_order += rec.order;
            continue;
        }
        kept.push(rec);
    }
    // merge within the merging radius
    let mut merged: Vec<ZeroRecord> = Vec::new();
    kept.sort_by(|a, b| {
        (a.location.norm(), a.location.re, a.location.im)
            .partial_cmp(&(b.location.norm(), b.location.re, b.location.im))
            .unwrap()
    });
    for rec in kept {
        if let Some(last) = merged
            .iter_mut()
            .find(|m| (m.location - rec.location).norm() <= MERGE_RADIUS)
        {
            last.order += rec.order;
        } else {
            merged.push(rec);
        }
    }
    if merged.len() > ZERO_CAP {
        return Err(RadialError::ScanCapExceeded(format!("{} zeros found", merged.len())));
    }
    Ok(ZeroSet { records: merged, r_max, origin_order })
}

fn polynomial_zeros(psi: &CurveExpr) -> Result<Vec<ZeroRecord>, RadialError> {
    let coeffs = psi
        .poly_coeffs()
        .ok_or_else(|| RadialError::ParameterViolation("expected a polynomial".into()))?;
    let coeffs = poly::trim(&coeffs, poly::COEFF_TRIM_REL);
    if coeffs.is_empty() {
        return Err(RadialError::IdenticallyZeroInput);
    }
    if coeffs.len() == 1 {
        return Ok(vec![]);
    }
    let nu0 = coeffs.iter().position(|c| {
        c.norm() > poly::COEFF_TRIM_REL * coeffs.iter().map(|x| x.norm()).fold(0.0, Real::max)
    })
    .unwrap_or(0);
    let mut out = Vec::new();
    if nu0 > 0 {
        out.push(ZeroRecord { location: Cx::new(0.0, 0.0), order: nu0 as u32 });
    }
    let deflated = &coeffs[nu0..];
    if deflated.len() == 1 {
        return Ok(out);
    }
    let mut candidates: Vec<Cx> = Vec::new();
    for (factor, _mult) in poly::square_free_decomposition(deflated, poly::COEFF_TRIM_REL) {
        candidates.extend(poly::roots(&factor));
    }
    candidates.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    // A multiplicity-m root splinters into an eps^(1/m)-radius
    // constellation of candidates, so dedup by distance alone cannot
    // assign multiplicities. Cluster, then let the argument principle
    // count: circle winding around a cluster is exact, and the degree
    // accounting tells us when the clustering scale was too fine.
    let deflated_degree = (deflated.len() - 1) as u64;
    for cluster_rel in [1e-6, 1e-5, 1e-4, 1e-3] {
        if let Some(found) =
            resolve_clusters(psi, &candidates, cluster_rel, nu0, deflated_degree)?
        {
            out.extend(found);
            return Ok(out);
        }
    }
    Err(RadialError::NoConvergence { nodes: 0 })
}

/// Group root candidates at the given relative radius, count each group by
/// a small circle winding, and polish. Returns `None` when the total does
/// not reproduce the deflated degree (clustering scale too fine for the
/// splinter width).
fn resolve_clusters(
    psi: &CurveExpr,
    candidates: &[Cx],
    cluster_rel: Real,
    nu0: usize,
    deflated_degree: u64,
) -> Result<Option<Vec<ZeroRecord>>, RadialError> {
    let mut clusters: Vec<Vec<Cx>> = Vec::new();
    for &z in candidates {
        match clusters
            .iter_mut()
            .find(|cl| cl.iter().any(|m| (*m - z).norm() <= cluster_rel * (1.0 + z.norm())))
        {
            Some(cl) => cl.push(z),
            None => clusters.push(vec![z]),
        }
    }
    let centers: Vec<Cx> =
        clusters.iter().map(|cl| cl.iter().sum::<Cx>() / cl.len() as Real).collect();
    let mut found: Vec<ZeroRecord> = Vec::new();
    for (idx, cluster) in clusters.iter().enumerate() {
        let center = centers[idx];
        // candidates that reconstruct the already-deflated origin
        if nu0 > 0 && center.norm() <= MERGE_RADIUS {
            continue;
        }
        let spread = cluster.iter().map(|z| (z - center).norm()).fold(0.0, Real::max);
        let nn = centers
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != idx)
            .map(|(_, c)| (c - center).norm())
            .fold(Real::INFINITY, Real::min)
            .min(if nu0 > 0 { center.norm() } else { Real::INFINITY });
        let mut radius = (10.0 * spread)
            .max(1e-7 * (1.0 + center.norm()))
            .min(0.3 * nn)
            .max(1e-9);
        if radius < spread {
            return Ok(None); // crowded: retry at a coarser clustering scale
        }
        let mut mult = None;
        for _ in 0..5 {
            match winding_circle_raw(psi, center, radius) {
                Ok(w) => {
                    mult = Some(w);
                    break;
                }
                Err(ContourTrouble) => radius *= 1.171,
            }
        }
        match mult {
            Some(w) if w > 0 => {
                // sharpen the location with the known multiplicity
                let mut z = center;
                for _ in 0..50 {
                    let jet = psi.jet(z, 1).map_err(RadialError::from)?;
                    let (v, d) = (jet.coeff(0), jet.coeff(1));
                    if v.norm() == 0.0 || d.norm() == 0.0 {
                        break;
                    }
                    let step = v / d * w as Real;
                    z -= step;
                    if step.norm() <= 1e-14 * (1.0 + z.norm()) {
                        break;
                    }
                }
                found.push(ZeroRecord { location: z, order: w as u32 });
            }
            Some(_) => {} // winding 0: spurious constellation
            None => return Ok(None),
        }
    }
    let total: u64 = found.iter().map(|r| r.order as u64).sum();
    if total == deflated_degree {
        Ok(Some(found))
    } else {
        Ok(None)
    }
}

/// A zero sits on (or hugs) a contour; the caller must reshape it.
#[derive(Debug)]
struct ContourTrouble;

const SAFE_ARG_STEP: Real = 1.0; // radians, strictly below pi/2

/// One piece of a closed contour, parameterized over u in [0, 1].
#[derive(Debug, Clone, Copy)]
enum Seg {
    Line(Cx, Cx),
    Arc { center: Cx, radius: Real, t0: Real, t1: Real },
}

impl Seg {
    fn at(&self, u: Real) -> Cx {
        match *self {
            Seg::Line(a, b) => a + (b - a) * u,
            Seg::Arc { center, radius, t0, t1 } => {
                center + Cx::from_polar(radius, t0 + (t1 - t0) * u)
            }
        }
    }

    /// |d path / du|, constant for both segment kinds.
    fn speed(&self) -> Real {
        match *self {
            Seg::Line(a, b) => (b - a).norm(),
            Seg::Arc { radius, t0, t1, .. } => radius * (t1 - t0).abs(),
        }
    }
}

/// Value and phase velocity |psi'/psi| at a contour point.
fn sample(psi: &CurveExpr, z: Cx) -> Result<(Cx, Real), ContourTrouble> {
    let jet = psi.jet(z, 1).map_err(|_| ContourTrouble)?;
    let v = jet.coeff(0);
    if v.norm() < 1e-280 || !v.is_finite() {
        return Err(ContourTrouble);
    }
    let d = jet.coeff(1);
    if !d.is_finite() {
        return Err(ContourTrouble);
    }
    Ok((v, (d / v).norm()))
}

/// Phase variation along one segment piece. A span is accepted only when
/// the phase-velocity bound |psi'/psi| * |path'| * du stays below the safe
/// step: endpoint phases alone alias when the true variation is 2 pi k + x,
/// and this can survive one midpoint check, so velocity does the gating.
#[allow(clippy::too_many_arguments)]
fn seg_variation(
    psi: &CurveExpr,
    seg: &Seg,
    u0: Real,
    u1: Real,
    v0: (Cx, Real),
    v1: (Cx, Real),
    depth: u32,
) -> Result<Real, ContourTrouble> {
    let um = 0.5 * (u0 + u1);
    let vm = sample(psi, seg.at(um))?;
    let du = u1 - u0;
    let vel_bound = v0.1.max(vm.1).max(v1.1) * seg.speed() * du;
    let d1 = (vm.0 / v0.0).arg();
    let d2 = (v1.0 / vm.0).arg();
    if vel_bound <= SAFE_ARG_STEP && d1.abs() <= SAFE_ARG_STEP && d2.abs() <= SAFE_ARG_STEP {
        return Ok(d1 + d2);
    }
    if depth == 0 {
        return Err(ContourTrouble);
    }
    Ok(seg_variation(psi, seg, u0, um, v0, vm, depth - 1)?
        + seg_variation(psi, seg, um, u1, vm, v1, depth - 1)?)
}

fn winding_contour(psi: &CurveExpr, segs: &[Seg]) -> Result<i64, ContourTrouble> {
    let mut total = 0.0;
    for seg in segs {
        let v0 = sample(psi, seg.at(0.0))?;
        let v1 = sample(psi, seg.at(1.0))?;
        total += seg_variation(psi, seg, 0.0, 1.0, v0, v1, 60)?;
    }
    let w = total / (2.0 * std::f64::consts::PI);
    let rounded = w.round();
    if (w - rounded).abs() > 0.25 {
        return Err(ContourTrouble);
    }
    Ok(rounded as i64)
}

fn winding_rect(psi: &CurveExpr, rect: &Rect) -> Result<i64, ContourTrouble> {
    let c = rect.corners();
    let segs = [
        Seg::Line(c[0], c[1]),
        Seg::Line(c[1], c[2]),
        Seg::Line(c[2], c[3]),
        Seg::Line(c[3], c[0]),
    ];
    winding_contour(psi, &segs)
}

fn winding_circle_raw(psi: &CurveExpr, center: Cx, radius: Real) -> Result<i64, ContourTrouble> {
    let n = 8;
    let segs: Vec<Seg> = (0..n)
        .map(|i| Seg::Arc {
            center,
            radius,
            t0: 2.0 * std::f64::consts::PI * i as Real / n as Real,
            t1: 2.0 * std::f64::consts::PI * (i + 1) as Real / n as Real,
        })
        .collect();
    winding_contour(psi, &segs)
}

/// Exact count (with multiplicity) of zeros inside |z| = r via adaptive
/// phase tracking along the circle.
pub fn winding_number_circle(psi: &CurveExpr, r: Real) -> Result<i64, RadialError> {
    winding_circle_raw(psi, Cx::new(0.0, 0.0), r)
        .map_err(|_| RadialError::BoundaryZero(Cx::new(r, 0.0)))
}

struct Rect {
    x0: Real,
    y0: Real,
    x1: Real,
    y1: Real,
}

impl Rect {
    fn corners(&self) -> [Cx; 4] {
        [
            Cx::new(self.x0, self.y0),
            Cx::new(self.x1, self.y0),
            Cx::new(self.x1, self.y1),
            Cx::new(self.x0, self.y1),
        ]
    }

    fn center(&self) -> Cx {
        Cx::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn side(&self) -> Real {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    fn contains(&self, z: Cx, slack: Real) -> bool {
        z.re >= self.x0 - slack
            && z.re <= self.x1 + slack
            && z.im >= self.y0 - slack
            && z.im <= self.y1 + slack
    }
}

const SPLIT_FRACTIONS: [Real; 4] = [0.5, 0.53, 0.462, 0.507];

fn transcendental_zeros(psi: &CurveExpr, r_max: Real) -> Result<Vec<ZeroRecord>, RadialError> {
    // cover the disk with margin so boundary-annulus zeros are seen
    for expand in 0..4 {
        let half = r_max + 0.5 + 0.13 * expand as Real;
        let rect = Rect { x0: -half, y0: -half, x1: half, y1: half };
        let mut out = Vec::new();
        match scan_rect(psi, &rect, &mut out, 0) {
            Ok(()) => return Ok(out),
            Err(ScanTrouble::Contour) => continue, // zero on the outer frame
            Err(ScanTrouble::Radial(e)) => return Err(e),
        }
    }
    Err(RadialError::NoConvergence { nodes: 0 })
}

enum ScanTrouble {
    Contour,
    Radial(RadialError),
}

impl From<RadialError> for ScanTrouble {
    fn from(e: RadialError) -> Self {
        ScanTrouble::Radial(e)
    }
}

fn scan_rect(
    psi: &CurveExpr,
    rect: &Rect,
    out: &mut Vec<ZeroRecord>,
    depth: u32,
) -> Result<(), ScanTrouble> {
    let w = winding_rect(psi, rect).map_err(|_| ScanTrouble::Contour)?;
    if w == 0 {
        return Ok(());
    }
    if w < 0 {
        // an entire function has no poles; a negative count means the
        // tracking lost a zero on the contour
        return Err(ScanTrouble::Contour);
    }
    if out.len() + w as usize > ZERO_CAP {
        return Err(RadialError::ScanCapExceeded(format!("more than {ZERO_CAP} zeros")).into());
    }
    let center = rect.center();
    if rect.side() <= 0.5 || depth > 20 {
        if let Some(z) = newton_resolve(psi, center, w as u32, rect) {
            if verify_multiplicity(psi, z, w) {
                out.push(ZeroRecord { location: z, order: w as u32 });
                return Ok(());
            }
        }
    }
    if rect.side() < 1e-9 * (1.0 + center.norm()) {
        // unresolvable cluster at working precision: record as one zero
        out.push(ZeroRecord { location: center, order: w as u32 });
        return Ok(());
    }
    'fractions: for frac in SPLIT_FRACTIONS {
        let xm = rect.x0 + frac * (rect.x1 - rect.x0);
        let ym = rect.y0 + frac * (rect.y1 - rect.y0);
        let children = [
            Rect { x0: rect.x0, y0: rect.y0, x1: xm, y1: ym },
            Rect { x0: xm, y0: rect.y0, x1: rect.x1, y1: ym },
            Rect { x0: rect.x0, y0: ym, x1: xm, y1: rect.y1 },
            Rect { x0: xm, y0: ym, x1: rect.x1, y1: rect.y1 },
        ];
        let mut found = Vec::new();
        for child in &children {
            match scan_rect(psi, child, &mut found, depth + 1) {
                Ok(()) => {}
                Err(ScanTrouble::Contour) => continue 'fractions,
                Err(e @ ScanTrouble::Radial(_)) => return Err(e),
            }
        }
        out.extend(found);
        return Ok(());
    }
    Err(ScanTrouble::Contour)
}

fn newton_resolve(psi: &CurveExpr, start: Cx, multiplicity: u32, rect: &Rect) -> Option<Cx> {
    let mut z = start;
    let m = multiplicity as Real;
    for _ in 0..60 {
        let jet = psi.jet(z, 1).ok()?;
        let v = jet.coeff(0);
        let d = jet.coeff(1);
        if v.norm() == 0.0 {
            return Some(z);
        }
        if d.norm() == 0.0 || !v.is_finite() || !d.is_finite() {
            return None;
        }
        let step = v / d * m;
        z -= step;
        if !rect.contains(z, 2.0 * rect.side()) {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

fn verify_multiplicity(psi: &CurveExpr, z: Cx, w: i64) -> bool {
    let radius = 1e-6 * (1.0 + z.norm());
    matches!(winding_circle_raw(psi, z, radius), Ok(got) if got == w)
}
