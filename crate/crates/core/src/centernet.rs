//! Weak ε-nets and center nets in the plane.
//!
//! For a finite set `N`, the vertices of the arrangement of lines through
//! pairs of points of `N` (together with `N` itself) contain a
//! `1/3`-centerpoint of every subset of `N`. Applied to a small random sample
//! of `P` this yields a weak ε-net, and the same candidate set is an
//! `(ε, β)`-center net: for every ε-heavy convex body `C` some candidate is a
//! `β`-centerpoint of `P ∩ C`, with `β = 1/(4τ)`.
//!
//! The candidate set has `O(n^4)` points, so construction is limited to
//! `d = 2` and `n <= 64`.

use rand::seq::index::sample as sample_indices;
use rand::Rng as _;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::centerpoint::sample_with_replacement;
use crate::depth::{depth_2d_value, tukey_depth_exact};
use crate::error::{domain, Error, Result};
use crate::geometry::{Point, PointSet};
use crate::rng::{seeded_rng, Rng};

/// Largest sample accepted by [`universal_centerpoints`].
pub const MAX_UNIVERSAL_N: usize = 64;
pub const DEFAULT_C_S: f64 = 1.0;

/// Candidate centerpoints for every subset of `source`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalCenterSet {
    pub source: PointSet,
    pub candidates: PointSet,
    pub d: usize,
    pub n: usize,
}

impl UniversalCenterSet {
    /// Dedup tolerance used for this set.
    pub fn tolerance(&self) -> f64 {
        dedup_tol(&self.source)
    }

    /// Whether `q` coincides with a candidate up to the dedup tolerance.
    pub fn contains_candidate(&self, q: &[f64]) -> bool {
        let tol = 2.0 * self.tolerance();
        self.candidates.iter().any(|c| (c[0] - q[0]).abs() <= tol && (c[1] - q[1]).abs() <= tol)
    }

    /// Index and depth (with respect to `points`) of the deepest candidate.
    /// Ties go to the lowest index.
    pub fn deepest(&self, points: &PointSet) -> Result<(usize, usize)> {
        deepest_candidate(&self.candidates, points)
    }
}

/// `C(C(n, 2), 2) + n`: upper bound on the number of candidates.
pub fn candidate_bound(n: usize) -> u128 {
    let lines = (n as u128) * (n as u128).saturating_sub(1) / 2;
    lines * lines.saturating_sub(1) / 2 + n as u128
}

fn dedup_tol(points: &PointSet) -> f64 {
    1e-9 * points.magnitude().max(1.0)
}

/// Arrangement vertices of the lines through pairs of `n`, plus `n` itself.
pub fn universal_centerpoints(n: &PointSet) -> Result<UniversalCenterSet> {
    if n.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: n.dim(),
            reason: "universal centerpoint sets are built only in the plane",
        });
    }
    if n.len() > MAX_UNIVERSAL_N {
        return Err(Error::SizeGuard(format!(
            "universal centerpoint set supports n <= {MAX_UNIVERSAL_N}, got {}",
            n.len()
        )));
    }
    let scale = n.magnitude().max(1.0);
    let tol = dedup_tol(n);

    let pts: Vec<[f64; 2]> = n.iter().map(|p| [p[0], p[1]]).collect();
    let mut lines: Vec<([f64; 2], [f64; 2])> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i] != pts[j] {
                lines.push((pts[i], [pts[j][0] - pts[i][0], pts[j][1] - pts[i][1]]));
            }
        }
    }

    let mut dedup = Dedup::with_capacity(tol, pts.len() + lines.len() * lines.len().saturating_sub(1) / 2);
    for p in &pts {
        dedup.insert(*p);
    }
    let eps_det = 1e-12 * scale * scale;
    for a in 0..lines.len() {
        let (p, u) = lines[a];
        for &(r, v) in &lines[a + 1..] {
            let det = u[0] * v[1] - u[1] * v[0];
            if det.abs() <= eps_det {
                continue;
            }
            let w = [r[0] - p[0], r[1] - p[1]];
            let t = (w[0] * v[1] - w[1] * v[0]) / det;
            let x = [p[0] + t * u[0], p[1] + t * u[1]];
            if x[0].is_finite() && x[1].is_finite() {
                dedup.insert(x);
            }
        }
    }
    let candidates = PointSet::from_flat(2, dedup.flat)?;
    Ok(UniversalCenterSet { source: n.clone(), candidates, d: 2, n: n.len() })
}

/// Grid-hashed near-duplicate filter that keeps first occurrences in order.
/// Each cell maps to the head of a chain of ids threaded through `next`.
struct Dedup {
    tol: f64,
    cells: FxHashMap<(i64, i64), u32>,
    next: Vec<u32>,
    flat: Vec<f64>,
}

const NIL: u32 = u32::MAX;

impl Dedup {
    fn with_capacity(tol: f64, cap: usize) -> Self {
        let mut cells = FxHashMap::default();
        cells.reserve(cap);
        Dedup { tol, cells, next: Vec::with_capacity(cap), flat: Vec::with_capacity(2 * cap) }
    }

    fn cell(&self, x: [f64; 2]) -> (i64, i64) {
        ((x[0] / self.tol).floor() as i64, (x[1] / self.tol).floor() as i64)
    }

    fn insert(&mut self, x: [f64; 2]) {
        let (cx, cy) = self.cell(x);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let mut id = self.cells.get(&(cx + dx, cy + dy)).copied().unwrap_or(NIL);
                while id != NIL {
                    let i = id as usize;
                    let y = &self.flat[2 * i..2 * i + 2];
                    if (y[0] - x[0]).abs() <= self.tol && (y[1] - x[1]).abs() <= self.tol {
                        return;
                    }
                    id = self.next[i];
                }
            }
        }
        let id = self.next.len() as u32;
        self.flat.extend_from_slice(&x);
        let head = self.cells.insert((cx, cy), id).unwrap_or(NIL);
        self.next.push(head);
    }
}

const PRUNE_DIRECTIONS: usize = 8;

/// Argmax of exact depth over `candidates`. A candidate is evaluated exactly
/// only when an upper bound from a few fixed directions beats the best so far.
fn deepest_candidate(candidates: &PointSet, points: &PointSet) -> Result<(usize, usize)> {
    if candidates.is_empty() {
        return Err(domain("no candidates"));
    }
    let dirs: Vec<[f64; 2]> = (0..PRUNE_DIRECTIONS)
        .map(|k| {
            let a = std::f64::consts::PI * k as f64 / PRUNE_DIRECTIONS as f64;
            [a.cos(), a.sin()]
        })
        .collect();
    let proj: Vec<Vec<f64>> = dirs
        .iter()
        .map(|u| {
            let mut v: Vec<f64> = points.iter().map(|p| u[0] * p[0] + u[1] * p[1]).collect();
            v.sort_by(f64::total_cmp);
            v
        })
        .collect();
    // Covers rounding in the projections, so the bound never undercounts.
    let slack = 1e-12 * points.magnitude().max(candidates.magnitude()).max(1.0);
    let mut best = (0, 0);
    let mut first = true;
    for (i, c) in candidates.iter().enumerate() {
        let mut ub = usize::MAX;
        for (u, v) in dirs.iter().zip(&proj) {
            let x = u[0] * c[0] + u[1] * c[1];
            let below = v.partition_point(|&y| y <= x + slack);
            let above = v.len() - v.partition_point(|&y| y < x - slack);
            ub = ub.min(below.min(above));
        }
        if !first && ub <= best.1 {
            continue;
        }
        let depth = depth_2d_value(points, c);
        if first || depth > best.1 {
            best = (i, depth);
            first = false;
            if depth == points.len() {
                break;
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterNetParams {
    pub eps: f64,
    pub phi: f64,
    /// `⌈1 + 3(d+1) + (d+1) ln(1/ε)⌉`.
    pub tau: u64,
    /// `1 / (4τ)`.
    pub beta: f64,
    pub sample_size: usize,
    pub c_s: f64,
}

impl CenterNetParams {
    pub fn new(d: usize, eps: f64, phi: f64, c_s: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(domain(format!("eps must be positive, got {eps}")));
        }
        if !(phi > 0.0 && phi < 1.0) {
            return Err(domain(format!("phi must lie in (0, 1), got {phi}")));
        }
        if !(c_s > 0.0 && c_s.is_finite()) {
            return Err(domain(format!("c_s must be positive, got {c_s}")));
        }
        let tau = center_net_tau(d, eps);
        Ok(CenterNetParams {
            eps,
            phi,
            tau,
            beta: 1.0 / (4.0 * tau as f64),
            sample_size: weak_net_sample_size(d, eps, phi, c_s),
            c_s,
        })
    }
}

/// `⌈1 + 3(d+1) + (d+1) ln(1/ε)⌉`, with `ln(1/ε)` clamped at zero.
pub fn center_net_tau(d: usize, eps: f64) -> u64 {
    let k = (d + 1) as f64;
    (1.0 + 3.0 * k + k * (1.0 / eps).ln().max(0.0)).ceil() as u64
}

/// `⌈c_s ε⁻¹ (d² ln d ln³(1/ε) + ln(1/φ))⌉`, with `ln(1/ε)` clamped at zero.
pub fn weak_net_sample_size(d: usize, eps: f64, phi: f64, c_s: f64) -> usize {
    let df = d as f64;
    let l = (1.0 / eps).ln().max(0.0);
    let s = c_s * (df * df * df.ln() * l.powi(3) + (1.0 / phi).ln()) / eps;
    (s.ceil() as usize).max(1)
}

/// Smallest `ε` (to three significant digits, rounded up) whose planar sample
/// size fits under [`MAX_UNIVERSAL_N`].
pub fn min_feasible_eps(phi: f64, c_s: f64) -> f64 {
    let (mut lo, mut hi) = (1e-6_f64, 1e6_f64);
    if weak_net_sample_size(2, hi, phi, c_s) > MAX_UNIVERSAL_N {
        return f64::INFINITY;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if weak_net_sample_size(2, mid, phi, c_s) <= MAX_UNIVERSAL_N {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let scale = 10f64.powi(2 - hi.log10().floor() as i32);
    (hi * scale).ceil() / scale
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakNet {
    pub params: CenterNetParams,
    pub universal: UniversalCenterSet,
}

impl WeakNet {
    pub fn points(&self) -> &PointSet {
        &self.universal.candidates
    }

    pub fn sample(&self) -> &PointSet {
        &self.universal.source
    }

    /// Center-net verification of one body against this net's sample.
    pub fn verify(&self, p: &PointSet, members: &PointSet) -> Result<CenterNetOutcome> {
        verify_center_net_from(&self.universal, p, members, self.params.eps)
    }
}

/// Weak ε-net of `p`: the universal candidate set of a random sample.
pub fn build_weak_eps_net(p: &PointSet, eps: f64, phi: f64, seed: u64) -> Result<WeakNet> {
    build_weak_eps_net_with(p, eps, phi, DEFAULT_C_S, seed)
}

pub fn build_weak_eps_net_with(p: &PointSet, eps: f64, phi: f64, c_s: f64, seed: u64) -> Result<WeakNet> {
    if p.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: p.dim(), reason: "weak nets are built only in the plane" });
    }
    let params = CenterNetParams::new(2, eps, phi, c_s)?;
    if params.sample_size > MAX_UNIVERSAL_N {
        return Err(Error::SizeGuard(format!(
            "sample size {} exceeds {MAX_UNIVERSAL_N}; use eps >= {} at phi = {phi}",
            params.sample_size,
            min_feasible_eps(phi, c_s)
        )));
    }
    let mut rng = seeded_rng(seed);
    let sample = sample_with_replacement(p, params.sample_size, &mut rng);
    let universal = universal_centerpoints(&sample)?;
    Ok(WeakNet { params, universal })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterNetOutcome {
    pub point: Point,
    pub iterations: u64,
    /// Exact depth of `point` in the body's members.
    pub depth: usize,
    pub members: usize,
    pub tau: u64,
    pub beta: f64,
}

/// Runs the center-net certification for one body: repeatedly take the
/// deepest candidate of the active sample, accept it when it is a
/// `2β`-centerpoint of the residual members, and otherwise strip the depth
/// witness from both sets.
pub fn verify_center_net(n: &PointSet, p: &PointSet, members: &PointSet, eps: f64) -> Result<CenterNetOutcome> {
    if n.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: n.dim(), reason: "center nets are verified only in the plane" });
    }
    verify_center_net_from(&universal_centerpoints(n)?, p, members, eps)
}

/// [`verify_center_net`] starting from the prebuilt candidate set of `N`.
pub fn verify_center_net_from(
    universal: &UniversalCenterSet,
    p: &PointSet,
    members: &PointSet,
    eps: f64,
) -> Result<CenterNetOutcome> {
    let n = &universal.source;
    for s in [n, p, members] {
        if s.dim() != 2 {
            return Err(Error::UnsupportedDimension {
                dim: s.dim(),
                reason: "center nets are verified only in the plane",
            });
        }
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(domain(format!("eps must be positive, got {eps}")));
    }
    if members.is_empty() || (members.len() as f64) < eps * p.len() as f64 {
        return Err(domain(format!("body holds {} of {} points, below eps = {eps}", members.len(), p.len())));
    }
    let tau = center_net_tau(2, eps);
    let beta = 1.0 / (4.0 * tau as f64);

    let mut active = Some(n.clone());
    let mut residual = members.clone();
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > tau {
            return Err(Error::AssertionFailure(format!("center-net verification exceeded tau = {tau} iterations")));
        }
        let Some(act) = active.as_ref() else {
            return Err(Error::AssertionFailure(format!(
                "active sample exhausted after {} iterations",
                iterations - 1
            )));
        };
        let rebuilt;
        let current = if iterations == 1 {
            universal
        } else {
            rebuilt = universal_centerpoints(act)?;
            &rebuilt
        };
        let (idx, _) = current.deepest(act)?;
        let q = current.candidates.get(idx).to_vec();
        let res = tukey_depth_exact(&residual, &q)?;
        if res.depth as f64 + 1e-9 >= 2.0 * beta * residual.len() as f64 {
            let depth = tukey_depth_exact(members, &q)?.depth;
            return Ok(CenterNetOutcome {
                point: Point::new(q)?,
                iterations,
                depth,
                members: members.len(),
                tau,
                beta,
            });
        }
        let h = res.witness;
        active = act.filter(|x| !h.contains(x));
        residual = residual
            .filter(|x| !h.contains(x))
            .ok_or_else(|| Error::AssertionFailure("residual set exhausted by a light halfspace".into()))?;
    }
}

/// Convex hull of the `k = ⌈ε n⌉` nearest neighbours of a random point of
/// `p`: a polygon holding at least `ε n` points.
pub fn random_heavy_polygon(p: &PointSet, eps: f64, rng: &mut Rng) -> Result<Body> {
    if p.dim() != 2 || p.is_empty() {
        return Err(domain("heavy polygons need a nonempty planar set"));
    }
    let k = ((eps * p.len() as f64).ceil() as usize).clamp(1, p.len());
    let c = p.get(rng.random_range(0..p.len())).to_vec();
    let mut idx: Vec<usize> = (0..p.len()).collect();
    let dist = |i: usize| {
        let x = p.get(i);
        (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)
    };
    idx.select_nth_unstable_by(k - 1, |&a, &b| dist(a).total_cmp(&dist(b)).then(a.cmp(&b)));
    let rows: Vec<Vec<f64>> = idx[..k].iter().map(|&i| p.get(i).to_vec()).collect();
    Body::hull_2d(&PointSet::from_rows(rows)?)
}

/// Convex hull of a uniformly random subset of at least `⌈ε n⌉` points.
pub fn random_subset_polygon(p: &PointSet, eps: f64, rng: &mut Rng) -> Result<Body> {
    if p.dim() != 2 || p.is_empty() {
        return Err(domain("heavy polygons need a nonempty planar set"));
    }
    let k = ((eps * p.len() as f64).ceil() as usize).clamp(1, p.len());
    let rows: Vec<Vec<f64>> = sample_indices(rng, p.len(), k).into_iter().map(|i| p.get(i).to_vec()).collect();
    Body::hull_2d(&PointSet::from_rows(rows)?)
}
