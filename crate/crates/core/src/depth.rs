//! Tukey (halfspace) depth.
//!
//! The depth of `q` with respect to `P` is the minimum number of points of `P`
//! in a closed halfspace containing `q`; `q` is an α-centerpoint iff its depth
//! is at least `α·|P|`.
//!
//! Exact depth is available for `d <= 3`. In every dimension the minimum is
//! attained by a halfspace whose boundary passes through `q` and contains no
//! point of `P` other than copies of `q`, so the exact routines enumerate the
//! cells of the arrangement of hyperplanes through `q` and the data points,
//! with orientation tests evaluated exactly.

use std::cmp::Ordering;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};
use crate::geometry::{dot, orient2d, orient3d, Halfspace, PointSet};
use crate::rng::seeded_rng;

/// Largest `n` accepted by the exact routine in the plane.
pub const EXACT_MAX_N_2D: usize = 1_000_000;
/// Largest `n` accepted by the exact routine in three dimensions (`O(n^3)`).
pub const EXACT_MAX_N_3D: usize = 400;
/// Directions used by [`is_alpha_centerpoint`] when exact depth is unavailable.
pub const DEFAULT_REFUTER_DIRECTIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepthMethod {
    Exact,
    /// Minimum over sampled directions: an upper bound on the true depth.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthResult {
    pub depth: usize,
    /// Closed halfspace containing the query with `depth` points of `P`.
    pub witness: Halfspace,
    pub method: DepthMethod,
}

/// Exact Tukey depth for `d <= 3`.
pub fn tukey_depth_exact(points: &PointSet, q: &[f64]) -> Result<DepthResult> {
    check_dim(points.dim(), q.len())?;
    let n = points.len();
    let (depth, normal) = match points.dim() {
        1 => depth_1d(points, q[0]),
        2 => {
            if n > EXACT_MAX_N_2D {
                return Err(Error::SizeGuard(format!("exact planar depth supports n <= {EXACT_MAX_N_2D}, got {n}")));
            }
            depth_2d(points, q)
        }
        3 => {
            if n > EXACT_MAX_N_3D {
                return Err(Error::SizeGuard(format!("exact 3-d depth supports n <= {EXACT_MAX_N_3D}, got {n}")));
            }
            depth_3d(points, q)
        }
        d => {
            return Err(Error::UnsupportedDimension {
                dim: d,
                reason: "exact depth needs d <= 3; use tukey_depth_sampled",
            })
        }
    };
    Ok(DepthResult { depth, witness: Halfspace::through(normal, q)?, method: DepthMethod::Exact })
}

/// Depth on the line: `min(#{p <= q}, #{p >= q})`.
pub fn depth_1d_value(values: impl Iterator<Item = f64>, q: f64) -> usize {
    let (mut le, mut ge) = (0, 0);
    for v in values {
        if v <= q {
            le += 1;
        }
        if v >= q {
            ge += 1;
        }
    }
    le.min(ge)
}

fn depth_1d(points: &PointSet, q: f64) -> (usize, Vec<f64>) {
    let (mut le, mut ge) = (0, 0);
    for p in points.iter() {
        if p[0] <= q {
            le += 1;
        }
        if p[0] >= q {
            ge += 1;
        }
    }
    if le <= ge {
        (le, vec![-1.0])
    } else {
        (ge, vec![1.0])
    }
}

/// Minimum, over generic lines through `origin`, of the number of points
/// strictly on one side. Points must differ from `origin`.
///
/// Returns the count and a unit normal `u` such that `<u, p - origin> > 0`
/// holds for exactly that many points (in exact arithmetic; the tilt used to
/// move off the critical line is computed in floating point).
fn open_min_2d(origin: [f64; 2], pts: &[[f64; 2]]) -> (usize, [f64; 2]) {
    if pts.is_empty() {
        return (0, [1.0, 0.0]);
    }
    let upper = |p: &[f64; 2]| p[1] > origin[1] || (p[1] == origin[1] && p[0] > origin[0]);
    let orient = |a: &[f64; 2], b: &[f64; 2]| orient2d(&origin, a, b);

    let mut sorted: Vec<[f64; 2]> = pts.to_vec();
    sorted.sort_by(|a, b| match (upper(a), upper(b)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => {
            let o = orient(a, b);
            if o > 0.0 {
                Ordering::Less
            } else if o < 0.0 {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }
    });

    // Groups of identical direction, in counter-clockwise order.
    let mut reps: Vec<[f64; 2]> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for p in &sorted {
        let same = reps.last().is_some_and(|r| upper(r) == upper(p) && orient(r, p) == 0.0);
        if same {
            *counts.last_mut().unwrap() += 1;
        } else {
            reps.push(*p);
            counts.push(1);
        }
    }
    let groups = reps.len();
    let total = sorted.len();
    // prefix[k] = points in groups 0..k of the doubled sequence.
    let mut prefix = vec![0usize; 2 * groups + 1];
    for k in 0..2 * groups {
        prefix[k + 1] = prefix[k] + counts[k % groups];
    }

    let mut best = (usize::MAX, 0usize, 1.0_f64, 1.0_f64);
    for g in 0..groups {
        let rep = &reps[g];
        // Groups g+1..g+left lie strictly counter-clockwise within a half turn.
        let (mut lo, mut hi) = (0usize, groups - 1);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if orient(rep, &reps[(g + mid) % groups]) > 0.0 {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let left = lo;
        let pos = prefix[g + 1 + left] - prefix[g + 1];
        let anti = if left + 1 < groups {
            let k = (g + left + 1) % groups;
            if orient(rep, &reps[k]) == 0.0 {
                counts[k]
            } else {
                0
            }
        } else {
            0
        };
        let same = counts[g];
        let neg = total - pos - same - anti;
        let (side_count, side) = if pos <= neg { (pos, 1.0) } else { (neg, -1.0) };
        let (line_count, tilt) = if same <= anti { (same, 1.0) } else { (anti, -1.0) };
        if side_count + line_count < best.0 {
            best = (side_count + line_count, g, side, tilt);
        }
    }

    let (count, g, side, tilt) = best;
    let rep = reps[g];
    let dx = rep[0] - origin[0];
    let dy = rep[1] - origin[1];
    let len = dx.hypot(dy);
    let w = [dx / len, dy / len];
    let nrm = [-w[1], w[0]];
    let mut delta = 1.0_f64;
    for p in pts {
        if orient(&rep, p) != 0.0 {
            let v = [p[0] - origin[0], p[1] - origin[1]];
            let along = (w[0] * v[0] + w[1] * v[1]).abs();
            let across = (nrm[0] * v[0] + nrm[1] * v[1]).abs();
            if along > 0.0 {
                delta = delta.min(0.5 * across / along);
            }
        }
    }
    let u = [side * nrm[0] + tilt * delta * w[0], side * nrm[1] + tilt * delta * w[1]];
    (count, u)
}

fn depth_2d(points: &PointSet, q: &[f64]) -> (usize, Vec<f64>) {
    let origin = [q[0], q[1]];
    let mut coincident = 0;
    let mut others = Vec::with_capacity(points.len());
    for p in points.iter() {
        if p[0] == q[0] && p[1] == q[1] {
            coincident += 1;
        } else {
            others.push([p[0], p[1]]);
        }
    }
    let (count, u) = open_min_2d(origin, &others);
    (coincident + count, u.to_vec())
}

/// Exact planar depth value without a witness.
pub fn depth_2d_value(points: &PointSet, q: &[f64]) -> usize {
    depth_2d(points, q).0
}

fn sub3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm3(a: &[f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn depth_3d(points: &PointSet, q: &[f64]) -> (usize, Vec<f64>) {
    let mut coincident = 0;
    let mut others: Vec<&[f64]> = Vec::with_capacity(points.len());
    for p in points.iter() {
        if p == q {
            coincident += 1;
        } else {
            others.push(p);
        }
    }
    let m = others.len();
    let vecs: Vec<[f64; 3]> = others.iter().map(|p| sub3(p, q)).collect();

    // Best cell found so far: (count, pair, side).
    let mut best: Option<(usize, usize, usize, f64)> = None;
    let mut sides = vec![0i8; m];
    for i in 0..m {
        for j in i + 1..m {
            let nrm = cross3(&vecs[i], &vecs[j]);
            if norm3(&nrm) <= 1e-14 * norm3(&vecs[i]) * norm3(&vecs[j]) {
                continue;
            }
            let (mut pos, mut neg, mut on) = (0usize, 0usize, 0usize);
            for k in 0..m {
                let o = orient3d(q, others[i], others[j], others[k]);
                sides[k] = if o > 0.0 {
                    pos += 1;
                    1
                } else if o < 0.0 {
                    neg += 1;
                    -1
                } else {
                    on += 1;
                    0
                };
            }
            let side_min = pos.min(neg);
            if best.is_some_and(|b| side_min >= b.0) {
                continue;
            }
            let in_plane = if on == 2 { 0 } else { plane_open_min(&vecs, &sides, i, &nrm).0 };
            let total = side_min + in_plane;
            if best.is_none_or(|b| total < b.0) {
                // `orient3d > 0` means `<nrm, v> < 0`.
                let side = if pos <= neg { -1.0 } else { 1.0 };
                best = Some((total, i, j, side));
            }
        }
    }

    let Some((count, i, j, side)) = best else {
        // All other points are on one line through q (or there are none).
        let Some(first) = vecs.first() else {
            return (coincident, vec![1.0, 0.0, 0.0]);
        };
        let fwd = vecs.iter().filter(|v| dot(*v, first) > 0.0).count();
        let back = m - fwd;
        let mut u = first.to_vec();
        if back < fwd {
            u.iter_mut().for_each(|c| *c = -*c);
        }
        return (coincident + fwd.min(back), u);
    };

    // Rebuild the witness: tilt the plane normal towards the best in-plane direction.
    let nrm = cross3(&vecs[i], &vecs[j]);
    let nl = norm3(&nrm);
    let nhat = [nrm[0] / nl, nrm[1] / nl, nrm[2] / nl];
    for k in 0..m {
        let o = orient3d(q, others[i], others[j], others[k]);
        sides[k] = if o > 0.0 {
            1
        } else if o < 0.0 {
            -1
        } else {
            0
        };
    }
    let (_, w) = plane_open_min(&vecs, &sides, i, &nrm);
    let mut delta = 1.0_f64;
    for (k, v) in vecs.iter().enumerate() {
        if sides[k] != 0 {
            let along = dot(&w, v).abs();
            if along > 0.0 {
                delta = delta.min(0.5 * dot(&nhat, v).abs() / along);
            }
        }
    }
    let u = (0..3).map(|c| side * nhat[c] + delta * w[c]).collect();
    (coincident + count, u)
}

/// Solves the in-plane subproblem for the plane through `q` with normal `nrm`:
/// projects the on-plane vectors to 2-d and returns the open minimum together
/// with the corresponding in-plane unit direction in 3-d.
fn plane_open_min(vecs: &[[f64; 3]], sides: &[i8], anchor: usize, nrm: &[f64; 3]) -> (usize, [f64; 3]) {
    let a = &vecs[anchor];
    let al = norm3(a);
    let e1 = [a[0] / al, a[1] / al, a[2] / al];
    let e2raw = cross3(nrm, &e1);
    let e2l = norm3(&e2raw);
    let e2 = [e2raw[0] / e2l, e2raw[1] / e2l, e2raw[2] / e2l];
    let proj: Vec<[f64; 2]> =
        vecs.iter().zip(sides).filter(|(_, &s)| s == 0).map(|(v, _)| [dot(v, &e1), dot(v, &e2)]).collect();
    let (count, u) = open_min_2d([0.0, 0.0], &proj);
    let w = [u[0] * e1[0] + u[1] * e2[0], u[0] * e1[1] + u[1] * e2[1], u[0] * e1[2] + u[1] * e2[2]];
    (count, w)
}

fn random_direction(rng: &mut crate::rng::Rng, dim: usize) -> Vec<f64> {
    if dim == 1 {
        return vec![if rng.random::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = dot(&v, &v).sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Minimum closed-halfspace count over `directions` random unit normals
/// through `q`. Never below the exact depth.
pub fn tukey_depth_sampled(points: &PointSet, q: &[f64], directions: usize, seed: u64) -> Result<DepthResult> {
    check_dim(points.dim(), q.len())?;
    if directions == 0 {
        return Err(domain("tukey_depth_sampled needs at least one direction"));
    }
    let mut rng = seeded_rng(seed);
    let mut best: Option<(usize, Vec<f64>)> = None;
    for _ in 0..directions {
        let u = random_direction(&mut rng, points.dim());
        let off = dot(&u, q);
        let count = points.iter().filter(|p| dot(&u, p) >= off).count();
        if best.as_ref().is_none_or(|b| count < b.0) {
            best = Some((count, u));
        }
    }
    let (depth, normal) = best.expect("directions >= 1");
    Ok(DepthResult { depth, witness: Halfspace::through(normal, q)?, method: DepthMethod::Sampled })
}

/// Searches `directions` random closed halfspaces through `q` for one holding
/// fewer than `threshold` points. Stops scanning a direction as soon as it
/// reaches the threshold, so deep points are cheap to check.
pub fn sampled_refuter(
    points: &PointSet,
    q: &[f64],
    threshold: usize,
    directions: usize,
    seed: u64,
) -> Result<Option<Halfspace>> {
    check_dim(points.dim(), q.len())?;
    let mut rng = seeded_rng(seed);
    for _ in 0..directions {
        let u = random_direction(&mut rng, points.dim());
        let off = dot(&u, q);
        let mut count = 0;
        for p in points.iter() {
            if dot(&u, p) >= off {
                count += 1;
                if count >= threshold {
                    break;
                }
            }
        }
        if count < threshold {
            return Ok(Some(Halfspace::through(u, q)?));
        }
    }
    Ok(None)
}

/// Whether `q` is an α-centerpoint of `points`.
///
/// Uses exact depth for `d <= 3`. Above that, `q` is accepted unless one of
/// [`DEFAULT_REFUTER_DIRECTIONS`] random directions exhibits a violating
/// halfspace, so a `true` answer is only probabilistic there.
pub fn is_alpha_centerpoint(points: &PointSet, q: &[f64], alpha: f64) -> Result<bool> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    check_dim(points.dim(), q.len())?;
    let needed = alpha * points.len() as f64;
    if points.dim() <= 3 {
        let d = tukey_depth_exact(points, q)?.depth;
        Ok(d as f64 + 1e-9 >= needed)
    } else {
        let threshold = (needed - 1e-9).ceil().max(0.0) as usize;
        Ok(sampled_refuter(points, q, threshold, DEFAULT_REFUTER_DIRECTIONS, 0)?.is_none())
    }
}
