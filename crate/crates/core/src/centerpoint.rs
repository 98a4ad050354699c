//! Approximate centerpoints by iterated Radon-point replacement.
//!
//! The raw algorithm keeps a working multiset `Q`; every iteration draws
//! `d + 2` points of `Q` with replacement, computes their Radon point, and
//! overwrites a uniformly random element of `Q` with it. After enough
//! iterations every element of `Q` is a deep point of the input.
//! [`approx_centerpoint`] first shrinks a large input to a random sample.

use rand::{Rng as _, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{Point, PointSet, RadonSolver};
use crate::rng::{seeded_rng, Rng};

pub const DEFAULT_C_S: f64 = 1.0;
pub const DEFAULT_C_T: f64 = 2.0;

/// Tuning constants for [`approx_centerpoint_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterpointConstants {
    /// Multiplier of the sample size.
    pub c_s: f64,
    /// Multiplier of the iteration count.
    pub c_t: f64,
}

impl Default for CenterpointConstants {
    fn default() -> Self {
        CenterpointConstants { c_s: DEFAULT_C_S, c_t: DEFAULT_C_T }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterpointParams {
    pub eps_b: f64,
    pub eps_a: f64,
    pub eps_w: f64,
    pub phi: f64,
    pub rho: f64,
    pub sample_size: usize,
    pub iteration_budget: u64,
    pub c_s: f64,
    pub c_t: f64,
    pub seed: u64,
}

impl CenterpointParams {
    /// Parameters for a `d`-dimensional input, with `eps_a = eps_b / 2` and
    /// `eps_w = eps_b / 4`.
    pub fn new(d: usize, eps_b: f64, phi: f64, consts: CenterpointConstants, seed: u64) -> Result<Self> {
        check_open("eps_b", eps_b)?;
        check_open("phi", phi)?;
        check_constants(consts)?;
        if d == 0 {
            return Err(domain("dimension must be at least 1"));
        }
        let s = sample_size(d, eps_b, phi, consts.c_s);
        Ok(CenterpointParams {
            eps_b,
            eps_a: eps_b / 2.0,
            eps_w: eps_b / 4.0,
            phi,
            rho: 1.0 / (8.0 * (d * d) as f64),
            sample_size: s,
            iteration_budget: iteration_budget(d, s, phi, consts.c_t),
            c_s: consts.c_s,
            c_t: consts.c_t,
            seed,
        })
    }
}

fn check_open(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0, 1), got {v}")))
    }
}

fn check_constants(c: CenterpointConstants) -> Result<()> {
    if c.c_s > 0.0 && c.c_s.is_finite() && c.c_t > 0.0 && c.c_t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("constants must be positive and finite, got c_s = {}, c_t = {}", c.c_s, c.c_t)))
    }
}

/// `ceil(c_s d^2 eps_b^-2 (d ln d + ln(1/phi)))`.
pub fn sample_size(d: usize, eps_b: f64, phi: f64, c_s: f64) -> usize {
    let d = d as f64;
    let s = c_s * d * d / (eps_b * eps_b) * (d * d.ln() + (1.0 / phi).ln());
    (s.ceil() as usize).max(1)
}

/// `ceil(c_t d s ln s ln(s/phi))` iterations for a working set of size `s`.
pub fn iteration_budget(d: usize, s: usize, phi: f64, c_t: f64) -> u64 {
    let sf = s as f64;
    (c_t * d as f64 * sf * sf.ln() * (sf / phi).ln()).ceil().max(0.0) as u64
}

/// Working-set size `eps_a^-1 d^3 ln d + eps_a^-1 d^2 ln(1/phi)` needed by the
/// raw algorithm's analysis (up to a constant).
pub fn raw_min_size(d: usize, eps_a: f64, phi: f64) -> f64 {
    let d = d as f64;
    (d.powi(3) * d.ln() + d * d * (1.0 / phi).ln()) / eps_a
}

/// `(1 - eps_a)(1 - 2 eps_w) / (d + 2)^2`.
pub fn quality_target(d: usize, eps_a: f64, eps_w: f64) -> Result<f64> {
    if d == 0 {
        return Err(domain("dimension must be at least 1"));
    }
    if !(0.0..1.0).contains(&eps_a) {
        return Err(domain(format!("eps_a must lie in [0, 1), got {eps_a}")));
    }
    if !(0.0..0.25).contains(&eps_w) {
        return Err(domain(format!("eps_w must lie in [0, 1/4), got {eps_w}")));
    }
    Ok((1.0 - eps_a) * (1.0 - 2.0 * eps_w) / ((d + 2) * (d + 2)) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterpointResult {
    pub point: Point,
    pub params: CenterpointParams,
    pub iterations: u64,
    pub quality_target: f64,
}

/// Runs the Radon replacement process directly on `q`.
pub fn approx_centerpoint_raw(q: &PointSet, eps_a: f64, eps_w: f64, phi: f64, seed: u64) -> Result<CenterpointResult> {
    approx_centerpoint_raw_with(q, eps_a, eps_w, phi, DEFAULT_C_T, seed)
}

pub fn approx_centerpoint_raw_with(
    q: &PointSet,
    eps_a: f64,
    eps_w: f64,
    phi: f64,
    c_t: f64,
    seed: u64,
) -> Result<CenterpointResult> {
    check_open("eps_a", eps_a)?;
    if !(eps_w > 0.0 && eps_w < 0.25) {
        return Err(domain(format!("eps_w must lie in (0, 1/4), got {eps_w}")));
    }
    check_open("phi", phi)?;
    check_constants(CenterpointConstants { c_s: DEFAULT_C_S, c_t })?;
    let d = q.dim();
    let n = q.len();
    let needed = raw_min_size(d, eps_a, phi);
    if (n as f64) < needed {
        log::debug!("working set of {n} points is below the analysed size {needed:.0}");
    }
    let budget = iteration_budget(d, n, phi, c_t);
    let mut rng = seeded_rng(seed);
    let point = radon_process(q, budget, &mut rng)?;
    Ok(CenterpointResult {
        point,
        params: CenterpointParams {
            eps_b: 2.0 * eps_a,
            eps_a,
            eps_w,
            phi,
            rho: 1.0 / (8.0 * (d * d) as f64),
            sample_size: n,
            iteration_budget: budget,
            c_s: DEFAULT_C_S,
            c_t,
            seed,
        },
        iterations: budget,
        quality_target: quality_target(d, eps_a, eps_w)?,
    })
}

fn radon_process(q: &PointSet, iterations: u64, rng: &mut Rng) -> Result<Point> {
    let d = q.dim();
    let n = q.len();
    let mut work = q.flat().to_vec();
    let mut solver = RadonSolver::new(d);
    let mut picked = vec![0.0; d * (d + 2)];
    let mut out = vec![0.0; d];
    for _ in 0..iterations {
        let mut attempt = 0;
        loop {
            for j in 0..d + 2 {
                let i = rng.random_range(0..n);
                picked[j * d..(j + 1) * d].copy_from_slice(&work[i * d..(i + 1) * d]);
            }
            match solver.solve_flat(&picked, &mut out) {
                Ok(()) => break,
                Err(e) if attempt == 0 => {
                    log::debug!("Radon solve failed ({e}); redrawing");
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
        let victim = rng.random_range(0..n);
        work[victim * d..(victim + 1) * d].copy_from_slice(&out);
    }
    let k = rng.random_range(0..n);
    Point::new(work[k * d..(k + 1) * d].to_vec())
}

/// Approximate `(1 - eps_b)/(d + 2)^2`-centerpoint of `p`, correct with
/// probability at least `1 - phi`.
pub fn approx_centerpoint(p: &PointSet, eps_b: f64, phi: f64, seed: u64) -> Result<CenterpointResult> {
    approx_centerpoint_with(p, eps_b, phi, CenterpointConstants::default(), seed)
}

pub fn approx_centerpoint_with(
    p: &PointSet,
    eps_b: f64,
    phi: f64,
    consts: CenterpointConstants,
    seed: u64,
) -> Result<CenterpointResult> {
    let params = CenterpointParams::new(p.dim(), eps_b, phi, consts, seed)?;
    let mut rng = seeded_rng(seed);
    let sample;
    let work = if p.len() <= params.sample_size {
        p
    } else {
        sample = sample_with_replacement(p, params.sample_size, &mut rng);
        &sample
    };
    let raw = approx_centerpoint_raw_with(work, params.eps_a, params.eps_w, params.phi, consts.c_t, rng.next_u64())?;
    Ok(CenterpointResult {
        point: raw.point,
        iterations: raw.iterations,
        params: CenterpointParams { iteration_budget: raw.params.iteration_budget, ..params },
        quality_target: (1.0 - eps_b) / ((p.dim() + 2) * (p.dim() + 2)) as f64,
    })
}

/// `size` independent uniform draws from `p`.
pub fn sample_with_replacement(p: &PointSet, size: usize, rng: &mut Rng) -> PointSet {
    let d = p.dim();
    let mut flat = Vec::with_capacity(size * d);
    for _ in 0..size {
        flat.extend_from_slice(p.get(rng.random_range(0..p.len())));
    }
    PointSet::from_flat(d, flat).unwrap_or_else(|_| unreachable!("copied from a valid set"))
}
