//! Certified lower bound on `min_{p in P} f(p)` for a convex `f` known only
//! through a subgradient oracle.
//!
//! Each round evaluates `f` at an approximate centerpoint `c` of the surviving
//! points and discards every `x` with `<v, x - c> > 0`, where `v` is the
//! returned subgradient; those points satisfy `f(x) > f(c)`. Rounds that
//! discard too few points are retried with fresh randomness.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::centerpoint::{approx_centerpoint_with, CenterpointConstants};
use crate::error::{domain, Error, Result};
use crate::geometry::{dot, Point, PointSet};
use crate::rng::seeded_rng;

/// Value and subgradient access to a convex function on `R^d`.
pub trait SubgradientOracle {
    fn eval(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)>;
}

impl<F> SubgradientOracle for F
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    fn eval(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundConfig {
    /// Success threshold: a round succeeds when it discards at least
    /// `c_quality / d^2` of the surviving points. Defaults to `d^2 / (4 (d+2)^2)`.
    pub c_quality: Option<f64>,
    /// Residual size at which all survivors are evaluated. Defaults to `max(d + 2, 8)`.
    pub stop_size: Option<usize>,
    pub eps_b: f64,
    pub phi: f64,
    pub constants: CenterpointConstants,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        LowerBoundConfig {
            c_quality: None,
            stop_size: None,
            eps_b: 0.5,
            phi: 0.5,
            constants: CenterpointConstants::default(),
        }
    }
}

impl LowerBoundConfig {
    pub fn c_quality_for(&self, d: usize) -> f64 {
        self.c_quality.unwrap_or_else(|| default_c_quality(d))
    }

    pub fn stop_size_for(&self, d: usize) -> usize {
        self.stop_size.unwrap_or((d + 2).max(8))
    }
}

pub fn default_c_quality(d: usize) -> f64 {
    let d = d as f64;
    d * d / (4.0 * (d + 2.0) * (d + 2.0))
}

/// `ceil(ln(n / stop) / -ln(1 - c / d^2))`: successful rounds needed to bring
/// `n` points down to `stop`.
pub fn success_cap(n: usize, stop: usize, c_quality: f64, d: usize) -> u64 {
    if n <= stop {
        return 0;
    }
    let frac = c_quality / (d * d) as f64;
    ((n as f64 / stop as f64).ln() / -(1.0 - frac).ln()).ceil() as u64
}

/// Hard cap on successful rounds, `ceil(64 d^2 ln n)`; attempts are capped at
/// 16 times this.
pub fn success_budget(n: usize, d: usize) -> u64 {
    ((64 * d * d) as f64 * (n.max(2) as f64).ln()).ceil() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundResult {
    pub point: Point,
    pub value: f64,
    pub evaluated_centers: Vec<(Point, f64)>,
    pub oracle_calls: u64,
    pub successful_iterations: u64,
    pub attempts: u64,
}

pub fn lower_bound_min<O: SubgradientOracle + ?Sized>(
    points: &PointSet,
    oracle: &mut O,
    c_quality: Option<f64>,
    seed: u64,
) -> Result<LowerBoundResult> {
    let cfg = LowerBoundConfig { c_quality, ..LowerBoundConfig::default() };
    lower_bound_min_with(points, oracle, &cfg, seed)
}

pub fn lower_bound_min_with<O: SubgradientOracle + ?Sized>(
    points: &PointSet,
    oracle: &mut O,
    cfg: &LowerBoundConfig,
    seed: u64,
) -> Result<LowerBoundResult> {
    let d = points.dim();
    let c_quality = cfg.c_quality_for(d);
    if !(c_quality > 0.0 && c_quality < (d * d) as f64) {
        return Err(domain(format!("c_quality must lie in (0, d^2), got {c_quality}")));
    }
    let stop = cfg.stop_size_for(d);
    if stop == 0 {
        return Err(domain("stop_size must be positive"));
    }
    let n = points.len();
    let max_success = success_budget(n, d);
    let max_attempts = 16 * max_success;
    let frac = c_quality / (d * d) as f64;

    let mut rng = seeded_rng(seed);
    let mut residual = points.clone();
    let mut res = LowerBoundResult {
        point: points.point(0),
        value: f64::INFINITY,
        evaluated_centers: Vec::new(),
        oracle_calls: 0,
        successful_iterations: 0,
        attempts: 0,
    };
    let mut eval = |x: &[f64], res: &mut LowerBoundResult| -> Result<(f64, Vec<f64>)> {
        let (value, grad) = oracle.eval(x)?;
        res.oracle_calls += 1;
        if !value.is_finite() {
            return Err(Error::OracleFailure(format!("non-finite value {value}")));
        }
        if grad.len() != d || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::OracleFailure(format!("subgradient must have {d} finite entries, got {grad:?}")));
        }
        if value < res.value {
            res.value = value;
            res.point = Point::new(x.to_vec())?;
        }
        Ok((value, grad))
    };

    while residual.len() > stop {
        if res.attempts >= max_attempts || res.successful_iterations >= max_success {
            return Err(Error::NonTermination { partial: Box::new(res) });
        }
        res.attempts += 1;
        let center = approx_centerpoint_with(&residual, cfg.eps_b, cfg.phi, cfg.constants, rng.next_u64())?.point;
        let (value, grad) = eval(center.coords(), &mut res)?;
        res.evaluated_centers.push((center.clone(), value));
        if dot(&grad, &grad).sqrt() <= 1e-12 {
            // c is a global minimiser, so f(c) bounds every f(p) from below.
            return Ok(res);
        }
        let c = center.coords();
        let offset = dot(&grad, c);
        let kept = residual.filter(|x| dot(&grad, x) - offset <= 0.0);
        let kept_len = kept.as_ref().map_or(0, PointSet::len);
        let discarded = residual.len() - kept_len;
        if (discarded as f64) < frac * residual.len() as f64 {
            continue;
        }
        res.successful_iterations += 1;
        match kept {
            Some(k) => residual = k,
            None => return Ok(res),
        }
    }
    for x in residual.iter() {
        eval(x, &mut res)?;
    }
    Ok(res)
}

/// Built-in convex functions used by tests and the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConvexFunction {
    /// `<a, x>`.
    Linear { a: Vec<f64> },
    /// `||x - center||^2`.
    Quadratic { center: Vec<f64> },
    /// `sum_i w_i (x_i - center_i)^2` with `w_i > 0`.
    WeightedQuadratic { center: Vec<f64>, weights: Vec<f64> },
    /// `||x - center||_1`.
    L1 { center: Vec<f64> },
    /// `||x - center||_inf`.
    LInf { center: Vec<f64> },
    /// `max_k <a_k, x> + b_k`.
    MaxAffine { slopes: Vec<Vec<f64>>, intercepts: Vec<f64> },
}

impl ConvexFunction {
    pub fn dim(&self) -> usize {
        match self {
            ConvexFunction::Linear { a } => a.len(),
            ConvexFunction::Quadratic { center }
            | ConvexFunction::WeightedQuadratic { center, .. }
            | ConvexFunction::L1 { center }
            | ConvexFunction::LInf { center } => center.len(),
            ConvexFunction::MaxAffine { slopes, .. } => slopes.first().map_or(0, Vec::len),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(domain("function has dimension 0"));
        }
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        let ok = match self {
            ConvexFunction::Linear { a } => finite(a),
            ConvexFunction::Quadratic { center } | ConvexFunction::L1 { center } | ConvexFunction::LInf { center } => {
                finite(center)
            }
            ConvexFunction::WeightedQuadratic { center, weights } => {
                finite(center) && weights.len() == d && weights.iter().all(|w| *w > 0.0 && w.is_finite())
            }
            ConvexFunction::MaxAffine { slopes, intercepts } => {
                slopes.len() == intercepts.len()
                    && slopes.iter().all(|s| s.len() == d && finite(s))
                    && finite(intercepts)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(domain(format!("malformed function {self:?}")))
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.value_and_subgradient(x).0
    }

    pub fn value_and_subgradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        match self {
            ConvexFunction::Linear { a } => (dot(a, x), a.clone()),
            ConvexFunction::Quadratic { center } => {
                let diff: Vec<f64> = x.iter().zip(center).map(|(x, c)| x - c).collect();
                (dot(&diff, &diff), diff.iter().map(|v| 2.0 * v).collect())
            }
            ConvexFunction::WeightedQuadratic { center, weights } => {
                let mut value = 0.0;
                let mut grad = Vec::with_capacity(x.len());
                for ((x, c), w) in x.iter().zip(center).zip(weights) {
                    value += w * (x - c) * (x - c);
                    grad.push(2.0 * w * (x - c));
                }
                (value, grad)
            }
            ConvexFunction::L1 { center } => {
                let mut value = 0.0;
                let mut grad = Vec::with_capacity(x.len());
                for (x, c) in x.iter().zip(center) {
                    value += (x - c).abs();
                    grad.push(sign(x - c));
                }
                (value, grad)
            }
            ConvexFunction::LInf { center } => {
                let mut best = (0usize, 0.0_f64, 0.0_f64);
                for (i, (x, c)) in x.iter().zip(center).enumerate() {
                    let diff = x - c;
                    if diff.abs() > best.1 {
                        best = (i, diff.abs(), diff);
                    }
                }
                let mut grad = vec![0.0; x.len()];
                grad[best.0] = sign(best.2);
                (best.1, grad)
            }
            ConvexFunction::MaxAffine { slopes, intercepts } => {
                let mut best = (f64::NEG_INFINITY, 0usize);
                for (k, (a, b)) in slopes.iter().zip(intercepts).enumerate() {
                    let v = dot(a, x) + b;
                    if v > best.0 {
                        best = (v, k);
                    }
                }
                (best.0, slopes[best.1].clone())
            }
        }
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl SubgradientOracle for ConvexFunction {
    fn eval(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(self.value_and_subgradient(x))
    }
}

/// Parses a function from JSON, e.g. `{"kind":"l1","center":[0,1]}`.
pub fn parse_function(text: &str) -> Result<ConvexFunction> {
    let f: ConvexFunction = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    f.validate().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(f)
}
