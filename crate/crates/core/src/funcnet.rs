//! Functional nets: a small sample `N` of `P` that certifies, through a
//! separation oracle alone, that a convex body is ε-light.
//!
//! A query repeatedly asks the oracle about an approximate centerpoint of the
//! active part of `N`. A point inside the body proves it heavy. Otherwise the
//! returned halfspace trims the active set, and the round counts when at
//! least a `γ = 1/(16 d²)` fraction is removed. Once at most `⌈(ε/8)|N|⌉`
//! points remain the body is declared light.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bodies::{Separation, SeparationOracle};
use crate::centerpoint::{approx_centerpoint, sample_with_replacement};
use crate::error::{domain, Error, Result};
use crate::geometry::{Halfspace, Point, PointSet};
use crate::rng::seeded_rng;

pub const NET_SCHEMA: u32 = 1;
pub const DEFAULT_C_TAU: f64 = 32.0;
/// Quality parameter of the centerpoint sub-calls.
pub const CENTER_EPS_B: f64 = 0.5;
/// Failure probability of the centerpoint sub-calls.
pub const CENTER_PHI: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuncNetParams {
    pub eps: f64,
    pub phi: f64,
    pub gamma: f64,
    pub stop_threshold: usize,
    pub tau: u64,
    /// `d^3 ln d ln^2(1/eps)`, the order of the VC dimension of the ranges
    /// cut out by `tau` halfspaces. Reported only.
    pub vc_dim: f64,
    pub sample_size: usize,
    pub c_s: f64,
    pub c_tau: f64,
    pub seed: u64,
}

impl FuncNetParams {
    pub fn new(d: usize, eps: f64, phi: f64, c_s: f64, c_tau: f64, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(domain("dimension must be at least 1"));
        }
        for (name, v) in [("eps", eps), ("phi", phi)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(domain(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        for (name, v) in [("c_s", c_s), ("c_tau", c_tau)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        let s = net_sample_size(d, eps, phi, c_s);
        let gamma = gamma(d);
        let df = d as f64;
        let tau_formula = (c_tau * df * df * (1.0 / eps).ln()).ceil() as u64;
        Ok(FuncNetParams {
            eps,
            phi,
            gamma,
            stop_threshold: stop_threshold(eps, s),
            tau: tau_formula.max(success_bound(eps, gamma)),
            vc_dim: df.powi(3) * df.ln() * (1.0 / eps).ln().powi(2),
            sample_size: s,
            c_s,
            c_tau,
            seed,
        })
    }

    /// Attempt budget of a query.
    pub fn attempt_budget(&self) -> u64 {
        16 * self.tau
    }
}

/// `1 / (16 d^2)`.
pub fn gamma(d: usize) -> f64 {
    1.0 / (16.0 * (d * d) as f64)
}

/// `ceil(c_s (eps^-1 d^3 ln d ln^3(1/eps) + eps^-1 ln(1/phi)))`.
pub fn net_sample_size(d: usize, eps: f64, phi: f64, c_s: f64) -> usize {
    let df = d as f64;
    let l = (1.0 / eps).ln();
    let s = c_s * (df.powi(3) * df.ln() * l.powi(3) / eps + (1.0 / phi).ln() / eps);
    (s.ceil() as usize).max(1)
}

/// `ceil((eps / 8) s)`.
pub fn stop_threshold(eps: f64, s: usize) -> usize {
    (eps / 8.0 * s as f64).ceil() as usize
}

/// `ceil(ln(eps/8) / ln(1 - gamma))`: most successful rounds a query can make.
pub fn success_bound(eps: f64, gamma: f64) -> u64 {
    ((eps / 8.0).ln() / (1.0 - gamma).ln()).ceil() as u64
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuncNet {
    pub params: FuncNetParams,
    pub sample: PointSet,
}

#[derive(Serialize, Deserialize)]
struct NetFile {
    schema: u32,
    params: FuncNetParams,
    sample: PointSet,
}

impl FuncNet {
    pub fn dim(&self) -> usize {
        self.sample.dim()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&NetFile { schema: NET_SCHEMA, params: self.params.clone(), sample: self.sample.clone() })
            .expect("nets always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: NetFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if f.schema != NET_SCHEMA {
            return Err(Error::Parse(format!("unsupported net schema {}", f.schema)));
        }
        let p = &f.params;
        let sane = p.eps > 0.0
            && p.eps < 1.0
            && p.phi > 0.0
            && p.phi < 1.0
            && p.gamma > 0.0
            && p.gamma < 1.0
            && p.tau >= 1
            && p.tau <= 1 << 40
            && p.sample_size == f.sample.len();
        if !sane {
            return Err(Error::Parse("net parameters are inconsistent".into()));
        }
        Ok(FuncNet { params: f.params, sample: f.sample })
    }
}

/// Draws the net sample: `s` independent uniform draws from `p`.
pub fn build_funcnet(p: &PointSet, eps: f64, phi: f64, seed: u64) -> Result<FuncNet> {
    build_funcnet_with(p, eps, phi, 1.0, DEFAULT_C_TAU, seed)
}

pub fn build_funcnet_with(p: &PointSet, eps: f64, phi: f64, c_s: f64, c_tau: f64, seed: u64) -> Result<FuncNet> {
    let params = FuncNetParams::new(p.dim(), eps, phi, c_s, c_tau, seed)?;
    let mut rng = seeded_rng(seed);
    let sample = sample_with_replacement(p, params.sample_size, &mut rng);
    Ok(FuncNet { params, sample })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `queries[witness]` lies in the body.
    Heavy {
        witness: usize,
    },
    Light,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryTranscript {
    pub queries: Vec<Point>,
    pub verdict: Verdict,
    pub oracle_calls: u64,
    /// Indices into `queries` of the successful rounds.
    pub successful: Vec<usize>,
    /// Halfspaces returned in the successful rounds.
    pub halfspaces: Vec<Halfspace>,
    pub final_active: usize,
}

pub fn query_funcnet<O: SeparationOracle + ?Sized>(
    net: &FuncNet,
    oracle: &mut O,
    seed: u64,
) -> Result<QueryTranscript> {
    query_funcnet_observed(net, oracle, seed, |_| {})
}

/// Like [`query_funcnet`], calling `observe` with the active set after every
/// committed round.
pub fn query_funcnet_observed<O: SeparationOracle + ?Sized>(
    net: &FuncNet,
    oracle: &mut O,
    seed: u64,
    mut observe: impl FnMut(&PointSet),
) -> Result<QueryTranscript> {
    let p = &net.params;
    let mut rng = seeded_rng(seed);
    let mut active = Some(net.sample.clone());
    let mut t = QueryTranscript {
        queries: Vec::new(),
        verdict: Verdict::Light,
        oracle_calls: 0,
        successful: Vec::new(),
        halfspaces: Vec::new(),
        final_active: net.sample.len(),
    };
    let budget = p.attempt_budget();
    while let Some(set) = active.as_ref().filter(|s| s.len() > p.stop_threshold) {
        if t.oracle_calls >= budget {
            return Err(Error::IterationBudget { budget: budget as usize });
        }
        let q = approx_centerpoint(set, CENTER_EPS_B, CENTER_PHI, rng.next_u64())?.point;
        t.oracle_calls += 1;
        t.queries.push(q.clone());
        let h = match oracle.query(q.coords())? {
            Separation::Inside => {
                t.verdict = Verdict::Heavy { witness: t.queries.len() - 1 };
                t.final_active = set.len();
                return Ok(t);
            }
            Separation::Separated(h) => h,
        };
        if h.dim() != q.dim() || !h.excludes(q.coords()) {
            return Err(Error::OracleContractViolation(format!("halfspace {h:?} does not exclude query {q}")));
        }
        let kept = set.filter(|x| !h.excludes(x));
        let kept_len = kept.as_ref().map_or(0, PointSet::len);
        if kept_len as f64 <= (1.0 - p.gamma) * set.len() as f64 {
            t.successful.push(t.queries.len() - 1);
            t.halfspaces.push(h);
            if let Some(k) = &kept {
                observe(k);
            }
            active = kept;
        }
    }
    t.final_active = active.map_or(0, |s| s.len());
    Ok(t)
}
