use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::PathBuf;

use radon_center::bodies::{parse_body, parse_polytope_json, Body};
use radon_center::centernet::{build_weak_eps_net_with, candidate_bound, verify_center_net, CenterNetParams};
use radon_center::centerpoint::{approx_centerpoint_with, CenterpointConstants};
use radon_center::convex_opt::{lower_bound_min_with, parse_function, ConvexFunction, LowerBoundConfig};
use radon_center::depth::{sampled_refuter, tukey_depth_exact, tukey_depth_sampled, DepthResult};
use radon_center::funcnet::{build_funcnet_with, query_funcnet, FuncNet, Verdict};
use radon_center::gen::generate;
use radon_center::io::{parse_points, to_csv_string, to_json_string};
use radon_center::rng::trial_seed;
use radon_center::urn::{
    quantile, r_max, ruin_top_probability, simulate_urn, simulate_walk, urn_min_n, walk_visits_bound, UrnConfig,
    UrnOutcome, WalkOutcome,
};
use radon_center::{radon_point, Error, Point, PointSet};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Serialize)]
pub struct Verification {
    pub passed: bool,
    #[serde(flatten)]
    pub details: Value,
}

/// What a subcommand produced: an envelope payload or raw text, plus side files.
pub enum Output {
    Envelope { result: Value, verification: Option<Verification> },
    Raw(String),
}

pub struct Outcome {
    pub output: Output,
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn result(result: impl Serialize) -> Self {
        Outcome { output: Output::Envelope { result: to_value(result), verification: None }, files: Vec::new() }
    }

    fn verified(result: impl Serialize, verification: Option<Verification>) -> Self {
        Outcome { output: Output::Envelope { result: to_value(result), verification }, files: Vec::new() }
    }

    fn with_file(mut self, path: Option<&PathBuf>, contents: impl FnOnce() -> String) -> Self {
        if let Some(p) = path {
            self.files.push((p.clone(), contents()));
        }
        self
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("results always serialize")
}

/// Reads a file, or stdin for `-`. Stdin may be consumed once per run.
pub struct Inputs<'a> {
    stdin: Option<&'a mut (dyn Read + Send)>,
}

impl<'a> Inputs<'a> {
    pub fn new(stdin: &'a mut (dyn Read + Send)) -> Self {
        Inputs { stdin: Some(stdin) }
    }

    fn text(&mut self, path: &str) -> CliResult<String> {
        if path == "-" {
            let stdin = self.stdin.take().ok_or_else(|| CliError::Usage("stdin can only be read once".into()))?;
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(Error::from)?;
            Ok(s)
        } else {
            Ok(fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?)
        }
    }

    fn points(&mut self, path: &str) -> CliResult<PointSet> {
        Ok(parse_points(&self.text(path)?)?)
    }

    fn body(&mut self, spec: &str) -> CliResult<Body> {
        match spec.strip_prefix("polytope:") {
            Some(path) => Ok(parse_polytope_json(&self.text(path)?)?),
            None => Ok(parse_body(spec)?),
        }
    }
}

pub fn radon(a: &RadonArgs, io: &mut Inputs) -> CliResult<Outcome> {
    let p = io.points(&a.input)?;
    let pts: Vec<Point> = (0..p.len()).map(|i| p.point(i)).collect();
    Ok(Outcome::result(radon_point(&pts)?))
}

#[derive(Serialize)]
struct DepthOut {
    n: usize,
    #[serde(flatten)]
    result: DepthResult,
    fraction: f64,
}

pub fn depth(a: &DepthArgs, io: &mut Inputs) -> CliResult<Outcome> {
    let p = io.points(&a.input)?;
    let result = match a.method {
        Method::Exact => tukey_depth_exact(&p, &a.query.0)?,
        Method::Sampled => {
            let seed = a.seed.ok_or_else(|| CliError::Usage("--seed is required with --method sampled".into()))?;
            tukey_depth_sampled(&p, &a.query.0, a.directions, seed)?
        }
    };
    let fraction = result.depth as f64 / p.len() as f64;
    Ok(Outcome::result(DepthOut { n: p.len(), result, fraction }))
}

pub fn centerpoint(a: &CenterpointArgs, io: &mut Inputs) -> CliResult<Outcome> {
    let p = io.points(&a.input)?;
    let consts = CenterpointConstants { c_s: a.c_s, c_t: a.c_t };
    let r = approx_centerpoint_with(&p, a.eps_b, a.phi, consts, a.seed)?;
    let verification = if a.verify {
        let d = p.dim();
        let alpha = (1.0 - a.eps_b) / ((d + 2) * (d + 2)) as f64;
        let required = alpha * p.len() as f64;
        let q = r.point.coords();
        Some(if d <= 3 {
            let depth = tukey_depth_exact(&p, q)?;
            Verification {
                passed: depth.depth as f64 >= required,
                details: json!({ "method": "exact", "alpha": alpha, "required": required, "depth": depth.depth, "witness": depth.witness }),
            }
        } else {
            let threshold = required.ceil() as usize;
            let refuted = sampled_refuter(&p, q, threshold, a.directions, a.seed)?;
            Verification {
                passed: refuted.is_none(),
                details: json!({
                    "method": "sampled",
                    "alpha": alpha,
                    "required": required,
                    "directions": a.directions,
                    "violating_halfspace": refuted,
                }),
            }
        })
    } else {
        None
    };
    Ok(Outcome::verified(r, verification))
}

/// Runs `trials` independent jobs on the current pool; results come back in
/// trial order whatever the thread count.
fn run_trials<T: Send>(
    trials: u64,
    seed: u64,
    job: impl Fn(u64) -> radon_center::Result<T> + Sync,
) -> CliResult<Vec<T>> {
    Ok((0..trials).into_par_iter().map(|i| job(trial_seed(seed, i))).collect::<radon_center::Result<Vec<T>>>()?)
}

#[derive(Serialize)]
struct UrnTrial {
    index: u64,
    seed: u64,
    total_iterations: u64,
    effective_iterations: u64,
    max_red_seen: u64,
    final_red: u64,
    outcome: UrnOutcome,
}

pub fn urn_sim(a: &UrnArgs) -> CliResult<Outcome> {
    let n = match a.n {
        Some(n) => n,
        None => urn_min_n(a.t, a.eps_w, a.eps_a, a.phi)?,
    };
    let base = match a.r0 {
        Some(r0) => {
            let cfg = UrnConfig { n, t: a.t, r0, eps_w: a.eps_w, eps_a: a.eps_a, seed: a.seed };
            cfg.validate()?;
            cfg
        }
        None => UrnConfig::with_regime(n, a.t, a.eps_w, a.eps_a, a.seed)?,
    };
    let traces =
        run_trials(a.trials, a.seed, |seed| simulate_urn(&UrnConfig { seed, ..base.clone() }, a.max_iterations))?;

    let trials: Vec<UrnTrial> = traces
        .iter()
        .enumerate()
        .map(|(i, tr)| UrnTrial {
            index: i as u64,
            seed: trial_seed(a.seed, i as u64),
            total_iterations: tr.total_iterations,
            effective_iterations: tr.effective_iterations,
            max_red_seen: tr.max_red_seen,
            final_red: tr.final_red,
            outcome: tr.outcome,
        })
        .collect();
    let count = |o: UrnOutcome| traces.iter().filter(|t| t.outcome == o).count();
    let nf = n as f64;
    let scale = nf * nf.ln() * (nf / a.phi).ln();
    let ratios: Vec<f64> = traces.iter().map(|t| t.total_iterations as f64 / scale).collect();
    let mean = |f: &dyn Fn(&radon_center::urn::UrnTrace) -> u64| {
        traces.iter().map(|t| f(t) as f64).sum::<f64>() / traces.len() as f64
    };
    let aggregate = json!({
        "all_blue": count(UrnOutcome::AllBlue),
        "reached_rmax": count(UrnOutcome::ReachedRmax),
        "budget_exhausted": count(UrnOutcome::BudgetExhausted),
        "all_blue_fraction": count(UrnOutcome::AllBlue) as f64 / traces.len() as f64,
        "mean_total_iterations": mean(&|t| t.total_iterations),
        "max_total_iterations": traces.iter().map(|t| t.total_iterations).max(),
        "mean_effective_iterations": mean(&|t| t.effective_iterations),
        "fitted_c": quantile(&ratios, 0.9),
    });
    let result = json!({
        "n": n,
        "t": a.t,
        "r0": base.r0,
        "r_max": r_max(n, a.t, a.eps_w),
        "top": base.top(),
        "trials": trials,
        "aggregate": aggregate,
    });
    Ok(Outcome::result(result).with_file(a.levels_csv.as_ref(), || {
        let mut dwell: Vec<u64> = Vec::new();
        let mut visits: Vec<u64> = Vec::new();
        for t in &traces {
            if dwell.len() < t.dwell.len() {
                dwell.resize(t.dwell.len(), 0);
                visits.resize(t.dwell.len(), 0);
            }
            for (r, &k) in t.dwell.iter().enumerate() {
                dwell[r] += k;
                visits[r] += u64::from(k > 0);
            }
        }
        let mut s = String::from("level,dwell,visits\n");
        for (r, (d, v)) in dwell.iter().zip(&visits).enumerate() {
            s.push_str(&format!("{r},{d},{v}\n"));
        }
        s
    }))
}

pub fn walk_sim(a: &WalkArgs) -> CliResult<Outcome> {
    let traces = run_trials(a.trials, a.seed, |seed| simulate_walk(a.start, a.top, a.eps_w, seed, a.max_steps))?;
    let bound = walk_visits_bound(a.eps_w, a.phi);
    let max_visits = |t: &radon_center::urn::WalkTrace| t.visits.iter().skip(1).copied().max().unwrap_or(0);
    let count = |o: WalkOutcome| traces.iter().filter(|t| t.outcome == o).count();
    let within = traces.iter().filter(|t| max_visits(t) as f64 <= bound).count();
    let m = traces.len() as f64;
    let p_top = ruin_top_probability(a.start, a.top, a.eps_w);
    let mut result = json!({
        "start": a.start,
        "top": a.top,
        "aggregate": {
            "reached_zero": count(WalkOutcome::ReachedZero),
            "reached_top": count(WalkOutcome::ReachedRmax),
            "budget_exhausted": count(WalkOutcome::BudgetExhausted),
            "top_fraction": count(WalkOutcome::ReachedRmax) as f64 / m,
            "closed_form_top": p_top,
            "sigma": (p_top * (1.0 - p_top) / m).sqrt(),
            "visits_bound": bound,
            "within_visits_bound": within,
            "mean_steps": traces.iter().map(|t| t.steps as f64).sum::<f64>() / m,
        },
    });
    if a.per_trial {
        result["trials"] = traces
            .iter()
            .enumerate()
            .map(|(i, t)| {
                json!({
                    "index": i,
                    "seed": trial_seed(a.seed, i as u64),
                    "steps": t.steps,
                    "max_visits": max_visits(t),
                    "outcome": t.outcome,
                })
            })
            .collect();
    }
    Ok(Outcome::result(result).with_file(a.levels_csv.as_ref(), || {
        let mut visits: BTreeMap<usize, u64> = BTreeMap::new();
        for t in &traces {
            for (level, &k) in t.visits.iter().enumerate() {
                *visits.entry(level).or_default() += k;
            }
        }
        let mut s = String::from("level,visits\n");
        for (level, k) in visits {
            s.push_str(&format!("{level},{k}\n"));
        }
        s
    }))
}

/// Accepts `kind:coords` for the single-vector functions, inline JSON, or
/// `@file` holding JSON.
fn function(spec: &str, io: &mut Inputs) -> CliResult<ConvexFunction> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        return Ok(parse_function(&io.text(path)?)?);
    }
    if spec.starts_with('{') {
        return Ok(parse_function(spec)?);
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("function {spec:?}: expected kind:coords, JSON or @file")))?;
    let v = radon_center::io::parse_point(rest)?;
    let f = match kind {
        "linear" => ConvexFunction::Linear { a: v },
        "quadratic" => ConvexFunction::Quadratic { center: v },
        "l1" => ConvexFunction::L1 { center: v },
        "linf" => ConvexFunction::LInf { center: v },
        _ => return Err(CliError::Usage(format!("unknown function kind {kind:?}"))),
    };
    f.validate()?;
    Ok(f)
}

pub fn lower_bound(a: &LowerBoundArgs, io: &mut Inputs) -> CliResult<Outcome> {
    let p = io.points(&a.input)?;
    let mut f = function(&a.function, io)?;
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: f.dim() }.into());
    }
    let cfg = LowerBoundConfig { c_quality: a.c_quality, stop_size: a.stop_size, ..LowerBoundConfig::default() };
    let r = lower_bound_min_with(&p, &mut f, &cfg, a.seed)?;
    let verification = a.verify.then(|| {
        let exact = p.iter().map(|x| f.value(x)).fold(f64::INFINITY, f64::min);
        Verification {
            passed: r.value <= exact + 1e-12 * (1.0 + exact.abs()),
            details: json!({ "exact_min": exact, "value": r.value }),
        }
    });
    Ok(Outcome::verified(json!({ "function": f, "result": r }), verification))
}

pub fn funcnet_build(a: &FuncnetBuildArgs, io: &mut Inputs) -> CliResult<Outcome> {
    let p = io.points(&a.input)?;
    let net = build_funcnet_with(&p, a.eps, a.phi, a.c_s, a.c_tau, a.seed)?;
    let value: Value = serde_json::from_str(&net.to_json()).expect("net JSON is valid");
    Ok(Outcome::result(value))
}

fn load_net(text: &str) -> CliResult<FuncNet> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match value.get("result") {
        Some(inner) if value.get("tool").is_some() => Ok(FuncNet::from_json(&inner.to_string())?),
        _ => Ok(FuncNet::from_json(text)?),
    }
}

pub fn funcnet_query(a: &FuncnetQueryArgs, io: &mut Inputs) -> CliResult<Outcome> {
    let net = load_net(&io.text(&a.net)?)?;
    let body = io.body(&a.body)?;
    if body.dim() != net.dim() {
        return Err(Error::DimensionMismatch { expected: net.dim(), found: body.dim() }.into());
    }
    let t = query_funcnet(&net, &mut &body, a.seed)?;
    let verification = match (&a.input, a.verify) {
        (Some(path), true) => {
            let p = io.points(path)?;
            let count = body.count(&p);
            let heavy = count as f64 >= net.params.eps * p.len() as f64;
            let calls_ok = t.oracle_calls <= 4 * net.params.tau;
            let verdict_ok = match t.verdict {
                Verdict::Light => !heavy,
                Verdict::Heavy { witness } => body.contains(t.queries[witness].coords()),
            };
            Some(Verification {
                passed: verdict_ok && calls_ok,
                details: json!({
                    "body_count": count,
                    "n": p.len(),
                    "heavy": heavy,
                    "oracle_calls": t.oracle_calls,
                    "call_cap": 4 * net.params.tau,
                }),
            })
        }
        _ => None,
    };
    Ok(Outcome::verified(t, verification))
}

pub fn weak_net(a: &WeakNetArgs, io: &mut Inputs) -> CliResult<Outcome> {
    let p = io.points(&a.input)?;
    let net = build_weak_eps_net_with(&p, a.eps, a.phi, a.c_s, a.seed)?;
    let result = json!({
        "params": net.params,
        "sample": net.sample(),
        "net_size": net.points().len(),
        "candidate_bound": candidate_bound(net.sample().len()).to_string(),
    });
    Ok(Outcome::result(result).with_file(a.net_csv.as_ref(), || to_csv_string(net.points())))
}

pub fn center_net_verify(a: &CenterNetVerifyArgs, io: &mut Inputs) -> CliResult<Outcome> {
    let p = io.points(&a.input)?;
    let body = io.body(&a.body)?;
    let params = CenterNetParams::new(p.dim(), a.eps, a.phi, a.c_s)?;
    let members =
        p.filter(|x| body.contains(x)).ok_or_else(|| Error::Domain("the body holds no input point".into()))?;
    let (sample_size, out) = match (&a.sample, a.seed) {
        (Some(path), _) => {
            let sample = io.points(path)?;
            (sample.len(), verify_center_net(&sample, &p, &members, a.eps)?)
        }
        (None, Some(seed)) => {
            let net = build_weak_eps_net_with(&p, a.eps, a.phi, a.c_s, seed)?;
            (net.sample().len(), net.verify(&p, &members)?)
        }
        (None, None) => return Err(CliError::Usage("either --sample or --seed is required".into())),
    };
    let depth = tukey_depth_exact(&members, out.point.coords())?.depth;
    let required = out.beta * members.len() as f64;
    let verification = Verification {
        passed: depth == out.depth && depth as f64 >= required && out.iterations <= out.tau,
        details: json!({ "exact_depth": depth, "required": required }),
    };
    Ok(Outcome::verified(json!({ "params": params, "sample_size": sample_size, "outcome": out }), Some(verification)))
}

pub fn gen(a: &GenArgs) -> CliResult<Outcome> {
    let p = generate(a.dist, a.n, a.d, a.seed)?;
    let text = match a.format {
        Format::Csv => to_csv_string(&p),
        Format::Json => to_json_string(&p) + "\n",
    };
    Ok(Outcome { output: Output::Raw(text), files: Vec::new() })
}
