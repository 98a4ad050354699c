//! Radon's urn and its dominating biased random walk.
//!
//! The urn holds `n` balls, `r` of them red. Each round marks a uniformly
//! random ball for deletion, draws `t` balls with replacement, inserts a red
//! ball iff at least two of the draws are red (blue otherwise), and finally
//! removes the marked ball. Only the red count matters, so the simulation
//! tracks counts rather than individual balls.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rng::seeded_rng;

/// Probability that a `t`-sample drawn with replacement from an urn with `r`
/// red balls out of `n` holds at least two red balls.
pub fn p_two_red(r: u64, n: u64, t: u32) -> Result<f64> {
    if n == 0 || r > n {
        return Err(domain(format!("need 0 <= r <= n and n >= 1, got r = {r}, n = {n}")));
    }
    if t < 2 {
        return Err(domain(format!("need t >= 2, got {t}")));
    }
    Ok(two_or_more(r as f64 / n as f64, t))
}

fn two_or_more(p: f64, t: u32) -> f64 {
    if p <= 0.5 {
        // Direct sum of positive terms; no cancellation for small p.
        let q = 1.0 - p;
        let mut term = binom(t, 2) * p * p * q.powi(t as i32 - 2);
        let mut sum = term;
        for i in 2..t {
            // term(i+1) = term(i) * (t - i)/(i + 1) * p/q
            term *= (t - i) as f64 / (i + 1) as f64 * p / q;
            sum += term;
        }
        sum
    } else {
        let q = 1.0 - p;
        1.0 - q.powi(t as i32) - t as f64 * p * q.powi(t as i32 - 1)
    }
}

/// Binomial coefficient as a float (exact while it fits in 53 bits).
pub fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// Exact one-round transition probabilities `(P+(r), P-(r))`.
pub fn transition_probabilities(r: u64, n: u64, t: u32) -> Result<(f64, f64)> {
    let p2 = p_two_red(r, n, t)?;
    let frac = r as f64 / n as f64;
    Ok((p2 * (1.0 - frac), (1.0 - p2) * frac))
}

/// The red-count threshold `(1 - 2 eps_w) n / t^2`.
pub fn r_max(n: u64, t: u32, eps_w: f64) -> f64 {
    (1.0 - 2.0 * eps_w) * n as f64 / (t as f64 * t as f64)
}

/// Smallest `n` for which `r_max` reaches the failure threshold of the walk
/// with failure probability `phi / 2`, as needed for the total-iterations bound.
pub fn urn_min_n(t: u32, eps_w: f64, eps_a: f64, phi: f64) -> Result<u64> {
    check_eps_w(eps_w)?;
    check_open_unit("eps_a", eps_a)?;
    check_open_unit("phi", phi)?;
    let need = walk_failure_threshold(eps_w, eps_a, phi / 2.0);
    Ok((need * (t as f64).powi(2) / (1.0 - 2.0 * eps_w)).ceil() as u64)
}

/// `(1 / (4 eps_w^2)) ln(1 / (4 eps_w^2 phi))`: visits to a fixed level that
/// the walk exceeds with probability at most `phi`.
pub fn walk_visits_bound(eps_w: f64, phi: f64) -> f64 {
    let a = 4.0 * eps_w * eps_w;
    (1.0 / (a * phi)).ln() / a
}

/// `(1 / (2 eps_w eps_a)) ln(1 / (4 eps_w^2 phi))`: smallest top level for
/// which the walk started at `(1 - eps_a)` of it fails with probability at most `phi`.
pub fn walk_failure_threshold(eps_w: f64, eps_a: f64, phi: f64) -> f64 {
    (1.0 / (4.0 * eps_w * eps_w * phi)).ln() / (2.0 * eps_w * eps_a)
}

fn check_eps_w(eps_w: f64) -> Result<()> {
    if eps_w > 0.0 && eps_w < 0.25 {
        Ok(())
    } else {
        Err(domain(format!("eps_w must lie in (0, 1/4), got {eps_w}")))
    }
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0, 1), got {v}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UrnConfig {
    pub n: u64,
    pub t: u32,
    pub r0: u64,
    pub eps_w: f64,
    pub eps_a: f64,
    pub seed: u64,
}

impl UrnConfig {
    /// Configuration in the analysed regime: `r0 = floor((1 - eps_a) r_max)`.
    pub fn with_regime(n: u64, t: u32, eps_w: f64, eps_a: f64, seed: u64) -> Result<Self> {
        check_eps_w(eps_w)?;
        check_open_unit("eps_a", eps_a)?;
        let r0 = ((1.0 - eps_a) * r_max(n, t, eps_w)).floor() as u64;
        let cfg = UrnConfig { n, t, r0, eps_w, eps_a, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(domain("urn needs n >= 1"));
        }
        if self.t < 2 {
            return Err(domain(format!("urn needs t >= 2, got {}", self.t)));
        }
        if self.r0 > self.n {
            return Err(domain(format!("r0 = {} exceeds n = {}", self.r0, self.n)));
        }
        check_eps_w(self.eps_w)?;
        check_open_unit("eps_a", self.eps_a)
    }

    pub fn r_max(&self) -> f64 {
        r_max(self.n, self.t, self.eps_w)
    }

    /// Red count at which the game counts as failed.
    pub fn top(&self) -> u64 {
        self.r_max().ceil() as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UrnOutcome {
    AllBlue,
    ReachedRmax,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UrnTrace {
    pub total_iterations: u64,
    pub effective_iterations: u64,
    pub max_red_seen: u64,
    pub final_red: u64,
    pub outcome: UrnOutcome,
    /// `dwell[r]`: rounds started with exactly `r` red balls.
    pub dwell: Vec<u64>,
}

/// Plays the urn game until no red ball is left, the red count reaches
/// `ceil(r_max)`, or `max_iterations` rounds have been played.
pub fn simulate_urn(cfg: &UrnConfig, max_iterations: u64) -> Result<UrnTrace> {
    cfg.validate()?;
    let mut rng = seeded_rng(cfg.seed);
    let n = cfg.n;
    let top = cfg.top();
    let mut red = cfg.r0;
    let mut dwell = vec![0u64; top.min(n) as usize + 1];
    let mut trace = UrnTrace {
        total_iterations: 0,
        effective_iterations: 0,
        max_red_seen: red,
        final_red: red,
        outcome: UrnOutcome::BudgetExhausted,
        dwell: Vec::new(),
    };
    loop {
        if red == 0 {
            trace.outcome = UrnOutcome::AllBlue;
            break;
        }
        if red >= top {
            trace.outcome = UrnOutcome::ReachedRmax;
            break;
        }
        if trace.total_iterations >= max_iterations {
            break;
        }
        dwell[red as usize] += 1;
        trace.total_iterations += 1;
        let marked_red = rng.random_range(0..n) < red;
        let mut drawn_red = 0;
        for _ in 0..cfg.t {
            if rng.random_range(0..n) < red {
                drawn_red += 1;
            }
        }
        let insert_red = drawn_red >= 2;
        match (insert_red, marked_red) {
            (true, false) => red += 1,
            (false, true) => red -= 1,
            _ => continue,
        }
        trace.effective_iterations += 1;
        trace.max_red_seen = trace.max_red_seen.max(red);
    }
    trace.final_red = red;
    trace.dwell = dwell;
    Ok(trace)
}

/// Monte-Carlo estimate of `(P+(r), P-(r))` from `trials` single rounds.
pub fn estimate_transitions(r: u64, n: u64, t: u32, trials: u64, seed: u64) -> Result<(f64, f64)> {
    p_two_red(r, n, t)?;
    let mut rng = seeded_rng(seed);
    let (mut up, mut down) = (0u64, 0u64);
    for _ in 0..trials {
        let marked_red = rng.random_range(0..n) < r;
        let drawn = (0..t).filter(|_| rng.random_range(0..n) < r).count();
        match (drawn >= 2, marked_red) {
            (true, false) => up += 1,
            (false, true) => down += 1,
            _ => {}
        }
    }
    Ok((up as f64 / trials as f64, down as f64 / trials as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkOutcome {
    ReachedZero,
    ReachedRmax,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub start: u64,
    pub steps: u64,
    /// `visits[level]`: times the walk stood at `level`, the start included.
    pub visits: Vec<u64>,
    pub outcome: WalkOutcome,
}

/// Biased ±1 walk from `start`, stepping down with probability `1/2 + eps_w`,
/// absorbed at 0 or at `top`.
pub fn simulate_walk(start: u64, top: u64, eps_w: f64, seed: u64, max_steps: u64) -> Result<WalkTrace> {
    walk(start, top, eps_w, seed, max_steps, None)
}

/// Like [`simulate_walk`], also returning the full path.
pub fn simulate_walk_path(
    start: u64,
    top: u64,
    eps_w: f64,
    seed: u64,
    max_steps: u64,
) -> Result<(WalkTrace, Vec<u64>)> {
    let mut path = Vec::new();
    let trace = walk(start, top, eps_w, seed, max_steps, Some(&mut path))?;
    Ok((trace, path))
}

fn walk(
    start: u64,
    top: u64,
    eps_w: f64,
    seed: u64,
    max_steps: u64,
    mut path: Option<&mut Vec<u64>>,
) -> Result<WalkTrace> {
    if !(eps_w > 0.0 && eps_w < 0.5) {
        return Err(domain(format!("eps_w must lie in (0, 1/2), got {eps_w}")));
    }
    if start == 0 || start >= top {
        return Err(domain(format!("walk needs 0 < start < top, got start = {start}, top = {top}")));
    }
    let mut rng = seeded_rng(seed);
    let down = 0.5 + eps_w;
    let mut y = start;
    let mut visits = vec![0u64; (start as usize + 1).min(top as usize + 1)];
    let mut steps = 0;
    let outcome = loop {
        if let Some(p) = path.as_deref_mut() {
            p.push(y);
        }
        if y as usize >= visits.len() {
            visits.resize(y as usize + 1, 0);
        }
        visits[y as usize] += 1;
        if y == 0 {
            break WalkOutcome::ReachedZero;
        }
        if y == top {
            break WalkOutcome::ReachedRmax;
        }
        if steps >= max_steps {
            break WalkOutcome::BudgetExhausted;
        }
        steps += 1;
        if rng.random::<f64>() < down {
            y -= 1;
        } else {
            y += 1;
        }
    };
    Ok(WalkTrace { start, steps, visits, outcome })
}

/// Gambler's-ruin probability that the walk from `start` reaches `top`
/// before 0, stepping down with probability `1/2 + eps_w`.
pub fn ruin_top_probability(start: u64, top: u64, eps_w: f64) -> f64 {
    let ratio = (0.5 + eps_w) / (0.5 - eps_w);
    // (ratio^start - 1)/(ratio^top - 1), written to avoid overflow.
    let k = start as f64;
    let m = top as f64;
    let ln_r = ratio.ln();
    ((k - m) * ln_r).exp() * (-(-k * ln_r).exp_m1()) / (-(-m * ln_r).exp_m1())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Binomial upper tail against its leading-term bound:
/// `sum_{i>=k} C(n,i) p^i (1-p)^(n-i) <= C(n,k) p^k`.
pub fn verify_tail_bound(n: u32, k: u32, p: f64) -> Result<TailCheck> {
    if k > n {
        return Err(domain(format!("need k <= n, got k = {k}, n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(format!("p must lie in [0, 1], got {p}")));
    }
    let q = 1.0 - p;
    let lhs: f64 = (k..=n).map(|i| binom(n, i) * p.powi(i as i32) * q.powi((n - i) as i32)).sum();
    let rhs = binom(n, k) * p.powi(k as i32);
    Ok(TailCheck { lhs, rhs, holds: lhs <= rhs + 1e-12 })
}

/// `lambda^-1 2^(-2m(lambda - 1 - ln lambda))`, bounding
/// `P[X_1 + ... + X_m >= 2 lambda m]` for i.i.d. Geometric(1/2) variables.
pub fn geometric_sum_bound(m: u64, lambda: f64) -> f64 {
    (-2.0 * m as f64 * (lambda - 1.0 - lambda.ln())).exp2() / lambda
}

/// Empirical `P[X_1 + ... + X_m >= 2 lambda m]` for i.i.d. Geometric(1/2)
/// variables supported on `{1, 2, ...}`.
pub fn geometric_sum_tail(m: u64, lambda: f64, trials: u64, seed: u64) -> Result<f64> {
    if m == 0 || lambda.is_nan() || lambda < 1.0 || trials == 0 {
        return Err(domain("geometric_sum_tail needs m >= 1, lambda >= 1 and trials >= 1"));
    }
    let mut rng = seeded_rng(seed);
    let limit = 2.0 * lambda * m as f64;
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut sum = 0u64;
        for _ in 0..m {
            sum += geometric_half(&mut rng);
        }
        if sum as f64 >= limit {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

fn geometric_half(rng: &mut crate::rng::Rng) -> u64 {
    let mut extra = 0;
    loop {
        let bits: u64 = rng.random();
        if bits != 0 {
            return extra + bits.trailing_zeros() as u64 + 1;
        }
        extra += 64;
    }
}

/// Empirical `q`-quantile (nearest rank) of `values`.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    Some(v[rank - 1])
}
