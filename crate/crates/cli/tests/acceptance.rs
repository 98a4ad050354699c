//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Pass criterion numbers as arguments to run a subset.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use radon_center::bodies::Body;
use radon_center::centernet::{build_weak_eps_net, random_heavy_polygon, random_subset_polygon};
use radon_center::centerpoint::approx_centerpoint_raw;
use radon_center::convex_opt::{default_c_quality, lower_bound_min, success_cap, ConvexFunction};
use radon_center::depth::{depth_1d_value, tukey_depth_exact};
use radon_center::funcnet::{build_funcnet, query_funcnet, Verdict};
use radon_center::gen::{generate, PointDistribution};
use radon_center::rng::{seeded_rng, trial_seed};
use radon_center::urn::{
    p_two_red, quantile, simulate_urn, simulate_walk, urn_min_n, verify_tail_bound, walk_failure_threshold,
    walk_visits_bound, UrnConfig, UrnOutcome, WalkOutcome,
};
use radon_center::{radon_point, Point, PointSet};
use rand::Rng;

type Check = Result<String, String>;

/// Number, name, time budget in seconds, and the check itself.
type Criterion = (u32, &'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- criterion 1

fn random_points(rng: &mut impl Rng, k: usize, d: usize) -> Vec<Point> {
    (0..k).map(|_| Point::new((0..d).map(|_| rng.random_range(-10.0..10.0)).collect()).unwrap()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Affine weights of `x` with respect to `pts` by least squares on the
/// normal equations, and the reconstruction residual.
#[allow(clippy::needless_range_loop)]
fn barycentric(pts: &[&[f64]], x: &[f64]) -> (Vec<f64>, f64) {
    let k = pts.len();
    let d = x.len();
    let row = |r: usize, j: usize| if r < d { pts[j][r] } else { 1.0 };
    let rhs = |r: usize| if r < d { x[r] } else { 1.0 };
    let mut m = vec![vec![0.0; k + 1]; k];
    for a in 0..k {
        for b in 0..k {
            m[a][b] = (0..=d).map(|r| row(r, a) * row(r, b)).sum();
        }
        m[a][k] = (0..=d).map(|r| row(r, a) * rhs(r)).sum();
    }
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        for r in 0..k {
            if r != c && m[c][c] != 0.0 {
                let f = m[r][c] / m[c][c];
                for j in c..=k {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    let w: Vec<f64> = (0..k).map(|i| m[i][k] / m[i][i]).collect();
    let residual = (0..d).map(|r| ((0..k).map(|j| w[j] * pts[j][r]).sum::<f64>() - x[r]).abs()).fold(0.0, f64::max);
    (w, residual)
}

fn tolerant_count(pts: &[Point], q: &[f64], u: &[f64], tol: f64) -> usize {
    let un = dot(u, u).sqrt();
    pts.iter()
        .filter(|p| p.coords().iter().zip(q).zip(u).map(|((a, b), c)| (a - b) * c).sum::<f64>() >= -tol * un)
        .count()
}

fn criterion_1() -> Check {
    let mut rng = seeded_rng(101);
    let mut worst_w = f64::INFINITY;
    let mut worst_res = 0.0_f64;
    for i in 0..10_000 {
        let d = 2 + i % 5;
        let pts = random_points(&mut rng, d + 2, d);
        let rp = radon_point(&pts).map_err(|e| e.to_string())?;
        ensure(!rp.part1.is_empty() && !rp.part2.is_empty(), || format!("empty part at instance {i}"))?;
        let mut all: Vec<usize> = rp.part1.iter().chain(&rp.part2).copied().collect();
        all.sort_unstable();
        ensure(all == (0..d + 2).collect::<Vec<_>>(), || format!("not a partition at instance {i}"))?;
        let scale = 1.0 + pts.iter().flat_map(|p| p.coords()).fold(0.0_f64, |m, c| m.max(c.abs()));
        for part in [&rp.part1, &rp.part2] {
            let refs: Vec<&[f64]> = part.iter().map(|&j| pts[j].coords()).collect();
            let (w, res) = barycentric(&refs, rp.point.coords());
            worst_w = w.iter().fold(worst_w, |m, &x| m.min(x));
            worst_res = worst_res.max(res / scale);
        }
    }
    ensure(worst_w >= -1e-9, || format!("weight {worst_w:e} below -1e-9"))?;
    ensure(worst_res <= 1e-8, || format!("relative residual {worst_res:e} above 1e-8"))?;

    // Depth at least 2, with boundary points within 1e-9 scale counted inside.
    let tol = 1e-9 * 10.0;
    for i in 0..1000 {
        let d = 2 + i % 2;
        let pts = random_points(&mut rng, d + 2, d);
        let q = radon_point(&pts).unwrap().point;
        let q = q.coords();
        let exact = tukey_depth_exact(&PointSet::from_points(&pts).unwrap(), q).unwrap();
        ensure(tolerant_count(&pts, q, &exact.witness.normal, tol) >= 2, || format!("depth < 2 at instance {i}"))?;
        for _ in 0..200 {
            let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            ensure(tolerant_count(&pts, q, &u, tol) >= 2, || format!("depth < 2 at instance {i}"))?;
        }
    }

    // A halfspace holding a single input point excludes the Radon point.
    let mut checked = 0;
    while checked < 1000 {
        let d = 2 + checked % 5;
        let pts = random_points(&mut rng, d + 2, d);
        let rp = radon_point(&pts).unwrap();
        let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut proj: Vec<f64> = pts.iter().map(|p| dot(p.coords(), &u)).collect();
        proj.sort_by(f64::total_cmp);
        if proj[d + 1] - proj[d] < 1e-6 {
            continue;
        }
        let cut = 0.5 * (proj[d + 1] + proj[d]);
        ensure(pts.iter().filter(|p| dot(p.coords(), &u) >= cut).count() == 1, || {
            "cut holds more than one point".into()
        })?;
        ensure(dot(rp.point.coords(), &u) < cut, || format!("Radon point inside a one-point halfspace at {checked}"))?;
        checked += 1;
    }
    Ok(format!("min weight {worst_w:.1e}, max relative residual {worst_res:.1e}"))
}

// ---------------------------------------------------------------- criterion 2

fn choose(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn criterion_2() -> Check {
    let mut min_slack = f64::INFINITY;
    let mut cells = 0;
    for n in 0..=30u32 {
        for k in 0..=n {
            for j in 0..15 {
                let p = 0.01 + 0.07 * j as f64;
                let q = 1.0 - p;
                let lhs: f64 = (k..=n).map(|i| choose(n, i) * p.powi(i as i32) * q.powi((n - i) as i32)).sum();
                let rhs = choose(n, k) * p.powi(k as i32);
                min_slack = min_slack.min(rhs - lhs);
                let lib = verify_tail_bound(n, k, p).map_err(|e| e.to_string())?;
                ensure(lib.holds, || format!("library reports violation at n={n} k={k} p={p}"))?;
                ensure((lib.lhs - lhs).abs() <= 1e-12 * lhs.max(1e-300) + 1e-300, || {
                    format!("tail mismatch at n={n} k={k} p={p}: {} vs {lhs}", lib.lhs)
                })?;
                cells += 1;
            }
        }
    }
    ensure(min_slack >= -1e-12, || format!("slack {min_slack:e}"))?;
    Ok(format!("{cells} cells, min slack {min_slack:.2e}"))
}

// ---------------------------------------------------------------- criterion 3

fn two_red_direct(f: f64, t: u32) -> f64 {
    let g = 1.0 - f;
    (2..=t).map(|k| choose(t, k) * f.powi(k as i32) * g.powi((t - k) as i32)).sum()
}

fn criterion_3() -> Check {
    let ns = (10..=1000u64).chain((1010..=10_000).step_by(10));
    let mut evaluated = 0u64;
    for n in ns {
        for t in 3..=10u32 {
            for r in 1..=n {
                let p = p_two_red(r, n, t).map_err(|e| e.to_string())?;
                let f = r as f64 / n as f64;
                let quad = 0.5 * (t * t) as f64 * f * f;
                ensure(p <= quad, || format!("P({r}) = {p} > t^2/2 (r/n)^2 = {quad} at n={n} t={t}"))?;
                if n >= 2 * t as u64 * r {
                    ensure(p <= 0.125, || format!("P({r}) = {p} > 1/8 at n={n} t={t}"))?;
                }
                if f <= 0.5 && (n <= 1000 || r % 16 == 0) {
                    let direct = two_red_direct(f, t);
                    ensure((p - direct).abs() <= 1e-12 * direct + 1e-300, || {
                        format!("P({r}) = {p} disagrees with direct sum {direct} at n={n} t={t}")
                    })?;
                }
                evaluated += 1;
            }
        }
    }
    Ok(format!("{evaluated} grid points, zero violations"))
}

// ---------------------------------------------------------------- criterion 4

fn ruin_top(k: u64, m: u64, eps_w: f64) -> f64 {
    let r = (0.5 + eps_w) / (0.5 - eps_w);
    (r.powi(k as i32) - 1.0) / (r.powi(m as i32) - 1.0)
}

fn criterion_4() -> Check {
    let triples = [(5, 10, 1.0 / 6.0), (1, 20, 0.1), (10, 30, 0.05), (3, 8, 0.2), (15, 25, 0.02)];
    let trials = 100_000u64;
    let mut report = Vec::new();
    for (ti, &(k, m, eps_w)) in triples.iter().enumerate() {
        let exact = ruin_top(k, m, eps_w);
        let mut top = 0u64;
        for i in 0..trials {
            let tr = simulate_walk(k, m, eps_w, trial_seed(400 + ti as u64 * 1_000_000, i), u64::MAX).unwrap();
            top += u64::from(tr.outcome == WalkOutcome::ReachedRmax);
        }
        let est = top as f64 / trials as f64;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        ensure((est - exact).abs() <= 3.0 * sigma, || {
            format!("({k},{m},{eps_w}): {est} vs {exact} (3 sigma {})", 3.0 * sigma)
        })?;
        report.push(format!("{:.2} sd", (est - exact).abs() / sigma));
    }

    let phi = 0.1;
    let eps_a = 0.5;
    for eps_w in [1.0 / 6.0, 1.0 / 8.0] {
        let top = walk_failure_threshold(eps_w, eps_a, phi).ceil() as u64;
        let start = ((1.0 - eps_a) * top as f64).floor() as u64;
        let bound = walk_visits_bound(eps_w, phi);
        let (mut within, mut failed) = (0, 0);
        let walks = 1000;
        for i in 0..walks {
            let tr = simulate_walk(start, top, eps_w, trial_seed(450, i), u64::MAX).unwrap();
            let most = tr.visits.iter().skip(1).copied().max().unwrap_or(0);
            within += usize::from(most as f64 <= bound);
            failed += usize::from(tr.outcome == WalkOutcome::ReachedRmax);
        }
        let within_frac = within as f64 / walks as f64;
        let fail_frac = failed as f64 / walks as f64;
        ensure(within_frac >= 1.0 - phi - 0.03, || format!("eps_w {eps_w}: visits bound held in {within_frac}"))?;
        ensure(fail_frac <= phi + 0.03, || format!("eps_w {eps_w}: failure fraction {fail_frac}"))?;
        report.push(format!("eps_w {eps_w:.3}: visits ok {within_frac:.3}, fail {fail_frac:.3}"));
    }
    Ok(report.join("; "))
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Check {
    let (t, eps_w, eps_a, phi) = (4, 1.0 / 6.0, 0.5, 0.1);
    let n = urn_min_n(t, eps_w, eps_a, phi).map_err(|e| e.to_string())?;
    let games = 200;
    let mut blue = 0;
    for i in 0..games {
        let cfg = UrnConfig::with_regime(n, t, eps_w, eps_a, trial_seed(500, i)).unwrap();
        blue += usize::from(simulate_urn(&cfg, u64::MAX).unwrap().outcome == UrnOutcome::AllBlue);
    }
    ensure(blue as f64 >= 0.9 * games as f64, || format!("{blue} of {games} games cleared at n = {n}"))?;

    let mut fits = Vec::new();
    for n in [1u64 << 8, 1 << 10, 1 << 12] {
        let nf = n as f64;
        let scale = nf * nf.ln() * (nf / phi).ln();
        let ratios: Vec<f64> = (0..games)
            .map(|i| {
                let cfg = UrnConfig::with_regime(n, t, eps_w, eps_a, trial_seed(510 + n, i)).unwrap();
                simulate_urn(&cfg, u64::MAX).unwrap().total_iterations as f64 / scale
            })
            .collect();
        fits.push(quantile(&ratios, 0.9).unwrap());
    }
    let mut sorted = fits.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[1];
    ensure(fits.iter().all(|c| (c - median).abs() <= 0.25 * median), || {
        format!("fitted c {fits:?} not within 25% of {median}")
    })?;
    Ok(format!("n = {n}: {blue}/{games} AllBlue; fitted c {:.3} {:.3} {:.3}", fits[0], fits[1], fits[2]))
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6() -> Check {
    let (eps_b, phi, n, runs) = (0.5, 0.1, 2000, 50);
    let dists = [PointDistribution::UniformSquare, PointDistribution::GaussianMixture, PointDistribution::Circle];
    let mut report = Vec::new();
    for d in [2usize, 1] {
        let needed = (1.0 - eps_b) * n as f64 / ((d + 2) * (d + 2)) as f64;
        for (k, &dist) in dists.iter().enumerate() {
            let q = generate(dist, n, d, 600 + k as u64).unwrap();
            let mut good = 0;
            for i in 0..runs {
                let r =
                    approx_centerpoint_raw(&q, eps_b / 2.0, eps_b / 4.0, phi, trial_seed(610 + k as u64, i)).unwrap();
                let x = r.point.coords();
                let depth = if d == 1 {
                    depth_1d_value(q.iter().map(|p| p[0]), x[0])
                } else {
                    tukey_depth_exact(&q, x).unwrap().depth
                };
                good += usize::from(depth as f64 >= needed);
            }
            ensure(good as f64 >= 0.9 * runs as f64, || format!("d={d} {dist:?}: {good}/{runs} reach depth {needed}"))?;
            report.push(format!("d{d} {dist:?} {good}/{runs}"));
        }
    }
    Ok(report.join(", "))
}

// ---------------------------------------------------------------- criterion 7

fn eval(f: &ConvexFunction, x: &[f64]) -> f64 {
    let diff = |c: &[f64]| x.iter().zip(c).map(|(a, b)| a - b).collect::<Vec<f64>>();
    match f {
        ConvexFunction::Linear { a } => dot(a, x),
        ConvexFunction::Quadratic { center } => diff(center).iter().map(|v| v * v).sum(),
        ConvexFunction::WeightedQuadratic { center, weights } => {
            diff(center).iter().zip(weights).map(|(v, w)| w * v * v).sum()
        }
        ConvexFunction::L1 { center } => diff(center).iter().map(|v| v.abs()).sum(),
        ConvexFunction::LInf { center } => diff(center).iter().fold(0.0, |m, v| m.max(v.abs())),
        ConvexFunction::MaxAffine { slopes, intercepts } => {
            slopes.iter().zip(intercepts).map(|(s, b)| dot(s, x) + b).fold(f64::NEG_INFINITY, f64::max)
        }
    }
}

fn zoo(d: usize, rng: &mut impl Rng) -> Vec<ConvexFunction> {
    let mut v = || (0..d).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<f64>>();
    let a = v();
    let c1 = v();
    let c2 = v();
    let c3 = v();
    let c4 = v();
    let slopes: Vec<Vec<f64>> = (0..5).map(|_| v()).collect();
    let intercepts: Vec<f64> = v().into_iter().cycle().take(5).collect();
    let weights = v().into_iter().map(|w| 0.1 + w.abs()).collect();
    vec![
        ConvexFunction::Linear { a },
        ConvexFunction::Quadratic { center: c1 },
        ConvexFunction::WeightedQuadratic { center: c2, weights },
        ConvexFunction::L1 { center: c3 },
        ConvexFunction::LInf { center: c4 },
        ConvexFunction::MaxAffine { slopes, intercepts },
    ]
}

fn criterion_7() -> Check {
    let dists = [
        PointDistribution::UniformSquare,
        PointDistribution::GaussianMixture,
        PointDistribution::Ball,
        PointDistribution::Clustered,
        PointDistribution::Circle,
    ];
    let mut rng = seeded_rng(700);
    let (mut runs, mut cheap) = (0, 0);
    for set in 0..10 {
        let d = 2 + set % 2;
        let n = 1000;
        let p = generate(dists[set % dists.len()], n, d, 710 + set as u64).unwrap();
        let call_budget = 20.0 * (d * d) as f64 * (n as f64).ln();
        let cap = success_cap(n, (d + 2).max(8), default_c_quality(d), d);
        for f in zoo(d, &mut rng) {
            let exact = p.iter().map(|x| eval(&f, x)).fold(f64::INFINITY, f64::min);
            for seed in 0..10 {
                let r = lower_bound_min(&p, &mut f.clone(), None, trial_seed(720 + set as u64, seed))
                    .map_err(|e| e.to_string())?;
                ensure(r.value <= exact + 1e-12, || format!("{f:?}: {} > exact {exact}", r.value))?;
                ensure(r.successful_iterations <= cap, || {
                    format!("{} successes above cap {cap}", r.successful_iterations)
                })?;
                runs += 1;
                cheap += usize::from(r.oracle_calls as f64 <= call_budget);
            }
        }
    }
    ensure(cheap as f64 >= 0.95 * runs as f64, || format!("call budget met in {cheap}/{runs}"))?;
    Ok(format!("{runs} runs sound; call budget met in {cheap}/{runs}"))
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Check {
    let (n, eps, phi) = (10_000, 0.1, 0.1);
    let p = generate(PointDistribution::UniformSquare, n, 2, 800).unwrap();
    let ball = |x: f64, y: f64, r: f64| Body::Ball { center: vec![x, y], radius: r };
    let slab = |a: f64, b: f64, lo: f64, hi: f64| Body::Slab { normal: vec![a, b], lo, hi };
    let bodies = [
        ball(0.5, 0.5, 0.25),
        ball(0.0, 0.0, 0.5),
        slab(1.0, 0.0, 0.3, 0.5),
        Body::Ellipsoid { center: vec![0.6, 0.4], radii: vec![0.4, 0.2] },
        slab(1.0, 1.0, 0.9, 1.1),
        ball(0.8, 0.2, 0.22),
        ball(0.5, 0.5, 0.1),
        slab(1.0, 0.0, 0.495, 0.505),
        slab(0.0, 1.0, 1.1, 1.3),
        Body::Ellipsoid { center: vec![0.2, 0.8], radii: vec![0.15, 0.05] },
        ball(2.0, 2.0, 0.5),
        Body::Empty { dim: 2 },
    ];
    let counts: Vec<usize> = bodies.iter().map(|b| b.count(&p)).collect();
    let heavy: Vec<bool> = counts.iter().map(|&c| c as f64 >= eps * n as f64).collect();
    ensure(heavy.iter().filter(|&&h| h).count() >= 4, || format!("battery has too few heavy bodies: {counts:?}"))?;

    let rebuilds = 40;
    let (mut bad_rebuilds, mut heavy_runs, mut heavy_hits, mut max_calls) = (0, 0, 0, 0);
    for r in 0..rebuilds {
        let net = build_funcnet(&p, eps, phi, trial_seed(810, r)).map_err(|e| e.to_string())?;
        let cap = 4 * net.params.tau;
        let mut violated = false;
        for (i, b) in bodies.iter().enumerate() {
            let t = query_funcnet(&net, &mut &*b, trial_seed(820 + r, i as u64)).map_err(|e| e.to_string())?;
            ensure(t.oracle_calls <= cap, || format!("{} oracle calls above 4 tau = {cap}", t.oracle_calls))?;
            max_calls = max_calls.max(t.oracle_calls);
            match t.verdict {
                Verdict::Light => violated |= heavy[i],
                Verdict::Heavy { witness } => {
                    ensure(b.contains(t.queries[witness].coords()), || format!("Heavy witness outside {b:?}"))?;
                }
            }
            if heavy[i] {
                heavy_runs += 1;
                heavy_hits += usize::from(matches!(t.verdict, Verdict::Heavy { .. }));
            }
        }
        bad_rebuilds += usize::from(violated);
    }
    ensure(bad_rebuilds as f64 <= phi * rebuilds as f64, || {
        format!("{bad_rebuilds}/{rebuilds} rebuilds call a heavy body light")
    })?;
    ensure(heavy_hits as f64 >= 0.9 * heavy_runs as f64, || {
        format!("heavy bodies found in {heavy_hits}/{heavy_runs}")
    })?;
    Ok(format!("bad rebuilds {bad_rebuilds}/{rebuilds}, heavy found {heavy_hits}/{heavy_runs}, max calls {max_calls}"))
}

// ---------------------------------------------------------------- criterion 9

fn criterion_9() -> Check {
    let (eps, phi) = (0.25, 0.1);
    let p = generate(PointDistribution::UniformSquare, 500, 2, 900).unwrap();
    let mut rng = seeded_rng(901);
    let bodies: Vec<Body> = (0..50)
        .map(|i| {
            if i % 2 == 0 {
                random_heavy_polygon(&p, eps, &mut rng).unwrap()
            } else {
                random_subset_polygon(&p, eps, &mut rng).unwrap()
            }
        })
        .collect();
    let members: Vec<PointSet> = bodies.iter().map(|b| p.filter(|x| b.contains(x)).unwrap()).collect();
    ensure(members.iter().all(|c| c.len() as f64 >= eps * p.len() as f64), || "battery body below eps n".into())?;

    let rebuilds = 10;
    let (mut stab_ok, mut center_ok, mut max_iter) = (0, 0, 0);
    for r in 0..rebuilds {
        let net = build_weak_eps_net(&p, eps, phi, trial_seed(910, r)).map_err(|e| e.to_string())?;
        let stabbed = bodies.iter().all(|b| net.points().iter().any(|x| b.contains(x)));
        stab_ok += usize::from(stabbed);
        let mut all = true;
        for c in &members {
            match net.verify(&p, c) {
                Ok(out) => {
                    max_iter = max_iter.max(out.iterations);
                    let depth = tukey_depth_exact(c, out.point.coords()).unwrap().depth;
                    all &= out.iterations <= out.tau
                        && depth as f64 >= out.beta * c.len() as f64
                        && net.universal.contains_candidate(out.point.coords());
                }
                Err(_) => all = false,
            }
        }
        center_ok += usize::from(all);
    }
    let need = (1.0 - phi) * rebuilds as f64;
    ensure(stab_ok as f64 >= need, || format!("weak net stabbed every body in {stab_ok}/{rebuilds} rebuilds"))?;
    ensure(center_ok as f64 >= need, || format!("center net certified every body in {center_ok}/{rebuilds} rebuilds"))?;
    Ok(format!("weak net {stab_ok}/{rebuilds}, center net {center_ok}/{rebuilds}, max iterations {max_iter}"))
}

// --------------------------------------------------------------- criterion 10

fn criterion_10() -> Check {
    let dir = std::env::temp_dir().join(format!("radon-center-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let exe = env!("CARGO_BIN_EXE_radon-center");
    let run = |args: &[&str], threads: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(exe).args(args).env("APP_THREADS", threads).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    let path = |name: &str| dir.join(name).to_str().unwrap().to_owned();
    let (plane, square, cube) = (path("plane.csv"), path("square.csv"), path("cube.csv"));
    std::fs::write(&plane, run(&["gen", "--dist", "gaussian-mixture", "--n", "3000", "--d", "2", "--seed", "1"], "1")?)
        .map_err(|e| e.to_string())?;
    std::fs::write(&square, run(&["gen", "--dist", "uniform-square", "--n", "400", "--d", "2", "--seed", "2"], "1")?)
        .map_err(|e| e.to_string())?;
    std::fs::write(&cube, run(&["gen", "--dist", "ball", "--n", "1000", "--d", "3", "--seed", "3"], "1")?)
        .map_err(|e| e.to_string())?;
    let net = path("net.json");
    std::fs::write(&net, run(&["funcnet", "build", "--input", &plane, "--eps", "0.1", "--seed", "4"], "1")?)
        .map_err(|e| e.to_string())?;

    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "--dist", "clustered", "--n", "500", "--d", "3", "--seed", "5"],
        vec!["depth", "--input", &plane, "--query", "1,1", "--method", "sampled", "--seed", "6"],
        vec!["centerpoint", "--input", &plane, "--eps-b", "0.5", "--seed", "7", "--verify"],
        vec!["urn-sim", "--n", "512", "--trials", "16", "--seed", "8"],
        vec![
            "walk-sim",
            "--start",
            "10",
            "--top",
            "40",
            "--eps-w",
            "0.125",
            "--trials",
            "2000",
            "--seed",
            "9",
            "--per-trial",
        ],
        vec!["lower-bound", "--input", &cube, "--function", "l1:0.2,0.1,0", "--seed", "10", "--verify"],
        vec!["funcnet", "build", "--input", &plane, "--eps", "0.1", "--seed", "11"],
        vec!["funcnet", "query", "--net", &net, "--body", "ball:0,0,1", "--seed", "12"],
        vec!["weak-net", "--input", &square, "--eps", "0.25", "--seed", "13"],
        vec![
            "center-net",
            "verify",
            "--input",
            &square,
            "--eps",
            "0.25",
            "--seed",
            "13",
            "--body",
            "ball:0.5,0.5,0.35",
        ],
    ];
    for args in &commands {
        let a = run(args, "1")?;
        let b = run(args, "8")?;
        let c = run(args, "8")?;
        ensure(!a.is_empty() && a == b && b == c, || format!("{} output differs across runs", args[..2].join(" ")))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} subcommands byte-identical at APP_THREADS 1, 8, 8", commands.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "Radon validity", 10, criterion_1),
        (2, "binomial tail lemma grid", 5, criterion_2),
        (3, "two-red probability bounds", 5, criterion_3),
        (4, "walk lemmas", 60, criterion_4),
        (5, "urn end-to-end", 120, criterion_5),
        (6, "centerpoint quality", 120, criterion_6),
        (7, "lower-bound soundness", 60, criterion_7),
        (8, "functional net battery", 180, criterion_8),
        (9, "weak net and center net", 180, criterion_9),
        (10, "determinism", 120, criterion_10),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (id, name, budget, check) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let budget = Duration::from_secs(budget);
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over the time budget")),
            Err(e) => (false, e),
        };
        failures += usize::from(!ok);
        println!(
            "{} criterion {id:>2} {name} ({:.1} s of {} s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
