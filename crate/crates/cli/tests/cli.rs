use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use radon_center::depth::tukey_depth_exact;
use radon_center::io::parse_points;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_radon-center"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child =
        bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn gen(dir: &Path, name: &str, dist: &str, n: usize, d: usize, seed: u64) -> String {
    let out = run(&["gen", "--dist", dist, "--n", &n.to_string(), "--d", &d.to_string(), "--seed", &seed.to_string()]);
    assert!(out.status.success());
    let path = dir.join(name);
    std::fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn gen_then_depth() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "circle.csv", "circle", 12, 2, 7);
    let out = run(&["depth", "--input", &input, "--query", "0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let env = json(&out);
    assert_eq!(env["schema"], 1);
    assert_eq!(env["command"], "depth");
    assert_eq!(env["result"]["method"], "exact");
    let p = parse_points(&std::fs::read_to_string(&input).unwrap()).unwrap();
    let want = tukey_depth_exact(&p, &[0.0, 0.0]).unwrap().depth;
    assert_eq!(env["result"]["depth"], want);
}

#[test]
fn centerpoint_verify_records_depth() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "u.csv", "uniform-square", 2000, 2, 1);
    let out = run(&["centerpoint", "--input", &input, "--eps-b", "0.5", "--phi", "0.1", "--seed", "1", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let env = json(&out);
    assert_eq!(env["config"]["seed"], 1);
    let v = &env["verification"];
    assert_eq!(v["passed"], true);
    assert!(v["depth"].as_f64().unwrap() >= v["required"].as_f64().unwrap());
    assert_eq!(v["required"], 0.5 * 2000.0 / 16.0);
}

#[test]
fn invalid_eps_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "u.csv", "uniform-square", 50, 2, 1);
    let target = dir.path().join("out.json");
    let out = run(&["centerpoint", "--input", &input, "--eps-b", "1.5", "--seed", "1", "-o", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    assert!(!target.exists());
    assert!(out.stdout.is_empty());
    assert_eq!(run(&["nonsense"]).status.code(), Some(64));
}

#[test]
fn sampled_depth_needs_a_seed() {
    let out = run_stdin(&["depth", "--input", "-", "--query", "0,0", "--method", "sampled"], "1,1\n-1,-1\n");
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "u.csv", "uniform-square", 500, 2, 1);
    let out = run(&["weak-net", "--input", &input, "--eps", "0.2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds 64"));
    assert!(out.stdout.is_empty());
    let out = run_stdin(&["radon", "--input", "-"], "0,0\n1,0\n");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_verification_exits_two_with_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "c.csv", "circle", 100, 2, 1);
    let out = run(&["centerpoint", "--input", &input, "--eps-b", "0.5", "--c-t", "1e-9", "--seed", "1", "--verify"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verification"]["passed"], false);
}

#[test]
fn stdin_points() {
    let out = run_stdin(&["radon", "--input", "-"], "0,0\n1,0\n0,1\n1,1\n");
    assert_eq!(out.status.code(), Some(0));
    let p = &json(&out)["result"]["point"];
    assert!((p[0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((p[1].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn funcnet_round_trip_through_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "g.csv", "gaussian-mixture", 3000, 2, 1);
    let net = dir.path().join("net.json");
    let net = net.to_str().unwrap();
    let out = run(&["funcnet", "build", "--input", &input, "--eps", "0.1", "--seed", "5", "-o", net]);
    assert_eq!(out.status.code(), Some(0));
    let out =
        run(&["funcnet", "query", "--net", net, "--body", "ball:0,0,1", "--seed", "6", "--input", &input, "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let env = json(&out);
    assert!(env["result"]["verdict"]["heavy"].is_object());
    assert_eq!(env["verification"]["passed"], true);
    let out = run(&["funcnet", "query", "--net", net, "--body", "slab:1,0,100,101", "--seed", "6"]);
    assert_eq!(json(&out)["result"]["verdict"], "light");
}

#[test]
fn lower_bound_function_forms() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "b.csv", "ball", 400, 3, 2);
    let fpath = dir.path().join("f.json");
    std::fs::write(&fpath, r#"{"kind":"l-inf","center":[0.5,0,0]}"#).unwrap();
    let at = format!("@{}", fpath.display());
    for f in ["quadratic:1,1,1", "l1:-1,0,0.5", r#"{"kind":"linear","a":[1,2,3]}"#, at.as_str()] {
        let out = run(&["lower-bound", "--input", &input, "--function", f, "--seed", "3", "--verify"]);
        assert_eq!(out.status.code(), Some(0), "{f}: {}", String::from_utf8_lossy(&out.stderr));
        let env = json(&out);
        let v = &env["verification"];
        assert!(v["value"].as_f64().unwrap() <= v["exact_min"].as_f64().unwrap() + 1e-12);
    }
    let out = run(&["lower-bound", "--input", &input, "--function", "quadratic:1,1", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn urn_sim_levels_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("levels.csv");
    let out = run(&["urn-sim", "--n", "300", "--trials", "4", "--seed", "9", "--levels-csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let env = json(&out);
    let trials = env["result"]["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 4);
    let total: u64 = trials.iter().map(|t| t["total_iterations"].as_u64().unwrap()).sum();
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("level,dwell,visits"));
    let dwell: u64 = lines.map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(dwell, total);
}

#[test]
fn center_net_verify_from_seed_and_sample() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "u.csv", "uniform-square", 300, 2, 4);
    let out = run(&["weak-net", "--input", &input, "--eps", "0.25", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let sample = serde_json::to_string(&json(&out)["result"]["sample"]).unwrap();
    let spath = dir.path().join("sample.json");
    std::fs::write(&spath, sample).unwrap();
    let body = "ball:0.5,0.5,0.35";
    let a = run(&["center-net", "verify", "--input", &input, "--eps", "0.25", "--seed", "2", "--body", body]);
    let b = run(&[
        "center-net",
        "verify",
        "--input",
        &input,
        "--eps",
        "0.25",
        "--sample",
        spath.to_str().unwrap(),
        "--body",
        body,
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(json(&a)["result"], json(&b)["result"]);
    assert_eq!(json(&a)["verification"]["passed"], true);
}

#[test]
fn envelopes_are_byte_identical_across_thread_counts() {
    let args =
        ["walk-sim", "--start", "5", "--top", "10", "--eps-w", "0.2", "--trials", "500", "--seed", "11", "--per-trial"];
    let outs: Vec<Vec<u8>> =
        ["1", "8", "8"].iter().map(|t| bin().args(args).env("APP_THREADS", t).output().unwrap().stdout).collect();
    assert!(!outs[0].is_empty());
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[1], outs[2]);
    let bad = bin().args(args).env("APP_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn timing_is_opt_in() {
    let input = "0,0\n1,0\n0,1\n1,1\n";
    assert!(json(&run_stdin(&["radon", "--input", "-"], input)).get("wall_time_ms").is_none());
    assert!(json(&run_stdin(&["radon", "--input", "-", "--timing"], input))["wall_time_ms"].is_number());
}
