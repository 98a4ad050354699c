use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use radon_center::gen::PointDistribution;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "radon-center", version, about = "Approximate centerpoints via iterated Radon points")]
pub struct Cli {
    /// Where to write the result; `-` is stdout.
    #[arg(long, short, global = true, default_value = "-")]
    pub output: String,
    /// Record wall time in the envelope (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timing: bool,
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Radon partition of exactly d + 2 points.
    Radon(RadonArgs),
    /// Tukey depth of a query point.
    Depth(DepthArgs),
    /// Approximate centerpoint by iterated Radon points.
    Centerpoint(CenterpointArgs),
    /// Monte Carlo runs of Radon's urn.
    UrnSim(UrnArgs),
    /// Monte Carlo runs of the biased walk.
    WalkSim(WalkArgs),
    /// Lower bound on the minimum of a convex function over the input points.
    LowerBound(LowerBoundArgs),
    /// Functional nets.
    #[command(subcommand)]
    Funcnet(FuncnetCommand),
    /// Weak epsilon-net from a small sample (d = 2).
    WeakNet(WeakNetArgs),
    /// Center-net certification (d = 2).
    #[command(subcommand)]
    CenterNet(CenterNetCommand),
    /// Synthetic point sets.
    Gen(GenArgs),
}

#[derive(Subcommand, Debug)]
pub enum FuncnetCommand {
    Build(FuncnetBuildArgs),
    Query(FuncnetQueryArgs),
}

#[derive(Subcommand, Debug)]
pub enum CenterNetCommand {
    Verify(CenterNetVerifyArgs),
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct Coords(pub Vec<f64>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
pub struct RadonArgs {
    /// Point file (CSV or JSON); `-` reads stdin.
    #[arg(long)]
    pub input: String,
}

#[derive(Args, Debug, Serialize)]
pub struct DepthArgs {
    #[arg(long)]
    pub input: String,
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    pub query: Coords,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: Method,
    #[arg(long, default_value_t = 10_000, value_parser = positive_usize)]
    pub directions: usize,
    /// Required with `--method sampled`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct CenterpointArgs {
    #[arg(long)]
    pub input: String,
    #[arg(long, value_parser = open_unit)]
    pub eps_b: f64,
    #[arg(long, default_value_t = 0.1, value_parser = open_unit)]
    pub phi: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = radon_center::centerpoint::DEFAULT_C_S, value_parser = positive)]
    pub c_s: f64,
    #[arg(long, default_value_t = radon_center::centerpoint::DEFAULT_C_T, value_parser = positive)]
    pub c_t: f64,
    /// Check the depth of the output against (1 - eps_b) n / (d + 2)^2.
    #[arg(long)]
    pub verify: bool,
    /// Random directions tried by the refuter when d > 3.
    #[arg(long, default_value_t = 10_000, value_parser = positive_usize)]
    pub directions: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct UrnArgs {
    /// Balls in the urn; defaults to the smallest n meeting the failure bound.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 4)]
    pub t: u32,
    #[arg(long, default_value_t = 1.0 / 6.0, value_parser = eps_w)]
    pub eps_w: f64,
    #[arg(long, default_value_t = 0.5, value_parser = open_unit)]
    pub eps_a: f64,
    /// Failure probability used to size the urn.
    #[arg(long, default_value_t = 0.1, value_parser = open_unit)]
    pub phi: f64,
    /// Initial red count; defaults to floor((1 - eps_a) r_max).
    #[arg(long)]
    pub r0: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = positive_u64)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000_000)]
    pub max_iterations: u64,
    /// Writes `level,dwell,visits` summed over all trials.
    #[arg(long)]
    pub levels_csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct WalkArgs {
    #[arg(long)]
    pub start: u64,
    #[arg(long)]
    pub top: u64,
    #[arg(long, value_parser = eps_w)]
    pub eps_w: f64,
    /// Failure probability for the visits bound.
    #[arg(long, default_value_t = 0.1, value_parser = open_unit)]
    pub phi: f64,
    #[arg(long, default_value_t = 1, value_parser = positive_u64)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000_000)]
    pub max_steps: u64,
    /// Include one record per trial in the result.
    #[arg(long)]
    pub per_trial: bool,
    /// Writes `level,visits` summed over all trials.
    #[arg(long)]
    pub levels_csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct LowerBoundArgs {
    #[arg(long)]
    pub input: String,
    /// `kind:coords` (linear, quadratic, l1, linf), inline JSON, or `@file`.
    #[arg(long, allow_hyphen_values = true)]
    pub function: String,
    #[arg(long, value_parser = positive)]
    pub c_quality: Option<f64>,
    #[arg(long, value_parser = positive_usize)]
    pub stop_size: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    /// Compare against the exact minimum over the input.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct FuncnetBuildArgs {
    #[arg(long)]
    pub input: String,
    #[arg(long, value_parser = open_unit)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1, value_parser = open_unit)]
    pub phi: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub c_s: f64,
    #[arg(long, default_value_t = radon_center::funcnet::DEFAULT_C_TAU, value_parser = positive)]
    pub c_tau: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct FuncnetQueryArgs {
    /// Net file written by `funcnet build` (envelope or bare net).
    #[arg(long)]
    pub net: String,
    /// `ball:...`, `slab:...`, `ellipsoid:...`, `polygon:...`, `empty:d` or `polytope:FILE`.
    #[arg(long, allow_hyphen_values = true)]
    pub body: String,
    #[arg(long)]
    pub seed: u64,
    /// Original point set; enables `--verify`.
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long, requires = "input")]
    pub verify: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct WeakNetArgs {
    #[arg(long)]
    pub input: String,
    #[arg(long, value_parser = positive)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1, value_parser = open_unit)]
    pub phi: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = radon_center::centernet::DEFAULT_C_S, value_parser = positive)]
    pub c_s: f64,
    /// Writes every net point as CSV.
    #[arg(long)]
    pub net_csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CenterNetVerifyArgs {
    #[arg(long)]
    pub input: String,
    #[arg(long, allow_hyphen_values = true)]
    pub body: String,
    #[arg(long, value_parser = positive)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1, value_parser = open_unit)]
    pub phi: f64,
    /// Sample the net is built from; when absent it is drawn with `--seed`.
    #[arg(long)]
    pub sample: Option<String>,
    #[arg(long, required_unless_present = "sample")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = radon_center::centernet::DEFAULT_C_S, value_parser = positive)]
    pub c_s: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_dist)]
    pub dist: PointDistribution,
    #[arg(long, value_parser = positive_usize)]
    pub n: usize,
    #[arg(long, value_parser = positive_usize)]
    pub d: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn open_unit(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1)"))
    }
}

fn eps_w(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v < 0.5 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1/2)"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not positive"))
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(format!("{s:?}: {e}")),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    positive_usize(s).map(|v| v as u64)
}

fn parse_coords(s: &str) -> Result<Coords, String> {
    radon_center::io::parse_point(s).map(Coords).map_err(|e| e.to_string())
}

fn parse_dist(s: &str) -> Result<PointDistribution, String> {
    s.parse().map_err(|e: radon_center::Error| e.to_string())
}
