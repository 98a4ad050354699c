//! `radon-center` command-line front end.
//!
//! Every subcommand except `gen` prints a JSON envelope:
//!
//! ```json
//! {"schema": 1, "tool": "radon-center", "version": "...", "command": "depth",
//!  "config": {...}, "result": {...}, "verification": {...}}
//! ```
//!
//! Exit codes: 0 success, 1 domain or input error, 2 verification failure,
//! 64 usage error. `APP_THREADS` sets the number of worker threads used for
//! trial batches; results do not depend on it.

mod args;
mod commands;

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use args::{CenterNetCommand, Cli, Command, FuncnetCommand};
use commands::{CliError, Inputs, Outcome, Output, Verification};

const SCHEMA: u32 = 1;
const EXIT_DOMAIN: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: Value,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<Verification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

fn threads() -> Result<usize, String> {
    match std::env::var("APP_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("APP_THREADS must be a positive integer, got {s:?}")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn dispatch(cmd: &Command, io: &mut Inputs) -> Result<(&'static str, Value, Outcome), CliError> {
    fn cfg(a: &impl Serialize) -> Value {
        serde_json::to_value(a).expect("arguments always serialize")
    }
    Ok(match cmd {
        Command::Radon(a) => ("radon", cfg(a), commands::radon(a, io)?),
        Command::Depth(a) => ("depth", cfg(a), commands::depth(a, io)?),
        Command::Centerpoint(a) => ("centerpoint", cfg(a), commands::centerpoint(a, io)?),
        Command::UrnSim(a) => ("urn-sim", cfg(a), commands::urn_sim(a)?),
        Command::WalkSim(a) => ("walk-sim", cfg(a), commands::walk_sim(a)?),
        Command::LowerBound(a) => ("lower-bound", cfg(a), commands::lower_bound(a, io)?),
        Command::Funcnet(FuncnetCommand::Build(a)) => ("funcnet build", cfg(a), commands::funcnet_build(a, io)?),
        Command::Funcnet(FuncnetCommand::Query(a)) => ("funcnet query", cfg(a), commands::funcnet_query(a, io)?),
        Command::WeakNet(a) => ("weak-net", cfg(a), commands::weak_net(a, io)?),
        Command::CenterNet(CenterNetCommand::Verify(a)) => {
            ("center-net verify", cfg(a), commands::center_net_verify(a, io)?)
        }
        Command::Gen(a) => ("gen", cfg(a), commands::gen(a)?),
    })
}

fn write_output(path: &str, text: &str, stdout: &mut dyn Write) -> io::Result<()> {
    if path == "-" {
        stdout.write_all(text.as_bytes())?;
        stdout.flush()
    } else {
        fs::write(path, text)
    }
}

/// Parses `argv`, runs the subcommand and writes its output. Nothing is
/// written when the command fails.
fn run(argv: Vec<String>, stdin: &mut (dyn Read + Send), stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => EXIT_USAGE,
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new().filter_level(level).target(env_logger::Target::Stderr).try_init();

    let pool = match threads()
        .and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| e.to_string()))
    {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };

    let start = Instant::now();
    let mut io = Inputs::new(stdin);
    let (command, config, outcome) = match pool.install(|| dispatch(&cli.command, &mut io)) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Lib(radon_center::Error::AssertionFailure(_)) => EXIT_VERIFY,
                CliError::Lib(_) => EXIT_DOMAIN,
            };
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;

    let mut failed = false;
    let text = match outcome.output {
        Output::Raw(text) => text,
        Output::Envelope { result, verification } => {
            failed = verification.as_ref().is_some_and(|v| !v.passed);
            let env = Envelope {
                schema: SCHEMA,
                tool: "radon-center",
                version: env!("CARGO_PKG_VERSION"),
                command,
                config,
                result,
                verification,
                wall_time_ms: cli.timing.then_some(elapsed),
            };
            serde_json::to_string_pretty(&env).expect("envelopes always serialize") + "\n"
        }
    };
    let written = outcome
        .files
        .iter()
        .try_for_each(|(path, contents)| fs::write(path, contents))
        .and_then(|()| write_output(&cli.output, &text, stdout));
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_DOMAIN;
    }
    if failed {
        let _ = writeln!(stderr, "verification failed");
        return EXIT_VERIFY;
    }
    0
}

fn main() -> ExitCode {
    let code = run(std::env::args().collect(), &mut io::stdin(), &mut io::stdout().lock(), &mut io::stderr());
    ExitCode::from(code)
}
