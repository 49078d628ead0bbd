use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tobin_core::commands::{self, csv_path};
use tobin_core::config::{parse_model_choice, read_config};
use tobin_core::{ConfigError, Error, RunConfig};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_IO: u8 = 3;

/// Supply-shock scenarios for the quantity-adjustment (TMIA) and
/// price-adjustment (TMIIA) models.
#[derive(Debug, Parser)]
#[command(name = "tobin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the rest point in force before the shock.
    Stability(Common),
    /// Integrate the scenario; writes trajectory CSV and a prediction report.
    Simulate(Common),
    /// Tabulate where the two models' predictions differ.
    Compare(Common),
    /// Stability and short-run signs over seeded random parameter draws.
    Sweep(Common),
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Override `model`: TMIA, TMIIA or both.
    #[arg(long)]
    model: Option<String>,

    /// Override `run.horizon`.
    #[arg(long)]
    horizon: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_) | Error::InvalidParameter { .. } => EXIT_CONFIG,
            Error::Io { .. } => EXIT_IO,
            _ => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(target: &str, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("cannot write {target}: {e}"),
    }
}

fn load(args: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = read_config(&args.config)?;
    if let Some(m) = &args.model {
        cfg.set_model(parse_model_choice(m)?);
    }
    if let Some(h) = args.horizon {
        cfg.set_horizon(h)?;
    }
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn write_file(path: &str, text: &str) -> Result<(), Failure> {
    std::fs::write(Path::new(path), text).map_err(|e| io_failure(path, e))
}

fn write_stdout(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| io_failure("stdout", e))
}

/// JSON goes to `output.json` when set, otherwise to stdout.
fn emit_json(cfg: &RunConfig, json: &str) -> Result<(), Failure> {
    match &cfg.output.json {
        Some(path) => write_file(path, json),
        None => write_stdout(json),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Stability(args) => {
            let cfg = load(&args)?;
            emit_json(&cfg, &commands::stability(&cfg)?)
        }
        Command::Compare(args) => {
            let cfg = load(&args)?;
            emit_json(&cfg, &commands::compare(&cfg)?)
        }
        Command::Sweep(args) => {
            let cfg = load(&args)?;
            emit_json(&cfg, &commands::sweep(&cfg)?)
        }
        Command::Simulate(args) => {
            let cfg = load(&args)?;
            let out = commands::simulate(&cfg)?;
            match &cfg.output.csv {
                Some(base) => {
                    let several = out.csv.len() > 1;
                    for (kind, text) in &out.csv {
                        write_file(&csv_path(base, *kind, several), text)?;
                    }
                    emit_json(&cfg, &out.json)
                }
                // Without a CSV path the trajectory owns stdout.
                None => {
                    for (_, text) in &out.csv {
                        write_stdout(text)?;
                    }
                    match &cfg.output.json {
                        Some(path) => write_file(path, &out.json),
                        None => {
                            eprintln!("note: set output.json to keep the prediction report");
                            Ok(())
                        }
                    }
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
