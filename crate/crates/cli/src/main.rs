//! `slm`: JSON in, JSON or SVG out.
//!
//! Exit codes: 0 success, 2 validation error, 3 numeric failure. Errors are
//! reported on stderr as `{"schema": "slm/1", "error": {"kind", "message"}}`.

mod commands;
mod input;
mod plot;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use slm_core::json::SCHEMA;

#[derive(Parser, Debug)]
#[command(name = "slm", version, about = "Likelihood geometry of squared linear models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Regions of the arrangement with exact witnesses.
    Regions,
    /// Characteristic polynomial of the matroid.
    Charpoly,
    /// ML degree and characteristic polynomial.
    Mldegree,
    /// One critical point per region for data "s".
    Mle,
    /// Closed-form critical points at the unit data vector of --anchor.
    Degenerate,
    /// Tropical predictions for valuations "w"; path estimates with --eps-grid.
    Tropical,
    /// Log-normal polytope of "x" or "y", its dual and swap candidates.
    Lognormal,
    /// Chamber arrangement; combinatorial type scan with --samples.
    Chamber,
    /// Log-Voronoi scan along "segment" in the log-normal polytope of "x" or "y".
    Voronoi,
    /// Determinantal point process: "Theta", or "Theta_fixed" with "k", "n".
    Dpp,
    /// Linear forms and quadratic minors cutting out the model.
    Ideal,
    /// Subspaces on which the parametrization is not injective.
    Singular,
    /// SVG drawing of the arrangement with overlays.
    Plot,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Input JSON file; stdin when absent or "-".
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Gradient-norm tolerance for Newton solves.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// 1-based anchor state.
    #[arg(long, global = true)]
    anchor: Option<usize>,
    /// Decreasing ε values in (0, 1), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    eps_grid: Option<Vec<f64>>,
    /// Sample count: type-scan points per region, or Voronoi steps.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// SVG destination for `plot`; the JSON summary then goes to --output.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Core(slm_core::Error),
    /// Malformed input or options.
    Invalid { kind: &'static str, message: String },
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError::Invalid { kind: "InvalidInput", message: message.into() }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }

    fn report(&self) -> serde_json::Value {
        let (kind, message) = match self {
            CliError::Core(e) => (e.kind(), e.to_string()),
            CliError::Invalid { kind, message } => (*kind, message.clone()),
        };
        json!({"schema": SCHEMA, "error": {"kind": kind, "message": message}})
    }
}

impl From<slm_core::Error> for CliError {
    fn from(e: slm_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command produced.
pub enum Output {
    Json(serde_json::Value),
    Svg { svg: String, summary: serde_json::Value },
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("SLM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Invalid { kind: "InvalidOption", message: format!("SLM_THREADS must be a positive integer, got {raw:?}") })?;
    // a pool that is already built keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn write_to(path: Option<&PathBuf>, bytes: &[u8]) -> CliResult<()> {
    let io_err = |e: std::io::Error| CliError::Invalid { kind: "Io", message: e.to_string() };
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(io_err),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(io_err)
        }
    }
}

fn render(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s.into_bytes()
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let opts = &cli.opts;
    commands::validate(cli.command, opts)?;
    let doc = input::read_document(opts.input.as_ref())?;
    match commands::dispatch(cli.command, &doc, opts)? {
        Output::Json(v) => write_to(opts.output.as_ref(), &render(&v)),
        Output::Svg { svg, summary } => match &opts.svg {
            Some(path) => {
                write_to(Some(path), svg.as_bytes())?;
                write_to(opts.output.as_ref(), &render(&summary))
            }
            None => write_to(opts.output.as_ref(), svg.as_bytes()),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_owned();
            let err = CliError::Invalid { kind: "InvalidOption", message };
            eprintln!("{}", err.report());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}
