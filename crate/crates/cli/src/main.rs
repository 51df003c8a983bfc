use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bellzones::optimize::{GoalKind, TripleMode};
use bellzones::scan::AngleRange;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod table;

use config::{Format, Overrides, Settings};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config values or inputs; exit code 2.
    Usage(String),
    /// I/O or computation failure; exit code 1.
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<bellzones::Error> for CliError {
    fn from(e: bellzones::Error) -> Self {
        match e {
            bellzones::Error::Domain(_) | bellzones::Error::Config(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

/// Correlative and entropic CHSH zones for cos α|00⟩ + sin α|11⟩ measured
/// in the Y–Z plane. All angles are in radians.
#[derive(Debug, Parser)]
#[command(name = "bellzones", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// State parameter α in [0, π/4] [default: π/4]
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Monte Carlo sample count [default: 1000000]
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// RNG seed [default: 1]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads [default: available cores]
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output format: csv or text [default: text]
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Write the result here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Angle sampling interval: half = [0, π), full = [0, 2π) [default: half]
    #[arg(long, global = true)]
    angle_range: Option<AngleRange>,
    /// Optimizer starts [default: 256]
    #[arg(long, global = true)]
    starts: Option<usize>,
    /// Optimizer iterations per start [default: 500]
    #[arg(long, global = true)]
    iterations: Option<usize>,
    /// Optimizer convergence tolerance [default: 1e-10]
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// key=value file with defaults for the flags above; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            alpha: self.alpha,
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
            format: self.format,
            output: self.output.clone(),
            angle_range: self.angle_range,
            starts: self.starts,
            iterations: self.iterations,
            tolerance: self.tolerance,
        }
    }
}

#[derive(Debug, Args)]
struct AnglesArg {
    /// θ0,θ1,θ0′,θ1′
    #[arg(long, value_parser = parse_angles, allow_hyphen_values = true)]
    angles: [f64; 4],
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    /// chsh,chsh_e,zone for every emitted sample
    #[arg(long)]
    emit_points: Option<PathBuf>,
    /// Same columns for zone-3 samples only
    #[arg(long)]
    emit_zone3: Option<PathBuf>,
    /// Correlators of samples with chsh_e > 0
    #[arg(long)]
    emit_e_violating: Option<PathBuf>,
    /// Correlators of samples with chsh > 2
    #[arg(long)]
    emit_c_violating: Option<PathBuf>,
    /// Emit only every n-th sample
    #[arg(long, default_value_t = 1)]
    emit_every: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Zone fractions of a random scan
    Scan {
        #[command(flatten)]
        emit: EmitArgs,
    },
    /// Zone fractions over a grid of α
    SweepAlpha {
        /// Comma-separated α values; overrides --steps
        #[arg(long, value_parser = parse_alphas)]
        alphas: Option<AlphaList>,
        /// Grid points evenly spaced on [0, π/4]
        #[arg(long, default_value_t = 9)]
        steps: usize,
    },
    /// Multi-start maximization of one objective
    Optimize {
        /// max_chsh, max_chsh_e, max_chsh_in_zone3 or min_chsh_e_at_max_chsh
        #[arg(long, default_value = "max_chsh")]
        goal: GoalKind,
        /// Number of inequivalent maximizers to report
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Minimum distance between reported maximizers
        #[arg(long, default_value_t = 0.1)]
        distinctness: f64,
    },
    /// Largest chsh among e-contextual settings
    Boundary,
    /// Evaluate one setting under class 1
    Classify {
        #[command(flatten)]
        angles: AnglesArg,
    },
    /// Canonical inequalities on all scenario-preserving relabelings
    Permute {
        #[command(flatten)]
        angles: AnglesArg,
        /// Party assignment class 1, 2 or 3
        #[arg(long, default_value_t = 1)]
        class: u8,
    },
    /// Evaluate one setting under all three party assignments
    Classes {
        #[command(flatten)]
        angles: AnglesArg,
    },
    /// Settings violating the entropic inequality under every class
    SearchTriple {
        /// e_only or both
        #[arg(long, default_value = "e_only")]
        mode: TripleMode,
        /// Extra start θ0,θ1,θ0′,θ1′; repeatable
        #[arg(long, value_parser = parse_angles, allow_hyphen_values = true)]
        near: Vec<[f64; 4]>,
    },
    /// Simulate a run log of single-shot records
    SimulateRuns {
        #[command(flatten)]
        angles: AnglesArg,
        /// Number of runs
        #[arg(long, default_value_t = 1_000_000)]
        runs: usize,
    },
    /// Plug-in estimates from a run log
    Estimate {
        /// Run log path; standard input when absent
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Evaluate the extremal settings table
    Table1,
    /// Zone fractions at α = π/4
    Table2,
    /// Three-class evaluation table
    Table3,
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{p}` is not a number"))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct AlphaList(pub Vec<f64>);

fn parse_alphas(s: &str) -> Result<AlphaList, String> {
    parse_list(s).map(AlphaList)
}

fn parse_angles(s: &str) -> Result<[f64; 4], String> {
    let v = parse_list(s)?;
    <[f64; 4]>::try_from(v.as_slice())
        .map_err(|_| format!("expected 4 comma-separated angles, got {}", v.len()))
}

fn write_output(settings: &Settings, text: &str) -> Result<(), CliError> {
    match &settings.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| CliError::Runtime(format!("standard output: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(path) => config::load_config(path)?,
        None => Overrides::default(),
    };
    let settings = Settings::resolve(cli.common.overrides().over(file))?;
    let text = commands::execute(&cli.command, &settings)?;
    write_output(&settings, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Runtime(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}
