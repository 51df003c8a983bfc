use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bellzones::optimize::Budget;
use bellzones::scan::AngleRange;
use bellzones::StateParam;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    #[default]
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format `{other}` (expected csv or text)")),
        }
    }
}

/// Values that can come from a config file or from flags. `None` means
/// "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub angle_range: Option<AngleRange>,
    pub starts: Option<usize>,
    pub iterations: Option<usize>,
    pub tolerance: Option<f64>,
}

impl Overrides {
    /// Fields set in `self` win over `base`.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            alpha: self.alpha.or(base.alpha),
            samples: self.samples.or(base.samples),
            seed: self.seed.or(base.seed),
            workers: self.workers.or(base.workers),
            format: self.format.or(base.format),
            output: self.output.or(base.output),
            angle_range: self.angle_range.or(base.angle_range),
            starts: self.starts.or(base.starts),
            iterations: self.iterations.or(base.iterations),
            tolerance: self.tolerance.or(base.tolerance),
        }
    }
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub state: StateParam,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub angle_range: AngleRange,
    pub budget: Budget,
}

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl Settings {
    pub fn resolve(o: Overrides) -> Result<Settings, CliError> {
        let defaults = Budget::default();
        let state = StateParam::new(o.alpha.unwrap_or(FRAC_PI_4))
            .map_err(|e| CliError::Usage(format!("alpha: {e}")))?;
        let samples = o.samples.unwrap_or(DEFAULT_SAMPLES);
        let workers = o.workers.unwrap_or_else(default_workers);
        let budget = Budget {
            starts: o.starts.unwrap_or(defaults.starts),
            iterations: o.iterations.unwrap_or(defaults.iterations),
            tolerance: o.tolerance.unwrap_or(defaults.tolerance),
        };
        let positive = [
            ("samples", samples == 0),
            ("workers", workers == 0),
            ("starts", budget.starts == 0),
            ("iterations", budget.iterations == 0),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, bad)| *bad) {
            return Err(CliError::Usage(format!("{name} must be at least 1")));
        }
        if !(budget.tolerance.is_finite() && budget.tolerance >= 0.0) {
            return Err(CliError::Usage(
                "tolerance must be a non-negative number".into(),
            ));
        }
        Ok(Settings {
            state,
            samples,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            workers,
            format: o.format.unwrap_or_default(),
            output: o.output,
            angle_range: o.angle_range.unwrap_or_default(),
            budget,
        })
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str, expected: &str) -> Result<T, String> {
    raw.parse()
        .map_err(|_| format!("key `{key}` expects {expected}, got `{raw}`"))
}

/// Parses `key=value` lines. `#` starts a comment; blank lines are ignored.
pub fn parse_config(text: &str) -> Result<Overrides, String> {
    let mut o = Overrides::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| format!("line {}: {msg}", n + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at(format!("expected key=value, got `{line}`")))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let k = key.as_str();
        match k {
            "alpha" => o.alpha = Some(parse_value(k, value, "a number").map_err(at)?),
            "tolerance" => o.tolerance = Some(parse_value(k, value, "a number").map_err(at)?),
            "samples" => {
                o.samples = Some(parse_value(k, value, "an unsigned integer").map_err(at)?)
            }
            "seed" => o.seed = Some(parse_value(k, value, "an unsigned integer").map_err(at)?),
            "workers" => {
                o.workers = Some(parse_value(k, value, "an unsigned integer").map_err(at)?)
            }
            "starts" => o.starts = Some(parse_value(k, value, "an unsigned integer").map_err(at)?),
            "iterations" => {
                o.iterations = Some(parse_value(k, value, "an unsigned integer").map_err(at)?)
            }
            "format" => o.format = Some(parse_value(k, value, "csv or text").map_err(at)?),
            "angle_range" => {
                o.angle_range = Some(parse_value(k, value, "half or full").map_err(at)?)
            }
            "output" => o.output = Some(PathBuf::from(value)),
            other => return Err(at(format!("unknown key `{other}`"))),
        }
    }
    Ok(o)
}

pub fn load_config(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
