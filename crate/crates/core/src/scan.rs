//! Seeded Monte Carlo scans over measurement settings.
//!
//! Sample `i` draws its four angles from substream `i` of the seed (see
//! [`crate::rng`]), so a scan's counts and emitted rows are identical for any
//! worker count. Indices are processed in fixed blocks; blocks run in
//! parallel and their results are merged in index order.

use std::f64::consts::{PI, TAU};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::{MeasurementSetting, Observable, StateParam, Trig};
use crate::rng::Substreams;
use crate::scenario::{quad_from_trig, ClassId, PartyAssignment, Zone, ZoneReport};

const BLOCK: u64 = 1 << 15;
const BLOCKS_PER_BATCH: u64 = 64;

/// Interval the four angles are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleRange {
    /// `[0, π)`: the range that reproduces the reference zone proportions.
    #[default]
    Half,
    /// `[0, 2π)`
    Full,
}

impl AngleRange {
    pub fn width(self) -> f64 {
        match self {
            AngleRange::Half => PI,
            AngleRange::Full => TAU,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AngleRange::Half => "half",
            AngleRange::Full => "full",
        }
    }
}

impl std::str::FromStr for AngleRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" | "pi" => Ok(AngleRange::Half),
            "full" | "2pi" => Ok(AngleRange::Full),
            other => Err(Error::Config(format!(
                "angle range must be `half` or `full`, got `{other}`"
            ))),
        }
    }
}

/// Optional figure-data outputs of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct EmitConfig {
    /// `chsh,chsh_e,zone` for every emitted sample.
    pub points: Option<PathBuf>,
    /// Same columns, zone-3 samples only.
    pub zone3_points: Option<PathBuf>,
    /// `e00,e01,e10,e11,chsh,chsh_e` for samples with `chsh_e > 0`.
    pub correlators_e_violating: Option<PathBuf>,
    /// Same columns for samples with `chsh > 2`.
    pub correlators_c_violating: Option<PathBuf>,
    /// Emit only samples whose index is a multiple of this stride.
    pub every: u64,
}

impl Default for EmitConfig {
    fn default() -> Self {
        Self {
            points: None,
            zone3_points: None,
            correlators_e_violating: None,
            correlators_c_violating: None,
            every: 1,
        }
    }
}

impl EmitConfig {
    fn any(&self) -> bool {
        self.points.is_some()
            || self.zone3_points.is_some()
            || self.correlators_e_violating.is_some()
            || self.correlators_c_violating.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub state: StateParam,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub range: AngleRange,
    pub emit: EmitConfig,
}

impl ScanConfig {
    pub fn new(state: StateParam, samples: u64, seed: u64) -> Self {
        Self {
            state,
            samples,
            seed,
            workers: 1,
            range: AngleRange::default(),
            emit: EmitConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.emit.any() && self.emit.every == 0 {
            return Err(Error::Config("emission stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Zone counts of a scan under class 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSummary {
    pub alpha: f64,
    pub samples: u64,
    pub seed: u64,
    pub range: AngleRange,
    /// Indexed by zone 1..=4.
    pub counts: [u64; 4],
    /// Largest `chsh` seen.
    pub max_chsh: f64,
    /// Largest `chsh_e` seen.
    pub max_chsh_e: f64,
    /// Largest `chsh` among zone-3 samples.
    pub max_zone3_chsh: Option<f64>,
}

impl ScanSummary {
    pub fn fractions(&self) -> [f64; 4] {
        let n = self.samples as f64;
        self.counts.map(|c| c as f64 / n)
    }

    pub fn fraction(&self, zone: Zone) -> f64 {
        self.fractions()[zone.index()]
    }
}

/// The setting drawn for sample `index`: four i.i.d. uniform angles.
pub fn sample_setting(
    streams: &Substreams,
    index: u64,
    range: AngleRange,
    state: StateParam,
) -> MeasurementSetting {
    let mut rng = streams.stream(index);
    let width = range.width();
    let obs = [(); 4].map(|_| Observable::new(rng.next_f64() * width).expect("finite angle"));
    MeasurementSetting::from_observables(obs, state)
}

#[derive(Default)]
struct Rows {
    points: Vec<(f64, f64, Zone)>,
    zone3: Vec<(f64, f64, Zone)>,
    e_violating: Vec<([f64; 4], f64, f64)>,
    c_violating: Vec<([f64; 4], f64, f64)>,
}

struct BlockResult {
    counts: [u64; 4],
    max_chsh: f64,
    max_chsh_e: f64,
    max_zone3_chsh: Option<f64>,
    rows: Rows,
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn run_block(cfg: &ScanConfig, streams: &Substreams, start: u64, end: u64) -> BlockResult {
    let class1 = PartyAssignment::canonical(ClassId::One);
    let emit = &cfg.emit;
    let mut out = BlockResult {
        counts: [0; 4],
        max_chsh: f64::NEG_INFINITY,
        max_chsh_e: f64::NEG_INFINITY,
        max_zone3_chsh: None,
        rows: Rows::default(),
    };
    for index in start..end {
        let s = sample_setting(streams, index, cfg.range, cfg.state);
        let trig = s.angles().map(Trig::of);
        let quad = quad_from_trig(&trig, &class1, &s);
        let r = ZoneReport::from_quad(&quad);
        out.counts[r.zone.index()] += 1;
        out.max_chsh = out.max_chsh.max(r.chsh);
        out.max_chsh_e = out.max_chsh_e.max(r.chsh_e);
        if r.zone == Zone::Both {
            out.max_zone3_chsh = max_opt(out.max_zone3_chsh, Some(r.chsh));
        }
        if emit.every == 0 || index % emit.every != 0 {
            continue;
        }
        if emit.points.is_some() {
            out.rows.points.push((r.chsh, r.chsh_e, r.zone));
        }
        if emit.zone3_points.is_some() && r.zone == Zone::Both {
            out.rows.zone3.push((r.chsh, r.chsh_e, r.zone));
        }
        if emit.correlators_e_violating.is_some() && r.chsh_e > 0.0 {
            out.rows
                .e_violating
                .push((quad.correlators(), r.chsh, r.chsh_e));
        }
        if emit.correlators_c_violating.is_some() && r.chsh > 2.0 {
            out.rows
                .c_violating
                .push((quad.correlators(), r.chsh, r.chsh_e));
        }
    }
    out
}

struct Sink {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Sink {
    fn create(path: &Path, header: &str) -> Result<Self> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = File::create(path).map_err(io)?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{header}").map_err(io)?;
        Ok(Self {
            path: path.to_path_buf(),
            out,
        })
    }

    fn io(&self, source: std::io::Error) -> Error {
        Error::Io {
            path: self.path.clone(),
            source,
        }
    }

    fn point(&mut self, (chsh, chsh_e, zone): (f64, f64, Zone)) -> Result<()> {
        writeln!(self.out, "{chsh},{chsh_e},{}", zone.id()).map_err(|e| self.io(e))
    }

    fn correlators(&mut self, (e, chsh, chsh_e): ([f64; 4], f64, f64)) -> Result<()> {
        writeln!(
            self.out,
            "{},{},{},{},{chsh},{chsh_e}",
            e[0], e[1], e[2], e[3]
        )
        .map_err(|err| self.io(err))
    }

    fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| self.io(e))
    }
}

pub const POINTS_HEADER: &str = "chsh,chsh_e,zone";
pub const CORRELATORS_HEADER: &str = "e00,e01,e10,e11,chsh,chsh_e";

struct Sinks {
    points: Option<Sink>,
    zone3: Option<Sink>,
    e_violating: Option<Sink>,
    c_violating: Option<Sink>,
}

impl Sinks {
    fn open(emit: &EmitConfig) -> Result<Self> {
        let open =
            |p: &Option<PathBuf>, header| p.as_deref().map(|p| Sink::create(p, header)).transpose();
        Ok(Self {
            points: open(&emit.points, POINTS_HEADER)?,
            zone3: open(&emit.zone3_points, POINTS_HEADER)?,
            e_violating: open(&emit.correlators_e_violating, CORRELATORS_HEADER)?,
            c_violating: open(&emit.correlators_c_violating, CORRELATORS_HEADER)?,
        })
    }

    fn write(&mut self, rows: Rows) -> Result<()> {
        if let Some(s) = self.points.as_mut() {
            rows.points.into_iter().try_for_each(|r| s.point(r))?;
        }
        if let Some(s) = self.zone3.as_mut() {
            rows.zone3.into_iter().try_for_each(|r| s.point(r))?;
        }
        if let Some(s) = self.e_violating.as_mut() {
            rows.e_violating
                .into_iter()
                .try_for_each(|r| s.correlators(r))?;
        }
        if let Some(s) = self.c_violating.as_mut() {
            rows.c_violating
                .into_iter()
                .try_for_each(|r| s.correlators(r))?;
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        for sink in [self.points, self.zone3, self.e_violating, self.c_violating]
            .into_iter()
            .flatten()
        {
            sink.finish()?;
        }
        Ok(())
    }
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Classifies `cfg.samples` random settings under class 1 and writes any
/// requested point files.
pub fn scan(cfg: &ScanConfig) -> Result<ScanSummary> {
    cfg.validate()?;
    let mut sinks = Sinks::open(&cfg.emit)?;
    let streams = Substreams::new(cfg.seed);
    let mut summary = ScanSummary {
        alpha: cfg.state.alpha(),
        samples: cfg.samples,
        seed: cfg.seed,
        range: cfg.range,
        counts: [0; 4],
        max_chsh: f64::NEG_INFINITY,
        max_chsh_e: f64::NEG_INFINITY,
        max_zone3_chsh: None,
    };
    let blocks = cfg.samples.div_ceil(BLOCK);
    let mut next = 0;
    while next < blocks {
        let batch_end = (next + BLOCKS_PER_BATCH).min(blocks);
        let results: Vec<BlockResult> = with_workers(cfg.workers, || {
            (next..batch_end)
                .into_par_iter()
                .map(|b| {
                    let start = b * BLOCK;
                    let end = (start + BLOCK).min(cfg.samples);
                    run_block(cfg, &streams, start, end)
                })
                .collect()
        })?;
        for r in results {
            for (total, c) in summary.counts.iter_mut().zip(r.counts) {
                *total += c;
            }
            summary.max_chsh = summary.max_chsh.max(r.max_chsh);
            summary.max_chsh_e = summary.max_chsh_e.max(r.max_chsh_e);
            summary.max_zone3_chsh = max_opt(summary.max_zone3_chsh, r.max_zone3_chsh);
            sinks.write(r.rows)?;
        }
        next = batch_end;
    }
    sinks.finish()?;
    Ok(summary)
}

/// One scan per α, all with the same seed so rows share their samples.
pub fn alpha_sweep(
    alphas: &[StateParam],
    samples: u64,
    seed: u64,
    range: AngleRange,
    workers: usize,
) -> Result<Vec<ScanSummary>> {
    alphas
        .iter()
        .map(|&state| {
            let mut cfg = ScanConfig::new(state, samples, seed);
            cfg.range = range;
            cfg.workers = workers;
            scan(&cfg)
        })
        .collect()
}

pub const SUMMARY_HEADER: &str = "alpha,samples,seed,zone1,zone2,zone3,zone4";

/// One CSV summary row, fractions with six decimals.
pub fn summary_csv_row(s: &ScanSummary) -> String {
    let f = s.fractions();
    format!(
        "{},{},{},{:.6},{:.6},{:.6},{:.6}",
        s.alpha, s.samples, s.seed, f[0], f[1], f[2], f[3]
    )
}
