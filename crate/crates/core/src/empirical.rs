//! Finite-statistics layer: per-run `(x, y, a, b)` records, the run-log CSV
//! format, and plug-in estimates of the CHSH functionals under class 1.
//!
//! Run-log format: optional `#` comment lines carrying `key=value`
//! provenance (`alpha`, `angles`, `seed`), then the exact header `x,y,a,b`,
//! then one record per LF-terminated line, four bits, no quoting.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::info::ContextQuad;
use crate::quantum::{JointDistribution, MeasurementSetting, Trig};
use crate::rng::Substreams;
use crate::scenario::{Zone, ZoneReport};

pub const RUN_LOG_HEADER: &str = "x,y,a,b";

/// Number of disjoint subsamples used for the spread estimate.
pub const SUBSAMPLES: usize = 10;

/// One run: inputs `x, y` and outcomes `a, b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunRecord {
    pub x: u8,
    pub y: u8,
    pub a: u8,
    pub b: u8,
}

impl RunRecord {
    pub fn new(x: u8, y: u8, a: u8, b: u8) -> Result<Self> {
        for (name, v) in [("x", x), ("y", y), ("a", a), ("b", b)] {
            if v > 1 {
                return Err(Error::Domain(format!("field {name} out of range: {v}")));
            }
        }
        Ok(Self { x, y, a, b })
    }
}

/// Where a simulated log came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetadata {
    pub alpha: f64,
    pub angles: [f64; 4],
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLog {
    pub records: Vec<RunRecord>,
    pub metadata: Option<RunMetadata>,
}

/// `n` runs with uniform inputs and outcomes drawn from the Born-rule
/// distribution of the selected class-1 context. Uses a single ChaCha8
/// stream of `seed`, two words per run.
pub fn simulate_runs(s: &MeasurementSetting, n: usize, seed: u64) -> Result<RunLog> {
    if n == 0 {
        return Err(Error::Config("number of runs must be at least 1".into()));
    }
    let trig = s.angles().map(Trig::of);
    let mut cumulative = [[0.0; 3]; 4];
    for x in 0..2 {
        for y in 0..2 {
            let p = trig[x].joint(&trig[2 + y], &s.state).probabilities();
            cumulative[x * 2 + y] = [p[0], p[0] + p[1], p[0] + p[1] + p[2]];
        }
    }
    let mut rng = Substreams::new(seed).stream(0);
    let records = (0..n)
        .map(|_| {
            let inputs = rng.next_u64();
            let x = (inputs >> 63) as u8;
            let y = (inputs >> 62 & 1) as u8;
            let u = rng.next_f64();
            let c = &cumulative[usize::from(x * 2 + y)];
            let cell = c.iter().take_while(|&&edge| u >= edge).count() as u8;
            RunRecord {
                x,
                y,
                a: cell >> 1,
                b: cell & 1,
            }
        })
        .collect();
    Ok(RunLog {
        records,
        metadata: Some(RunMetadata {
            alpha: s.state.alpha(),
            angles: s.angles(),
            seed,
        }),
    })
}

/// Writes the log in run-log CSV format.
pub fn write_runs<W: Write>(log: &RunLog, mut out: W) -> std::io::Result<()> {
    if let Some(m) = &log.metadata {
        writeln!(out, "# alpha={}", m.alpha)?;
        writeln!(
            out,
            "# angles={},{},{},{}",
            m.angles[0], m.angles[1], m.angles[2], m.angles[3]
        )?;
        writeln!(out, "# seed={}", m.seed)?;
    }
    writeln!(out, "{RUN_LOG_HEADER}")?;
    for r in &log.records {
        writeln!(out, "{},{},{},{}", r.x, r.y, r.a, r.b)?;
    }
    out.flush()
}

fn parse_error(line: usize, message: impl Into<String>, content: &str) -> Error {
    Error::Parse {
        line,
        message: message.into(),
        content: content.to_string(),
    }
}

#[derive(Default)]
struct MetadataParts {
    alpha: Option<f64>,
    angles: Option<[f64; 4]>,
    seed: Option<u64>,
}

impl MetadataParts {
    fn absorb(&mut self, line_no: usize, line: &str) -> Result<()> {
        let body = line.trim_start_matches('#').trim();
        let Some((key, value)) = body.split_once('=') else {
            // free-form comment
            return Ok(());
        };
        let bad = |what: &str| parse_error(line_no, format!("invalid {what} metadata"), line);
        match key.trim() {
            "alpha" => self.alpha = Some(value.trim().parse().map_err(|_| bad("alpha"))?),
            "seed" => self.seed = Some(value.trim().parse().map_err(|_| bad("seed"))?),
            "angles" => {
                let parsed: Vec<f64> = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("angles"))?;
                self.angles = Some(parsed.try_into().map_err(|_| bad("angles"))?);
            }
            _ => {}
        }
        Ok(())
    }

    fn finish(self) -> Option<RunMetadata> {
        Some(RunMetadata {
            alpha: self.alpha?,
            angles: self.angles?,
            seed: self.seed?,
        })
    }
}

const FIELD_NAMES: [&str; 4] = ["x", "y", "a", "b"];

fn parse_record(line_no: usize, line: &str) -> Result<RunRecord> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 4 {
        return Err(parse_error(
            line_no,
            format!("expected 4 fields, found {}", fields.len()),
            line,
        ));
    }
    let mut bits = [0u8; 4];
    for (k, field) in fields.iter().enumerate() {
        bits[k] = match *field {
            "0" => 0,
            "1" => 1,
            _ => {
                return Err(parse_error(
                    line_no,
                    format!("field {} out of range", FIELD_NAMES[k]),
                    line,
                ))
            }
        };
    }
    Ok(RunRecord {
        x: bits[0],
        y: bits[1],
        a: bits[2],
        b: bits[3],
    })
}

/// Reads and validates a run log.
pub fn ingest_runs<R: BufRead>(source: R) -> Result<RunLog> {
    let mut meta = MetadataParts::default();
    let mut header_seen = false;
    let mut records = Vec::new();
    let mut last_line = 0;
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = line.map_err(|e| parse_error(line_no, format!("read failed: {e}"), ""))?;
        if !header_seen {
            if line.starts_with('#') {
                meta.absorb(line_no, &line)?;
                continue;
            }
            if line != RUN_LOG_HEADER {
                return Err(parse_error(
                    line_no,
                    format!("expected header `{RUN_LOG_HEADER}`"),
                    &line,
                ));
            }
            header_seen = true;
            continue;
        }
        records.push(parse_record(line_no, &line)?);
    }
    if !header_seen {
        return Err(parse_error(last_line + 1, "empty run log", ""));
    }
    if records.is_empty() {
        return Err(parse_error(last_line + 1, "run log has no records", ""));
    }
    Ok(RunLog {
        records,
        metadata: meta.finish(),
    })
}

/// Spread of subsample estimates around the full-sample estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SubsampleSpread {
    /// Root-mean-square deviation of the `chsh` estimates of the
    /// `n/10`-sized subsamples from the full estimate.
    pub chsh: f64,
    pub chsh_e: f64,
    /// Subsamples that contained all four contexts.
    pub usable: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalEstimate {
    /// Empirical distribution per context `(x, y)`, in `00, 01, 10, 11` order.
    pub contexts: [JointDistribution; 4],
    pub counts: [u64; 4],
    pub chsh: f64,
    pub chsh_e: f64,
    pub zone: Zone,
    pub report: ZoneReport,
    pub spread: SubsampleSpread,
}

fn tally(records: &[RunRecord]) -> [[u64; 4]; 4] {
    let mut counts = [[0u64; 4]; 4];
    for r in records {
        counts[usize::from(r.x * 2 + r.y)][usize::from(r.a * 2 + r.b)] += 1;
    }
    counts
}

fn missing(counts: &[[u64; 4]; 4]) -> Vec<(u8, u8)> {
    (0..4u8)
        .filter(|&k| counts[usize::from(k)].iter().sum::<u64>() == 0)
        .map(|k| (k >> 1, k & 1))
        .collect()
}

fn quad_from_counts(counts: &[[u64; 4]; 4]) -> Result<(ContextQuad, [JointDistribution; 4])> {
    let absent = missing(counts);
    if !absent.is_empty() {
        return Err(Error::MissingContexts(absent));
    }
    let mut contexts = [JointDistribution::new([1.0, 0.0, 0.0, 0.0])?; 4];
    for (slot, c) in contexts.iter_mut().zip(counts.iter()) {
        *slot = JointDistribution::from_counts(*c)?;
    }
    let min_count = counts
        .iter()
        .map(|c| c.iter().sum::<u64>())
        .min()
        .unwrap_or(1);
    let tol = 5.0 / (min_count as f64).sqrt();
    let quad = ContextQuad::new(contexts[0], contexts[1], contexts[2], contexts[3], tol)?;
    Ok((quad, contexts))
}

/// Plug-in estimates of the class-1 functionals from a run log.
pub fn estimate(log: &RunLog) -> Result<EmpiricalEstimate> {
    let counts = tally(&log.records);
    let (quad, contexts) = quad_from_counts(&counts)?;
    let report = ZoneReport::from_quad(&quad);

    let n = log.records.len();
    let block = n / SUBSAMPLES;
    let mut spread = SubsampleSpread::default();
    if block > 0 {
        let (mut sq_chsh, mut sq_chsh_e) = (0.0, 0.0);
        for k in 0..SUBSAMPLES {
            let part = &log.records[k * block..(k + 1) * block];
            if let Ok((q, _)) = quad_from_counts(&tally(part)) {
                let r = ZoneReport::from_quad(&q);
                sq_chsh += (r.chsh - report.chsh).powi(2);
                sq_chsh_e += (r.chsh_e - report.chsh_e).powi(2);
                spread.usable += 1;
            }
        }
        if spread.usable > 0 {
            spread.chsh = (sq_chsh / spread.usable as f64).sqrt();
            spread.chsh_e = (sq_chsh_e / spread.usable as f64).sqrt();
        }
    }

    Ok(EmpiricalEstimate {
        contexts,
        counts: counts.map(|c| c.iter().sum()),
        chsh: report.chsh,
        chsh_e: report.chsh_e,
        zone: report.zone,
        report,
        spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::StateParam;

    fn parse(text: &str) -> Result<RunLog> {
        ingest_runs(text.as_bytes())
    }

    #[test]
    fn ingest_single_record() {
        let log = parse("x,y,a,b\n0,1,1,0\n").unwrap();
        assert_eq!(log.records, vec![RunRecord::new(0, 1, 1, 0).unwrap()]);
        assert!(log.metadata.is_none());
    }

    #[test]
    fn ingest_rejects_out_of_range_field() {
        let err = parse("x,y,a,b\n0,2,1,0\n").unwrap_err();
        match err {
            Error::Parse {
                line,
                message,
                content,
            } => {
                assert_eq!(line, 2);
                assert_eq!(message, "field y out of range");
                assert_eq!(content, "0,2,1,0");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ingest_rejects_bad_shapes() {
        assert!(matches!(parse(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse("x,y,a,b\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse("x,y,a\n0,0,0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("x,y,a,b\n0,0,0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse("x,y,a,b\n0,0,0,0\n\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse("# alpha=abc\nx,y,a,b\n0,0,0,0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn record_validation() {
        assert!(RunRecord::new(0, 0, 2, 0).is_err());
        assert!(RunRecord::new(1, 1, 1, 1).is_ok());
    }

    #[test]
    fn product_state_runs_are_deterministic_zeros() {
        let s = MeasurementSetting::new([0.0; 4], StateParam::product()).unwrap();
        let log = simulate_runs(&s, 100, 3).unwrap();
        assert!(log.records.iter().all(|r| r.a == 0 && r.b == 0));
        let est = estimate(&log).unwrap();
        assert_eq!(est.chsh, 2.0);
        assert_eq!(est.chsh_e, 0.0);
        assert_eq!(est.zone, Zone::NonContextual);
    }

    #[test]
    fn perfectly_correlated_context() {
        let s = MeasurementSetting::new([0.7, 1.0, -0.7, 2.0], StateParam::maximal()).unwrap();
        let log = simulate_runs(&s, 2000, 11).unwrap();
        assert!(log
            .records
            .iter()
            .filter(|r| r.x == 0 && r.y == 0)
            .all(|r| r.a == r.b));
    }

    #[test]
    fn simulation_is_reproducible() {
        let s =
            MeasurementSetting::new([0.1, 0.9, 2.0, 3.1], StateParam::new(0.5).unwrap()).unwrap();
        assert_eq!(
            simulate_runs(&s, 500, 8).unwrap(),
            simulate_runs(&s, 500, 8).unwrap()
        );
        assert_ne!(
            simulate_runs(&s, 500, 8).unwrap(),
            simulate_runs(&s, 500, 9).unwrap()
        );
        assert!(simulate_runs(&s, 0, 8).is_err());
    }

    #[test]
    fn missing_contexts_are_listed() {
        let log = parse("x,y,a,b\n0,0,0,0\n1,1,0,0\n").unwrap();
        match estimate(&log).unwrap_err() {
            Error::MissingContexts(cells) => assert_eq!(cells, vec![(0, 1), (1, 0)]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_record_per_context() {
        let log = parse("x,y,a,b\n0,0,0,1\n0,1,0,0\n1,0,1,1\n1,1,1,0\n").unwrap();
        let est = estimate(&log).unwrap();
        for d in est.contexts {
            assert!(d.probabilities().iter().all(|p| *p == 0.0 || *p == 1.0));
        }
        assert_eq!(est.chsh_e, 0.0);
        assert_eq!(est.counts, [1; 4]);
        assert_eq!(est.spread.usable, 0);
        assert_eq!(est.spread.chsh_e, 0.0);
    }

    #[test]
    fn spread_is_populated() {
        let s =
            MeasurementSetting::new([2.070, 1.466, 1.372, 0.769], StateParam::maximal()).unwrap();
        let est = estimate(&simulate_runs(&s, 20_000, 4).unwrap()).unwrap();
        assert_eq!(est.spread.usable, SUBSAMPLES);
        assert!(est.spread.chsh_e > 0.0);
        assert!(est.spread.chsh > 0.0);
    }

    #[test]
    fn metadata_round_trips() {
        let s =
            MeasurementSetting::new([0.1, 0.2, 0.3, 0.4], StateParam::new(0.3).unwrap()).unwrap();
        let log = simulate_runs(&s, 10, 77).unwrap();
        let mut buf = Vec::new();
        write_runs(&log, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# alpha=0.3\n"));
        assert_eq!(ingest_runs(buf.as_slice()).unwrap(), log);
    }
}
