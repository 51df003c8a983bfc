use std::f64::consts::FRAC_PI_4;
use std::fs::File;
use std::io::{BufRead, BufReader};

use bellzones::empirical::{estimate, ingest_runs, simulate_runs, write_runs};
use bellzones::optimize::{
    find_extremal_settings, find_triple_violations, zone3_boundary, OptimizeGoal, TripleSearch,
};
use bellzones::reference::{TABLE1, TABLE2, TABLE3};
use bellzones::scan::{alpha_sweep, scan, EmitConfig, ScanConfig, ScanSummary};
use bellzones::scenario::forbidden_sweep;
use bellzones::{
    evaluate_assignment, triple_violation_check, ClassId, MeasurementSetting, PartyAssignment,
    StateParam, ZoneReport,
};

use crate::config::Settings;
use crate::table::{num, Table};
use crate::{CliError, Command, EmitArgs};

const NO_FEASIBLE: &str = "no feasible point";

pub fn execute(cmd: &Command, s: &Settings) -> Result<String, CliError> {
    let table = match cmd {
        Command::Scan { emit } => scan_cmd(s, emit)?,
        Command::SweepAlpha { alphas, steps } => {
            sweep_cmd(s, alphas.as_ref().map(|a| &a.0[..]), *steps)?
        }
        Command::Optimize {
            goal,
            count,
            distinctness,
        } => {
            let goal = OptimizeGoal::new(*goal, s.state);
            optimize_cmd(s, &goal, *count, *distinctness)?
        }
        Command::Boundary => boundary_cmd(s)?,
        Command::Classify { angles } => classify_cmd(&setting(angles.angles, s)?),
        Command::Permute { angles, class } => permute_cmd(&setting(angles.angles, s)?, *class)?,
        Command::Classes { angles } => classes_cmd(&setting(angles.angles, s)?),
        Command::SearchTriple { mode, near } => {
            let mut search = TripleSearch::new(*mode, s.state, s.budget, s.seed);
            search.starts_near = near
                .iter()
                .map(|a| setting(*a, s))
                .collect::<Result<_, _>>()?;
            triple_cmd(&search)?
        }
        Command::SimulateRuns { angles, runs } => {
            let log = simulate_runs(&setting(angles.angles, s)?, *runs, s.seed)?;
            let mut out = Vec::new();
            write_runs(&log, &mut out).map_err(|e| CliError::Runtime(e.to_string()))?;
            return String::from_utf8(out).map_err(|e| CliError::Runtime(e.to_string()));
        }
        Command::Estimate { input } => {
            let reader: Box<dyn BufRead> = match input {
                Some(path) => {
                    Box::new(BufReader::new(File::open(path).map_err(|e| {
                        CliError::Runtime(format!("{}: {e}", path.display()))
                    })?))
                }
                None => Box::new(std::io::stdin().lock()),
            };
            let log = ingest_runs(reader).map_err(|e| CliError::Runtime(e.to_string()))?;
            estimate_cmd(&log)?
        }
        Command::Table1 => table1_cmd(),
        Command::Table2 => table2_cmd(s)?,
        Command::Table3 => table3_cmd(),
    };
    Ok(table.render(s.format))
}

fn setting(angles: [f64; 4], s: &Settings) -> Result<MeasurementSetting, CliError> {
    Ok(MeasurementSetting::new(angles, s.state)?)
}

fn class1() -> PartyAssignment {
    PartyAssignment::canonical(ClassId::One)
}

fn angle_cells(m: &MeasurementSetting) -> Vec<String> {
    m.angles().iter().map(|a| num(*a)).collect()
}

const SUMMARY_COLUMNS: [&str; 11] = [
    "alpha",
    "samples",
    "seed",
    "range",
    "zone1",
    "zone2",
    "zone3",
    "zone4",
    "max_chsh",
    "max_chsh_e",
    "max_zone3_chsh",
];

fn summary_row(r: &ScanSummary) -> Vec<String> {
    let mut row = vec![
        num(r.alpha),
        r.samples.to_string(),
        r.seed.to_string(),
        r.range.name().into(),
    ];
    row.extend(r.fractions().map(num));
    row.push(num(r.max_chsh));
    row.push(num(r.max_chsh_e));
    row.push(r.max_zone3_chsh.map_or_else(|| "none".into(), num));
    row
}

fn scan_cmd(s: &Settings, emit: &EmitArgs) -> Result<Table, CliError> {
    let mut cfg = ScanConfig::new(s.state, s.samples, s.seed);
    cfg.workers = s.workers;
    cfg.range = s.angle_range;
    cfg.emit = EmitConfig {
        points: emit.emit_points.clone(),
        zone3_points: emit.emit_zone3.clone(),
        correlators_e_violating: emit.emit_e_violating.clone(),
        correlators_c_violating: emit.emit_c_violating.clone(),
        every: emit.emit_every,
    };
    let summary = scan(&cfg)?;
    let mut t = Table::new(&SUMMARY_COLUMNS);
    t.push(summary_row(&summary));
    Ok(t)
}

fn sweep_cmd(s: &Settings, alphas: Option<&[f64]>, steps: usize) -> Result<Table, CliError> {
    let grid: Vec<f64> = match alphas {
        Some(a) => a.to_vec(),
        None if steps >= 2 => (0..steps)
            .map(|k| FRAC_PI_4 * k as f64 / (steps - 1) as f64)
            .collect(),
        None => return Err(CliError::Usage("steps must be at least 2".into())),
    };
    let states = grid
        .iter()
        .map(|a| StateParam::new(*a))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = alpha_sweep(&states, s.samples, s.seed, s.angle_range, s.workers)?;
    let mut t = Table::new(&SUMMARY_COLUMNS);
    rows.iter().for_each(|r| t.push(summary_row(r)));
    Ok(t)
}

const RESULT_COLUMNS: [&str; 10] = [
    "goal",
    "value",
    "theta0",
    "theta1",
    "theta0p",
    "theta1p",
    "chsh",
    "chsh_e",
    "zone",
    "converged",
];

fn optimize_cmd(
    s: &Settings,
    goal: &OptimizeGoal,
    count: usize,
    distinctness: f64,
) -> Result<Table, CliError> {
    let found = find_extremal_settings(goal, count, distinctness, &s.budget, s.seed)?;
    let mut t = Table::new(&RESULT_COLUMNS);
    for r in &found {
        let mut row = vec![goal.kind.name().to_owned(), num(r.value)];
        row.extend(angle_cells(&r.setting));
        row.extend([
            num(r.report.chsh),
            num(r.report.chsh_e),
            r.report.zone.to_string(),
            r.converged.to_string(),
        ]);
        t.push(row);
    }
    if found.is_empty() {
        let mut row = vec![goal.kind.name().to_owned(), NO_FEASIBLE.to_owned()];
        row.extend(std::iter::repeat_n(String::new(), RESULT_COLUMNS.len() - 2));
        t.push(row);
    }
    Ok(t)
}

fn boundary_cmd(s: &Settings) -> Result<Table, CliError> {
    let value = zone3_boundary(&s.state, &s.budget, s.seed)?;
    let mut t = Table::new(&["alpha", "zone3_boundary"]);
    t.push(vec![
        num(s.state.alpha()),
        value.map_or_else(|| NO_FEASIBLE.into(), num),
    ]);
    Ok(t)
}

fn classify_cmd(m: &MeasurementSetting) -> Table {
    let r = evaluate_assignment(m, &class1());
    let mut t = Table::new(&[
        "chsh", "chsh_e", "zone", "s1", "s2", "s3", "s4", "t11", "t10", "t01", "t00",
    ]);
    let mut row = vec![num(r.chsh), num(r.chsh_e), r.zone.to_string()];
    row.extend(r.sign_variants.as_array().map(num));
    row.extend(r.entropic_variants.as_array().map(num));
    t.push(row);
    t
}

fn report_cells(r: &ZoneReport) -> [String; 3] {
    [num(r.chsh), num(r.chsh_e), r.zone.to_string()]
}

fn permute_cmd(m: &MeasurementSetting, class: u8) -> Result<Table, CliError> {
    let class_id = ClassId::from_id(class)?;
    let sweep = forbidden_sweep(m, class_id);
    let mut t = Table::new(&["permutation", "party_exchange", "chsh", "chsh_e", "zone"]);
    for e in &sweep.entries {
        let mut row = vec![e.permutation.to_string(), e.party_exchange.to_string()];
        row.extend(report_cells(&e.report));
        t.push(row);
    }
    Ok(t)
}

fn classes_cmd(m: &MeasurementSetting) -> Table {
    let check = triple_violation_check(m);
    let mut t = Table::new(&[
        "class",
        "chsh",
        "chsh_e",
        "zone",
        "all_e_contextual",
        "all_both_contextual",
    ]);
    for c in ClassId::ALL {
        let mut row = vec![c.id().to_string()];
        row.extend(report_cells(check.report(c)));
        row.push(check.all_e_contextual.to_string());
        row.push(check.all_both_contextual.to_string());
        t.push(row);
    }
    t
}

fn triple_cmd(search: &TripleSearch) -> Result<Table, CliError> {
    let found = find_triple_violations(search)?;
    let mut t = Table::new(&[
        "theta0",
        "theta1",
        "theta0p",
        "theta1p",
        "min_chsh",
        "min_chsh_e",
    ]);
    for m in &found {
        let check = triple_violation_check(m);
        let mut row = angle_cells(m);
        row.push(num(check.min_chsh()));
        row.push(num(check.min_chsh_e()));
        t.push(row);
    }
    Ok(t)
}

fn estimate_cmd(log: &bellzones::empirical::RunLog) -> Result<Table, CliError> {
    let e = estimate(log)?;
    let mut t = Table::new(&[
        "runs",
        "chsh",
        "chsh_e",
        "zone",
        "chsh_spread",
        "chsh_e_spread",
        "n00",
        "n01",
        "n10",
        "n11",
    ]);
    let mut row = vec![
        log.records.len().to_string(),
        num(e.chsh),
        num(e.chsh_e),
        e.zone.to_string(),
        num(e.spread.chsh),
        num(e.spread.chsh_e),
    ];
    row.extend(e.counts.map(|c| c.to_string()));
    t.push(row);
    Ok(t)
}

const REFERENCE_COLUMNS: [&str; 5] = ["item", "quantity", "value", "reference", "deviation"];

fn reference_row(item: String, quantity: &str, value: f64, reference: f64) -> Vec<String> {
    vec![
        item,
        quantity.to_owned(),
        num(value),
        num(reference),
        num((value - reference).abs()),
    ]
}

fn table1_cmd() -> Table {
    let mut t = Table::new(&REFERENCE_COLUMNS);
    for (k, row) in TABLE1.iter().enumerate() {
        let m = MeasurementSetting::new(row.angles, StateParam::maximal()).expect("finite angles");
        let r = evaluate_assignment(&m, &class1());
        t.push(reference_row(
            format!("row{}", k + 1),
            "chsh",
            r.chsh,
            row.chsh,
        ));
        t.push(reference_row(
            format!("row{}", k + 1),
            "chsh_e",
            r.chsh_e,
            row.chsh_e,
        ));
    }
    t
}

fn table2_cmd(s: &Settings) -> Result<Table, CliError> {
    let mut cfg = ScanConfig::new(StateParam::maximal(), s.samples, s.seed);
    cfg.workers = s.workers;
    cfg.range = s.angle_range;
    let summary = scan(&cfg)?;
    let mut t = Table::new(&REFERENCE_COLUMNS);
    for (k, f) in summary.fractions().iter().enumerate() {
        t.push(reference_row(
            format!("zone{}", k + 1),
            "percent",
            100.0 * f,
            TABLE2[k],
        ));
    }
    Ok(t)
}

fn table3_cmd() -> Table {
    let mut t = Table::new(&REFERENCE_COLUMNS);
    for (k, row) in TABLE3.iter().enumerate() {
        let m = MeasurementSetting::new(row.angles, StateParam::maximal()).expect("finite angles");
        let check = triple_violation_check(&m);
        for (j, c) in ClassId::ALL.into_iter().enumerate() {
            let item = format!("row{}_class{}", k + 1, c.id());
            let r = check.report(c);
            t.push(reference_row(item.clone(), "chsh", r.chsh, row.chsh[j]));
            t.push(reference_row(item, "chsh_e", r.chsh_e, row.chsh_e[j]));
        }
        let zone = check.report(ClassId::One).zone.id();
        t.push(reference_row(
            format!("row{}_class1", k + 1),
            "zone",
            f64::from(zone),
            f64::from(row.zone),
        ));
    }
    t
}
