//! Multi-start derivative-free maximization over the four measurement angles.
//!
//! Every start is an independent Nelder–Mead run seeded from its own
//! substream; starts run in parallel and are merged deterministically (best
//! objective, ties broken by the lexicographically smallest angles).
//! Constrained goals first push each start into the feasible region, then
//! refine against a sequence of shrinking constraint thresholds `chsh_e > ε`.

mod nelder_mead;

pub use nelder_mead::{maximize, Options as NelderMeadOptions, Outcome as NelderMeadOutcome};

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::{wrap_angle, MeasurementSetting, StateParam, Trig};
use crate::rng::{derive_seed, Substreams};
use crate::scenario::{quad_from_trig, scenario_preserving, ClassId, PartyAssignment, ZoneReport};

/// Constraint thresholds used when approaching the `chsh_e = 0` boundary.
pub const BOUNDARY_EPSILONS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Candidates within this much of the best objective count as extremal.
pub const EXTREMAL_WINDOW: f64 = 1e-3;

/// Slack on `chsh ≥ max chsh` when minimizing `chsh_e` among maximizers.
const MAX_CHSH_SLACK: f64 = 1e-6;

/// Objective assigned to infeasible points, below every feasible value.
const INFEASIBLE: f64 = -1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoalKind {
    MaxChsh,
    MaxChshE,
    /// Largest `chsh` subject to `chsh_e > 0`.
    MaxChshInZone3,
    /// Smallest `chsh_e` among settings attaining the largest `chsh`.
    MinChshEAtMaxChsh,
}

impl GoalKind {
    pub fn name(self) -> &'static str {
        match self {
            GoalKind::MaxChsh => "max_chsh",
            GoalKind::MaxChshE => "max_chsh_e",
            GoalKind::MaxChshInZone3 => "max_chsh_in_zone3",
            GoalKind::MinChshEAtMaxChsh => "min_chsh_e_at_max_chsh",
        }
    }

    fn salt(self) -> u64 {
        match self {
            GoalKind::MaxChsh => 1,
            GoalKind::MaxChshE => 2,
            GoalKind::MaxChshInZone3 => 3,
            GoalKind::MinChshEAtMaxChsh => 4,
        }
    }

    /// The functional reported as the result's value.
    pub fn value_of(self, r: &ZoneReport) -> f64 {
        match self {
            GoalKind::MaxChsh | GoalKind::MaxChshInZone3 => r.chsh,
            GoalKind::MaxChshE | GoalKind::MinChshEAtMaxChsh => r.chsh_e,
        }
    }

    /// Secondary key for ranking near-ties. The entropic expression is blind
    /// to correlator signs at maximal entanglement, so its maximizers come
    /// with sign-flipped twins of lower `chsh`; those rank last.
    fn tie_break(self, r: &ZoneReport) -> f64 {
        match self {
            GoalKind::MaxChshE => r.chsh,
            _ => 0.0,
        }
    }
}

impl std::str::FromStr for GoalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max_chsh" | "max-chsh" => Ok(GoalKind::MaxChsh),
            "max_chsh_e" | "max-chsh-e" => Ok(GoalKind::MaxChshE),
            "max_chsh_in_zone3" | "max-chsh-in-zone3" => Ok(GoalKind::MaxChshInZone3),
            "min_chsh_e_at_max_chsh" | "min-chsh-e-at-max-chsh" => Ok(GoalKind::MinChshEAtMaxChsh),
            other => Err(Error::Config(format!(
                "unknown optimization goal `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeGoal {
    pub kind: GoalKind,
    pub state: StateParam,
}

impl OptimizeGoal {
    pub fn new(kind: GoalKind, state: StateParam) -> Self {
        Self { kind, state }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub starts: usize,
    pub iterations: usize,
    pub tolerance: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            starts: 256,
            iterations: 500,
            tolerance: 1e-10,
        }
    }
}

impl Budget {
    fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.iterations == 0 {
            return Err(Error::Config(format!(
                "budget needs at least one start and one iteration, got {} starts and {} iterations",
                self.starts, self.iterations
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::Config(format!(
                "invalid tolerance {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeResult {
    pub setting: MeasurementSetting,
    pub value: f64,
    pub report: ZoneReport,
    /// Starts that produced a feasible local optimum.
    pub starts: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizeOutcome {
    Found(OptimizeResult),
    /// The constrained region was never reached.
    NoFeasiblePoint,
}

impl OptimizeOutcome {
    pub fn found(self) -> Option<OptimizeResult> {
        match self {
            OptimizeOutcome::Found(r) => Some(r),
            OptimizeOutcome::NoFeasiblePoint => None,
        }
    }
}

/// Class-1 report at raw (unwrapped) angles.
fn report_at(x: &[f64; 4], state: &StateParam) -> ZoneReport {
    let s = MeasurementSetting::new(*x, *state).expect("finite angles");
    let trig = x.map(Trig::of);
    ZoneReport::from_quad(&quad_from_trig(
        &trig,
        &PartyAssignment::canonical(ClassId::One),
        &s,
    ))
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    angles: [f64; 4],
    objective: f64,
    converged: bool,
}

fn compare_candidates(a: &Candidate, b: &Candidate) -> Ordering {
    b.objective.total_cmp(&a.objective).then_with(|| {
        a.angles
            .iter()
            .zip(b.angles.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

fn random_start(streams: &Substreams, k: u64) -> [f64; 4] {
    let mut rng = streams.stream(k);
    [(); 4].map(|_| rng.next_f64() * TAU)
}

fn wrapped(x: [f64; 4]) -> [f64; 4] {
    x.map(wrap_angle)
}

fn nm(budget: &Budget, step: f64, stop_above: Option<f64>) -> NelderMeadOptions {
    NelderMeadOptions {
        max_iterations: budget.iterations,
        tolerance: budget.tolerance,
        step,
        stop_above,
    }
}

/// Pushes `x` into `chsh_e > eps`, returning `None` if that fails.
fn reach_e_contextual(
    x: [f64; 4],
    eps: f64,
    state: &StateParam,
    budget: &Budget,
) -> Option<[f64; 4]> {
    if report_at(&x, state).chsh_e > eps {
        return Some(x);
    }
    let out = maximize(
        |y| report_at(y, state).chsh_e,
        x,
        &nm(budget, 0.5, Some(eps)),
    );
    (out.value > eps).then_some(out.x)
}

/// Maximizes `chsh` under `chsh_e > ε` for each threshold in turn.
fn refine_in_zone3(x: [f64; 4], state: &StateParam, budget: &Budget) -> Candidate {
    let mut x = x;
    let mut converged = false;
    for (stage, &eps) in BOUNDARY_EPSILONS.iter().enumerate() {
        let step = 0.3 / 4f64.powi(stage as i32);
        let out = maximize(
            |y| {
                let r = report_at(y, state);
                if r.chsh_e > eps {
                    r.chsh
                } else {
                    INFEASIBLE + r.chsh_e
                }
            },
            x,
            &nm(budget, step, None),
        );
        x = out.x;
        converged = out.converged;
    }
    let r = report_at(&x, state);
    Candidate {
        angles: wrapped(x),
        objective: r.chsh,
        converged,
    }
}

fn local_optima(goal: &OptimizeGoal, budget: &Budget, seed: u64) -> Vec<Candidate> {
    let streams = Substreams::new(derive_seed(seed, goal.kind.salt()));
    let state = goal.state;
    let per_start = |k: u64| -> Option<Candidate> {
        let x0 = random_start(&streams, k);
        match goal.kind {
            GoalKind::MaxChsh | GoalKind::MaxChshE => {
                let kind = goal.kind;
                let out = maximize(
                    |y| kind.value_of(&report_at(y, &state)),
                    x0,
                    &nm(budget, 0.5, None),
                );
                Some(Candidate {
                    angles: wrapped(out.x),
                    objective: kind.value_of(&report_at(&out.x, &state)),
                    converged: out.converged,
                })
            }
            GoalKind::MaxChshInZone3 => {
                let x = reach_e_contextual(x0, BOUNDARY_EPSILONS[0], &state, budget)?;
                let c = refine_in_zone3(x, &state, budget);
                (report_at(&c.angles, &state).chsh_e > 0.0).then_some(c)
            }
            GoalKind::MinChshEAtMaxChsh => unreachable!("handled in two stages"),
        }
    };
    let mut out: Vec<Candidate> = (0..budget.starts as u64)
        .into_par_iter()
        .filter_map(per_start)
        .collect();
    out.sort_by(compare_candidates);
    out
}

fn min_chsh_e_among_maximizers(state: &StateParam, budget: &Budget, seed: u64) -> Vec<Candidate> {
    let stage1 = local_optima(&OptimizeGoal::new(GoalKind::MaxChsh, *state), budget, seed);
    let Some(best) = stage1.first().map(|c| c.objective) else {
        return Vec::new();
    };
    let floor = best - MAX_CHSH_SLACK;
    let mut out: Vec<Candidate> = stage1
        .par_iter()
        .filter(|c| c.objective >= floor)
        .map(|c| {
            let out = maximize(
                |y| {
                    let r = report_at(y, state);
                    if r.chsh >= floor {
                        -r.chsh_e
                    } else {
                        INFEASIBLE - (floor - r.chsh)
                    }
                },
                c.angles,
                &nm(budget, 0.05, None),
            );
            let r = report_at(&out.x, state);
            Candidate {
                angles: wrapped(out.x),
                objective: -r.chsh_e,
                converged: out.converged,
            }
        })
        .filter(|c| report_at(&c.angles, state).chsh >= floor)
        .collect();
    out.sort_by(compare_candidates);
    out
}

fn candidates(goal: &OptimizeGoal, budget: &Budget, seed: u64) -> Result<Vec<Candidate>> {
    budget.validate()?;
    Ok(match goal.kind {
        GoalKind::MinChshEAtMaxChsh => min_chsh_e_among_maximizers(&goal.state, budget, seed),
        _ => local_optima(goal, budget, seed),
    })
}

fn to_result(goal: &OptimizeGoal, c: &Candidate, starts: usize) -> OptimizeResult {
    let setting = MeasurementSetting::new(c.angles, goal.state).expect("finite angles");
    let report = report_at(&setting.angles(), &goal.state);
    OptimizeResult {
        setting,
        value: goal.kind.value_of(&report),
        report,
        starts,
        converged: c.converged,
    }
}

/// Best point over all starts.
pub fn optimize(goal: &OptimizeGoal, budget: &Budget, seed: u64) -> Result<OptimizeOutcome> {
    let found = candidates(goal, budget, seed)?;
    Ok(match found.first() {
        Some(best) => OptimizeOutcome::Found(to_result(goal, best, found.len())),
        None => OptimizeOutcome::NoFeasiblePoint,
    })
}

/// Supremum of `chsh` over the e-contextual region at `state`, or `None`
/// when no e-contextual setting was found.
pub fn zone3_boundary(state: &StateParam, budget: &Budget, seed: u64) -> Result<Option<f64>> {
    let goal = OptimizeGoal::new(GoalKind::MaxChshInZone3, *state);
    Ok(optimize(&goal, budget, seed)?.found().map(|r| r.value))
}

fn wrapped_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Distance between two settings after quotienting by angle wrap and the
/// eight scenario-preserving relabelings of class 1.
pub fn setting_distance(a: &MeasurementSetting, b: &MeasurementSetting) -> f64 {
    let target = b.angles();
    scenario_preserving(ClassId::One)
        .iter()
        .map(|p| {
            let x = p.apply(a).angles();
            x.iter()
                .zip(target.iter())
                .map(|(u, v)| wrapped_gap(*u, *v).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Up to `count` near-optimal local optima (within [`EXTREMAL_WINDOW`] of the
/// best) that are pairwise at least `distinctness` apart. For `max_chsh_e`
/// the window is ranked by `chsh`, largest first.
pub fn find_extremal_settings(
    goal: &OptimizeGoal,
    count: usize,
    distinctness: f64,
    budget: &Budget,
    seed: u64,
) -> Result<Vec<OptimizeResult>> {
    if count == 0 {
        return Err(Error::Config("count must be at least 1".into()));
    }
    let found = candidates(goal, budget, seed)?;
    let Some(best) = found.first().map(|c| c.objective) else {
        return Ok(Vec::new());
    };
    let mut window: Vec<OptimizeResult> = found
        .iter()
        .take_while(|c| c.objective >= best - EXTREMAL_WINDOW)
        .map(|c| to_result(goal, c, found.len()))
        .collect();
    // stable sort keeps the value order among equal keys
    window.sort_by(|a, b| {
        let key = |r: &OptimizeResult| goal.kind.tie_break(&r.report);
        key(b).total_cmp(&key(a))
    });
    let mut picked: Vec<OptimizeResult> = Vec::new();
    for r in window {
        if picked
            .iter()
            .all(|p| setting_distance(&p.setting, &r.setting) >= distinctness)
        {
            picked.push(r);
            if picked.len() == count {
                break;
            }
        }
    }
    Ok(picked)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleMode {
    /// `chsh_e > 0` under all three classes.
    EOnly,
    /// Additionally `chsh > 2` under all three classes.
    Both,
}

impl std::str::FromStr for TripleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e_only" | "e-only" => Ok(TripleMode::EOnly),
            "both" => Ok(TripleMode::Both),
            other => Err(Error::Config(format!("unknown triple mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleSearch {
    pub mode: TripleMode,
    pub state: StateParam,
    pub budget: Budget,
    pub seed: u64,
    /// Extra starting points tried before the random ones.
    pub starts_near: Vec<MeasurementSetting>,
    /// Minimum separation between returned settings.
    pub distinctness: f64,
}

impl TripleSearch {
    pub fn new(mode: TripleMode, state: StateParam, budget: Budget, seed: u64) -> Self {
        Self {
            mode,
            state,
            budget,
            seed,
            starts_near: Vec::new(),
            distinctness: 1e-3,
        }
    }
}

/// `min over classes` of the quantity that must be positive.
fn triple_margin(x: &[f64; 4], mode: TripleMode, state: &StateParam) -> f64 {
    let s = MeasurementSetting::new(*x, *state).expect("finite angles");
    let check = crate::scenario::triple_violation_check(&s);
    match mode {
        TripleMode::EOnly => check.min_chsh_e(),
        TripleMode::Both => check.min_chsh_e().min(check.min_chsh() - 2.0),
    }
}

/// Settings that stay e-contextual (and, in `Both` mode, c-contextual) under
/// every party assignment. Each start is accepted as is when it qualifies;
/// otherwise it is locally refined until it does or the budget runs out.
pub fn find_triple_violations(search: &TripleSearch) -> Result<Vec<MeasurementSetting>> {
    search.budget.validate()?;
    let streams = Substreams::new(derive_seed(search.seed, 5));
    let mut starts: Vec<[f64; 4]> = search.starts_near.iter().map(|s| s.angles()).collect();
    starts.extend((0..search.budget.starts as u64).map(|k| {
        let mut rng = streams.stream(k);
        [(); 4].map(|_| rng.next_f64() * PI)
    }));
    let state = search.state;
    let mode = search.mode;
    let hits: Vec<MeasurementSetting> = starts
        .par_iter()
        .filter_map(|x0| {
            let x = if triple_margin(x0, mode, &state) > 0.0 {
                *x0
            } else {
                maximize(
                    |y| triple_margin(y, mode, &state),
                    *x0,
                    &nm(&search.budget, 0.2, Some(0.0)),
                )
                .x
            };
            let setting = MeasurementSetting::new(x, state).expect("finite angles");
            (triple_margin(&setting.angles(), mode, &state) > 0.0).then_some(setting)
        })
        .collect();
    let mut out: Vec<MeasurementSetting> = Vec::new();
    for h in hits {
        if out
            .iter()
            .all(|o| setting_distance(o, &h) >= search.distinctness)
        {
            out.push(h);
        }
    }
    Ok(out)
}
