use std::f64::consts::{FRAC_PI_4, SQRT_2};

use bellzones::optimize::{
    find_extremal_settings, find_triple_violations, optimize, setting_distance, zone3_boundary,
    Budget, GoalKind, OptimizeGoal, TripleMode, TripleSearch,
};
use bellzones::reference::TABLE3;
use bellzones::{
    evaluate_assignment, triple_violation_check, ClassId, MeasurementSetting, PartyAssignment,
    StateParam,
};

fn budget(starts: usize) -> Budget {
    Budget {
        starts,
        ..Budget::default()
    }
}

#[test]
fn reported_value_matches_reevaluation() {
    for kind in [
        GoalKind::MaxChsh,
        GoalKind::MaxChshE,
        GoalKind::MaxChshInZone3,
    ] {
        let goal = OptimizeGoal::new(kind, StateParam::maximal());
        let r = optimize(&goal, &budget(32), 4).unwrap().found().unwrap();
        let again = evaluate_assignment(&r.setting, &PartyAssignment::canonical(ClassId::One));
        assert!((kind.value_of(&again) - r.value).abs() < 1e-9, "{kind:?}");
        assert_eq!(again.zone, r.report.zone);
    }
}

#[test]
fn max_chsh_is_monotone_in_alpha() {
    let mut last = 0.0;
    for k in 0..=8 {
        let state = StateParam::new(FRAC_PI_4 * f64::from(k) / 8.0).unwrap();
        let goal = OptimizeGoal::new(GoalKind::MaxChsh, state);
        let v = optimize(&goal, &budget(32), 1)
            .unwrap()
            .found()
            .unwrap()
            .value;
        let horodecki = 2.0 * (1.0 + state.sin_2alpha().powi(2)).sqrt();
        assert!(
            (v - horodecki).abs() < 1e-6,
            "alpha index {k}: {v} vs {horodecki}"
        );
        assert!(v >= last - 1e-9);
        last = v;
    }
    assert!((last - 2.0 * SQRT_2).abs() < 1e-6);
}

#[test]
fn product_state_max_chsh_is_classical() {
    let goal = OptimizeGoal::new(GoalKind::MaxChsh, StateParam::product());
    let v = optimize(&goal, &budget(16), 1)
        .unwrap()
        .found()
        .unwrap()
        .value;
    assert!((v - 2.0).abs() < 1e-9);
    assert_eq!(
        zone3_boundary(&StateParam::product(), &budget(16), 1).unwrap(),
        None
    );
}

#[test]
fn extremal_entropic_settings() {
    let goal = OptimizeGoal::new(GoalKind::MaxChshE, StateParam::maximal());
    let found = find_extremal_settings(&goal, 2, 0.1, &budget(128), 2).unwrap();
    assert_eq!(found.len(), 2);
    for r in &found {
        assert!(r.report.chsh_e >= 0.232, "{}", r.report.chsh_e);
        assert!((r.report.chsh - 2.25).abs() <= 0.02, "{}", r.report.chsh);
    }
    assert!(setting_distance(&found[0].setting, &found[1].setting) >= 0.1);
}

#[test]
fn extremal_correlative_settings() {
    let goal = OptimizeGoal::new(GoalKind::MaxChsh, StateParam::maximal());
    let found = find_extremal_settings(&goal, 2, 0.1, &budget(128), 3).unwrap();
    assert_eq!(found.len(), 2);
    for r in &found {
        assert!((r.report.chsh - 2.828).abs() < 1e-3);
        assert!(
            (r.report.chsh_e + 1.21).abs() <= 0.02,
            "{}",
            r.report.chsh_e
        );
    }
}

#[test]
fn extremal_product_state() {
    let goal = OptimizeGoal::new(GoalKind::MaxChsh, StateParam::product());
    let found = find_extremal_settings(&goal, 1, 0.1, &budget(16), 3).unwrap();
    assert!((found[0].value - 2.0).abs() < 1e-9);
}

#[test]
fn min_chsh_e_at_max_chsh() {
    let goal = OptimizeGoal::new(GoalKind::MinChshEAtMaxChsh, StateParam::maximal());
    let r = optimize(&goal, &budget(64), 5).unwrap().found().unwrap();
    assert!((r.report.chsh - 2.0 * SQRT_2).abs() < 1e-5);
    assert!(r.report.chsh_e < -1.2, "{}", r.report.chsh_e);
}

fn near(angles: [f64; 4], offset: f64) -> MeasurementSetting {
    MeasurementSetting::new(angles.map(|a| a + offset), StateParam::maximal()).unwrap()
}

#[test]
fn triple_search_recovers_known_e_only_setting() {
    let seed = near(TABLE3[0].angles, 0.01);
    let mut search = TripleSearch::new(TripleMode::EOnly, StateParam::maximal(), budget(4), 1);
    search.starts_near = vec![seed];
    let found = find_triple_violations(&search).unwrap();
    let reference = near(TABLE3[0].angles, 0.0);
    assert!(found
        .iter()
        .any(|s| setting_distance(s, &reference) <= 0.05));
    for s in &found {
        assert!(triple_violation_check(s).all_e_contextual);
    }
}

#[test]
fn triple_search_accepts_known_both_setting() {
    let seed = near(TABLE3[1].angles, 0.0);
    let mut search = TripleSearch::new(TripleMode::Both, StateParam::maximal(), budget(1), 1);
    search.starts_near = vec![seed];
    let found = find_triple_violations(&search).unwrap();
    assert_eq!(found[0].angles(), seed.angles());
    assert!(triple_violation_check(&found[0]).all_both_contextual);
}

#[test]
fn triple_search_finds_nothing_for_product_state() {
    let search = TripleSearch::new(TripleMode::EOnly, StateParam::product(), budget(8), 1);
    assert!(find_triple_violations(&search).unwrap().is_empty());
}
