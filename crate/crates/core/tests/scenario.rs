use bellzones::rng::Substreams;
use bellzones::scan::{sample_setting, AngleRange};
use bellzones::scenario::{
    facet_check, forbidden_sweep, lhv_feasible, scenario_preserving, BOUNDARY_TOL,
};
use bellzones::{
    chsh_variants, contexts_for_assignment, evaluate_assignment, ClassId, MeasurementSetting,
    PartyAssignment, StateParam, Zone,
};

fn sorted_abs(v: [f64; 4]) -> [f64; 4] {
    let mut a = v.map(f64::abs);
    a.sort_by(f64::total_cmp);
    a
}

#[test]
fn relabelings_permute_sign_variant_magnitudes() {
    let streams = Substreams::new(5);
    for k in 0..10_000u64 {
        let al = 0.785 * (k % 7) as f64 / 6.0;
        let s = sample_setting(&streams, k, AngleRange::Full, StateParam::new(al).unwrap());
        for c in ClassId::ALL {
            let pa = PartyAssignment::canonical(c);
            let base = sorted_abs(chsh_variants(&contexts_for_assignment(&s, &pa)).as_array());
            for p in scenario_preserving(c) {
                let moved = chsh_variants(&contexts_for_assignment(&p.apply(&s), &pa)).as_array();
                let moved = sorted_abs(moved);
                for (x, y) in base.iter().zip(moved.iter()) {
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn forbidden_sweep_values_are_sign_variants() {
    let s = MeasurementSetting::new([0.40, 3.02, 2.72, 2.38], StateParam::maximal()).unwrap();
    let sweep = forbidden_sweep(&s, ClassId::One);
    let base = sweep.identity().report;
    let variants = base.sign_variants.as_array().map(f64::abs);
    for e in &sweep.entries {
        assert!(variants.iter().any(|v| (v - e.report.chsh).abs() < 1e-12));
        let t = base.entropic_variants.as_array();
        assert!(t.iter().any(|v| (v - e.report.chsh_e).abs() < 1e-12));
    }
}

#[test]
fn solver_agrees_with_facets_on_quantum_quads() {
    let streams = Substreams::new(21);
    let mut boundary = 0;
    for k in 0..3_000u64 {
        let al = 0.785 * (k % 5) as f64 / 4.0;
        let s = sample_setting(&streams, k, AngleRange::Full, StateParam::new(al).unwrap());
        let q = contexts_for_assignment(&s, &PartyAssignment::canonical(ClassId::One));
        let lp = lhv_feasible(&q).unwrap();
        let facets = facet_check(&q);
        if lp.boundary || facets.boundary {
            boundary += 1;
            continue;
        }
        assert_eq!(lp.feasible, facets.local, "{:?}", s.angles());
        if let Some(model) = lp.model {
            assert!(model.max_deviation(&q) < 1e-7);
            assert!((model.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
    assert!(boundary < 10);
}

#[test]
fn zone2_settings_have_a_unique_zone4_relabeling() {
    let streams = Substreams::new(31);
    let class1 = PartyAssignment::canonical(ClassId::One);
    let mut zone2 = 0;
    for k in 0..50_000u64 {
        let s = sample_setting(&streams, k, AngleRange::Half, StateParam::maximal());
        if evaluate_assignment(&s, &class1).zone != Zone::EntropicOnly {
            continue;
        }
        zone2 += 1;
        let sweep = forbidden_sweep(&s, ClassId::One);
        assert_eq!(
            sweep.landings(Zone::CorrelativeOnly).len(),
            1,
            "{:?}",
            s.angles()
        );
        assert!(sweep.landings(Zone::Both).is_empty());
        assert!(sweep.zone2_to_zone4().is_some());
        // with party exchange every landing shows up twice
        let all8 = sweep
            .entries
            .iter()
            .filter(|e| e.report.zone == Zone::CorrelativeOnly)
            .count();
        assert_eq!(all8, 2);
    }
    assert!(zone2 > 300);
}

#[test]
fn perfect_correlation_sits_on_a_facet() {
    let s = MeasurementSetting::new([0.0, 1.1, 0.0, 0.0], StateParam::maximal()).unwrap();
    let q = contexts_for_assignment(&s, &PartyAssignment::canonical(ClassId::One));
    let f = facet_check(&q);
    assert!(f.local && f.margin.abs() < BOUNDARY_TOL);
    assert!(lhv_feasible(&q).unwrap().feasible);
}
