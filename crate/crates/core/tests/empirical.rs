use std::io::Cursor;

use bellzones::empirical::{estimate, ingest_runs, simulate_runs, write_runs, RunLog, RunRecord};
use bellzones::reference::TABLE1;
use bellzones::{
    evaluate_assignment, ClassId, Error, MeasurementSetting, PartyAssignment, StateParam,
};
use proptest::prelude::*;

fn bit() -> impl Strategy<Value = u8> {
    0u8..2
}

proptest! {
    #[test]
    fn run_logs_round_trip(records in prop::collection::vec((bit(), bit(), bit(), bit()), 1..200)) {
        let log = RunLog {
            records: records
                .iter()
                .map(|&(x, y, a, b)| RunRecord::new(x, y, a, b).unwrap())
                .collect(),
            metadata: None,
        };
        let mut bytes = Vec::new();
        write_runs(&log, &mut bytes).unwrap();
        let back = ingest_runs(Cursor::new(bytes)).unwrap();
        prop_assert_eq!(back.records, log.records);
    }
}

#[test]
fn simulated_log_round_trips_with_metadata() {
    let s = MeasurementSetting::new(TABLE1[1].angles, StateParam::maximal()).unwrap();
    let log = simulate_runs(&s, 5_000, 3).unwrap();
    let mut bytes = Vec::new();
    write_runs(&log, &mut bytes).unwrap();
    let back = ingest_runs(Cursor::new(bytes)).unwrap();
    assert_eq!(back, log);
}

#[test]
fn estimates_converge_to_exact_values() {
    let s = MeasurementSetting::new(TABLE1[0].angles, StateParam::maximal()).unwrap();
    let exact = evaluate_assignment(&s, &PartyAssignment::canonical(ClassId::One));
    let est = estimate(&simulate_runs(&s, 400_000, 17).unwrap()).unwrap();
    assert!((est.chsh - exact.chsh).abs() < 0.02);
    assert!((est.chsh_e - exact.chsh_e).abs() < 0.02);
    assert!(est.spread.chsh > 0.0 && est.spread.chsh < 0.05);
    assert_eq!(est.counts.iter().sum::<u64>(), 400_000);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let text = "x,y,a,b\n0,1,1,0\n0,2,1,0\n";
    match ingest_runs(Cursor::new(text)) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
}
