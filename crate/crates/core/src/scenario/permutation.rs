use std::fmt;

use super::{evaluate_assignment, ClassId, PartyAssignment, Zone, ZoneReport};
use crate::error::{Error, Result};
use crate::quantum::MeasurementSetting;

/// A relabeling of the four observables. Applying it to a setting puts the
/// observable `X_{σ(k)}` into slot `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObservablePermutation {
    map: [usize; 4],
}

impl ObservablePermutation {
    pub const IDENTITY: Self = Self { map: [0, 1, 2, 3] };

    pub fn new(map: [usize; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        for &m in &map {
            if m > 3 || seen[m] {
                return Err(Error::Domain(format!(
                    "{map:?} is not a permutation of 0..4"
                )));
            }
            seen[m] = true;
        }
        Ok(Self { map })
    }

    /// Exchange of two observables (zero-based indices).
    pub fn swap(i: usize, j: usize) -> Result<Self> {
        if i > 3 || j > 3 {
            return Err(Error::Domain(format!("swap indices {i}, {j} out of range")));
        }
        let mut map = [0, 1, 2, 3];
        map.swap(i, j);
        Ok(Self { map })
    }

    /// All 24 permutations in lexicographic order (identity first).
    pub fn all() -> Vec<Self> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        if let Ok(p) = Self::new([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn map(&self) -> [usize; 4] {
        self.map
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Apply `self`, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            map: next.map.map(|k| self.map[k]),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut map = [0; 4];
        for (k, &m) in self.map.iter().enumerate() {
            map[m] = k;
        }
        Self { map }
    }

    pub fn apply(&self, s: &MeasurementSetting) -> MeasurementSetting {
        let obs = s.observables();
        MeasurementSetting::from_observables(self.map.map(|k| obs[k]), s.state)
    }

    /// Class whose partition is the image of `class_id`'s partition.
    pub fn act_on_class(&self, class_id: ClassId) -> ClassId {
        let (a, _) = class_id.parties();
        ClassId::of_block(a.map(|k| self.map[k])).expect("image of a block is a block")
    }

    /// Whether party A′ of `class_id` is mapped onto itself (no party
    /// exchange).
    pub fn preserves_orientation(&self, class_id: ClassId) -> bool {
        let (a, _) = class_id.parties();
        a.iter().all(|k| a.contains(&self.map[*k]))
    }
}

impl fmt::Display for ObservablePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.map.iter().map(|k| format!("X{}", k + 1)).collect();
        write!(f, "[{}]", cells.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationKind {
    /// Keeps the class's party partition (same marginal scenario).
    ScenarioPreserving,
    /// Moves to the marginal scenario of the target class.
    Exotic(ClassId),
}

pub fn classify_permutation(sigma: &ObservablePermutation, class_id: ClassId) -> PermutationKind {
    let target = sigma.act_on_class(class_id);
    if target == class_id {
        PermutationKind::ScenarioPreserving
    } else {
        PermutationKind::Exotic(target)
    }
}

/// One relabeling of a forbidden sweep and its canonical evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepEntry {
    pub permutation: ObservablePermutation,
    /// The relabeling exchanges the two parties.
    pub party_exchange: bool,
    pub report: ZoneReport,
}

/// Canonical inequalities evaluated on every scenario-preserving relabeling.
#[derive(Debug, Clone, PartialEq)]
pub struct ForbiddenSweep {
    pub class_id: ClassId,
    /// Eight entries; the identity comes first.
    pub entries: Vec<SweepEntry>,
}

impl ForbiddenSweep {
    pub fn identity(&self) -> &SweepEntry {
        &self.entries[0]
    }

    /// Non-identity relabelings without party exchange that land in `zone`.
    /// Party exchange leaves every functional unchanged, so these are the
    /// inequivalent landings.
    pub fn landings(&self, zone: Zone) -> Vec<ObservablePermutation> {
        self.entries
            .iter()
            .filter(|e| !e.permutation.is_identity() && !e.party_exchange && e.report.zone == zone)
            .map(|e| e.permutation)
            .collect()
    }

    /// For an anomalous (zone 2) input, the single relabeling that moves it
    /// into zone 4. `None` if the input is not in zone 2 or the landing is
    /// not unique.
    pub fn zone2_to_zone4(&self) -> Option<ObservablePermutation> {
        if self.identity().report.zone != Zone::EntropicOnly {
            return None;
        }
        match self.landings(Zone::CorrelativeOnly).as_slice() {
            [only] => Some(*only),
            _ => None,
        }
    }
}

/// The eight scenario-preserving relabelings of `class_id`, identity first.
pub fn scenario_preserving(class_id: ClassId) -> Vec<ObservablePermutation> {
    ObservablePermutation::all()
        .into_iter()
        .filter(|p| classify_permutation(p, class_id) == PermutationKind::ScenarioPreserving)
        .collect()
}

/// Applies each scenario-preserving relabeling and evaluates the canonical
/// inequalities on the result, without switching to the matching variant.
pub fn forbidden_sweep(s: &MeasurementSetting, class_id: ClassId) -> ForbiddenSweep {
    let pa = PartyAssignment::canonical(class_id);
    let entries = scenario_preserving(class_id)
        .into_iter()
        .map(|permutation| SweepEntry {
            permutation,
            party_exchange: !permutation.preserves_orientation(class_id),
            report: evaluate_assignment(&permutation.apply(s), &pa),
        })
        .collect();
    ForbiddenSweep { class_id, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::StateParam;

    #[test]
    fn rejects_non_bijections() {
        assert!(ObservablePermutation::new([0, 0, 1, 2]).is_err());
        assert!(ObservablePermutation::new([0, 1, 2, 4]).is_err());
        assert!(ObservablePermutation::swap(0, 4).is_err());
        assert_eq!(ObservablePermutation::all().len(), 24);
    }

    #[test]
    fn classify_examples() {
        let id = ObservablePermutation::IDENTITY;
        assert_eq!(
            classify_permutation(&id, ClassId::One),
            PermutationKind::ScenarioPreserving
        );
        let swap_b = ObservablePermutation::swap(2, 3).unwrap();
        assert_eq!(
            classify_permutation(&swap_b, ClassId::One),
            PermutationKind::ScenarioPreserving
        );
        // A_0 <-> B_0 sends {X1,X2 | X3,X4} to {X3,X2 | X1,X4} = {X1,X4 | X2,X3}
        let swap_a0_b0 = ObservablePermutation::swap(0, 2).unwrap();
        assert_eq!(
            classify_permutation(&swap_a0_b0, ClassId::One),
            PermutationKind::Exotic(ClassId::Two)
        );
    }

    #[test]
    fn eight_preserving_per_class() {
        for c in ClassId::ALL {
            let keep = scenario_preserving(c);
            assert_eq!(keep.len(), 8);
            assert!(keep[0].is_identity());
            assert_eq!(
                keep.iter().filter(|p| p.preserves_orientation(c)).count(),
                4
            );
        }
    }

    #[test]
    fn class_action_respects_composition() {
        let all = ObservablePermutation::all();
        for s in &all {
            assert_eq!(s.then(&s.inverse()), ObservablePermutation::IDENTITY);
            for t in &all {
                for c in ClassId::ALL {
                    assert_eq!(s.then(t).act_on_class(c), s.act_on_class(t.act_on_class(c)));
                }
            }
        }
    }

    #[test]
    fn apply_then_matches_sequential_application() {
        let s = MeasurementSetting::new([0.1, 0.2, 0.3, 0.4], StateParam::maximal()).unwrap();
        let p = ObservablePermutation::new([1, 3, 0, 2]).unwrap();
        let q = ObservablePermutation::new([2, 0, 3, 1]).unwrap();
        assert_eq!(q.apply(&p.apply(&s)), p.then(&q).apply(&s));
    }

    #[test]
    fn forbidden_sweep_table3_row1() {
        let s = MeasurementSetting::new([0.40, 3.02, 2.72, 2.38], StateParam::maximal()).unwrap();
        let sweep = forbidden_sweep(&s, ClassId::One);
        assert_eq!(sweep.entries.len(), 8);
        assert_eq!(
            sweep.identity().report,
            evaluate_assignment(&s, &PartyAssignment::canonical(ClassId::One))
        );
        assert_eq!(sweep.identity().report.zone, Zone::EntropicOnly);

        let find = |p: ObservablePermutation| {
            sweep
                .entries
                .iter()
                .find(|e| e.permutation == p)
                .unwrap()
                .report
        };
        let r = find(ObservablePermutation::swap(2, 3).unwrap());
        assert!((r.chsh - 2.1565).abs() < 1e-3);
        assert!((r.chsh_e + 0.5203).abs() < 1e-3);
        assert_eq!(r.zone, Zone::CorrelativeOnly);

        let r = find(ObservablePermutation::swap(0, 1).unwrap());
        assert!((r.chsh - 1.4263).abs() < 1e-3);
        assert_ne!(r.zone, Zone::CorrelativeOnly);

        assert_eq!(
            sweep.zone2_to_zone4(),
            Some(ObservablePermutation::swap(2, 3).unwrap())
        );
        assert!(sweep.landings(Zone::Both).is_empty());
    }

    #[test]
    fn party_exchange_leaves_report_unchanged() {
        let s =
            MeasurementSetting::new([0.9, 2.1, 4.0, 5.2], StateParam::new(0.4).unwrap()).unwrap();
        for c in ClassId::ALL {
            let sweep = forbidden_sweep(&s, c);
            let base = sweep.identity().report;
            let exchanged: Vec<_> = sweep.entries.iter().filter(|e| e.party_exchange).collect();
            assert_eq!(exchanged.len(), 4);
            // one party exchange maps the canonical combination to itself
            assert!(exchanged
                .iter()
                .any(|e| (e.report.chsh - base.chsh).abs() < 1e-12
                    && (e.report.chsh_e - base.chsh_e).abs() < 1e-12));
        }
    }
}
