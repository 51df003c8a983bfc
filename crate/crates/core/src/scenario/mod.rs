//! Party assignments, zone classification and the permutation algebra on
//! the four observables `X1 = A_0`, `X2 = A_1`, `X3 = B_0`, `X4 = B_1`.
//!
//! Each observable keeps its angle whatever party it is assigned to; a
//! context `(A′_i, B′_j)` measures `A′_i` on the first qubit and `B′_j` on
//! the second. The correlator is symmetric under qubit exchange, so the
//! choice of qubit does not affect any functional.

mod lhv;
mod permutation;

pub use lhv::{
    facet_check, lhv_feasible, FacetCheck, HiddenVariableModel, LhvOutcome, BOUNDARY_TOL,
};
pub use permutation::{
    classify_permutation, forbidden_sweep, scenario_preserving, ForbiddenSweep,
    ObservablePermutation, PermutationKind, SweepEntry,
};

use std::fmt;

use crate::error::{require_finite, Error, Result};
use crate::info::{entropic_variants, ContextQuad, EntropicVariants, SignVariants};
use crate::quantum::{MeasurementSetting, Trig};

/// The three ways to split four observables into two parties of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassId {
    /// `{X1, X2 | X3, X4}`
    One,
    /// `{X1, X4 | X2, X3}`
    Two,
    /// `{X1, X3 | X2, X4}`
    Three,
}

impl ClassId {
    pub const ALL: [ClassId; 3] = [ClassId::One, ClassId::Two, ClassId::Three];

    pub fn id(self) -> u8 {
        match self {
            ClassId::One => 1,
            ClassId::Two => 2,
            ClassId::Three => 3,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(ClassId::One),
            2 => Ok(ClassId::Two),
            3 => Ok(ClassId::Three),
            other => Err(Error::Domain(format!(
                "class id must be 1, 2 or 3, got {other}"
            ))),
        }
    }

    /// Canonical ordered parties as zero-based observable indices.
    pub fn parties(self) -> ([usize; 2], [usize; 2]) {
        match self {
            ClassId::One => ([0, 1], [2, 3]),
            ClassId::Two => ([0, 3], [1, 2]),
            ClassId::Three => ([0, 2], [1, 3]),
        }
    }

    /// Class of the unordered partition whose first block is `block`.
    pub fn of_block(block: [usize; 2]) -> Result<Self> {
        let mut b = block;
        b.sort_unstable();
        if b[0] == b[1] || b[1] > 3 {
            return Err(Error::Domain(format!("invalid party block {block:?}")));
        }
        // the class is fixed by which observable shares a party with X1
        let partner = if b[0] == 0 {
            b[1]
        } else {
            // complement holds X1
            (0..4)
                .find(|k| *k != 0 && !b.contains(k))
                .expect("four labels")
        };
        Ok(match partner {
            1 => ClassId::One,
            3 => ClassId::Two,
            _ => ClassId::Three,
        })
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class {}", self.id())
    }
}

/// Ordered parties `A′ = (A′0, A′1)` and `B′ = (B′0, B′1)` over observable
/// indices `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartyAssignment {
    class_id: ClassId,
    a: [usize; 2],
    b: [usize; 2],
}

impl PartyAssignment {
    pub fn new(a: [usize; 2], b: [usize; 2]) -> Result<Self> {
        let mut all = [a[0], a[1], b[0], b[1]];
        all.sort_unstable();
        if all != [0, 1, 2, 3] {
            return Err(Error::Domain(format!(
                "parties {a:?} and {b:?} do not partition the four observables"
            )));
        }
        Ok(Self {
            class_id: ClassId::of_block(a)?,
            a,
            b,
        })
    }

    pub fn canonical(class_id: ClassId) -> Self {
        let (a, b) = class_id.parties();
        Self { class_id, a, b }
    }

    pub fn class_id(&self) -> ClassId {
        self.class_id
    }

    pub fn party_a(&self) -> [usize; 2] {
        self.a
    }

    pub fn party_b(&self) -> [usize; 2] {
        self.b
    }
}

/// Position of a setting relative to the two inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Zone {
    /// Neither inequality violated.
    NonContextual,
    /// Only the entropic inequality violated: the anomalous zone.
    EntropicOnly,
    /// Both violated.
    Both,
    /// Only the correlative inequality violated.
    CorrelativeOnly,
}

impl Zone {
    pub const ALL: [Zone; 4] = [
        Zone::NonContextual,
        Zone::EntropicOnly,
        Zone::Both,
        Zone::CorrelativeOnly,
    ];

    pub fn id(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn index(self) -> usize {
        match self {
            Zone::NonContextual => 0,
            Zone::EntropicOnly => 1,
            Zone::Both => 2,
            Zone::CorrelativeOnly => 3,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1..=4 => Ok(Zone::ALL[usize::from(id) - 1]),
            other => Err(Error::Domain(format!("zone id must be 1..=4, got {other}"))),
        }
    }

    #[inline]
    pub(crate) fn of(chsh: f64, chsh_e: f64) -> Self {
        match (chsh > 2.0, chsh_e > 0.0) {
            (false, false) => Zone::NonContextual,
            (false, true) => Zone::EntropicOnly,
            (true, true) => Zone::Both,
            (true, false) => Zone::CorrelativeOnly,
        }
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Zone membership with non-strict classical boundaries: `chsh ≤ 2` and
/// `chsh_e ≤ 0` count as not violated.
pub fn classify_zone(chsh: f64, chsh_e: f64) -> Result<Zone> {
    require_finite("chsh", chsh)?;
    require_finite("chsh_e", chsh_e)?;
    Ok(Zone::of(chsh, chsh_e))
}

/// Both functionals, all their variants, and the zone of one quad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneReport {
    pub chsh: f64,
    pub chsh_e: f64,
    pub zone: Zone,
    pub sign_variants: SignVariants,
    pub entropic_variants: EntropicVariants,
}

impl ZoneReport {
    pub fn from_quad(q: &ContextQuad) -> Self {
        let sign_variants = SignVariants::from_correlators(q.correlators());
        let entropic_variants = entropic_variants(q);
        let chsh = sign_variants.s1.abs();
        let chsh_e = entropic_variants.t11;
        Self {
            chsh,
            chsh_e,
            zone: Zone::of(chsh, chsh_e),
            sign_variants,
            entropic_variants,
        }
    }

    /// Signed canonical combination `S1`.
    pub fn signed_chsh(&self) -> f64 {
        self.sign_variants.s1
    }
}

/// The four contexts of `s` under party assignment `pa`.
pub fn contexts_for_assignment(s: &MeasurementSetting, pa: &PartyAssignment) -> ContextQuad {
    let trig = s.angles().map(Trig::of);
    quad_from_trig(&trig, pa, s)
}

pub(crate) fn quad_from_trig(
    trig: &[Trig; 4],
    pa: &PartyAssignment,
    s: &MeasurementSetting,
) -> ContextQuad {
    let d = |i: usize, j: usize| trig[pa.a[i]].joint(&trig[pa.b[j]], &s.state);
    ContextQuad::new_unchecked([d(0, 0), d(0, 1), d(1, 0), d(1, 1)])
}

/// Canonical functionals and zone of `s` under `pa`.
pub fn evaluate_assignment(s: &MeasurementSetting, pa: &PartyAssignment) -> ZoneReport {
    ZoneReport::from_quad(&contexts_for_assignment(s, pa))
}

/// Reports for all three classes of one setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleCheck {
    /// Indexed by class 1, 2, 3.
    pub reports: [ZoneReport; 3],
    /// `chsh_e > 0` under every class.
    pub all_e_contextual: bool,
    /// `chsh_e > 0` and `chsh > 2` under every class.
    pub all_both_contextual: bool,
}

impl TripleCheck {
    pub fn report(&self, class_id: ClassId) -> &ZoneReport {
        &self.reports[usize::from(class_id.id() - 1)]
    }

    pub fn min_chsh_e(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.chsh_e)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_chsh(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.chsh)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates the setting under every non-equivalent party assignment.
pub fn triple_violation_check(s: &MeasurementSetting) -> TripleCheck {
    let trig = s.angles().map(Trig::of);
    let reports = ClassId::ALL
        .map(|c| ZoneReport::from_quad(&quad_from_trig(&trig, &PartyAssignment::canonical(c), s)));
    let all_e_contextual = reports.iter().all(|r| r.chsh_e > 0.0);
    let all_both_contextual = all_e_contextual && reports.iter().all(|r| r.chsh > 2.0);
    TripleCheck {
        reports,
        all_e_contextual,
        all_both_contextual,
    }
}
