//! Correlative and entropic CHSH inequalities for two qubits measured in the
//! Y–Z plane: evaluation, zone classification, party reassignment, Monte
//! Carlo scans, extremal searches and finite-statistics estimation.

pub mod empirical;
pub mod error;
pub mod info;
pub mod optimize;
pub mod quantum;
pub mod reference;
pub mod rng;
pub mod scan;
pub mod scenario;

pub use error::{Error, Result};
pub use info::{
    binary_entropy, chsh_e_value, chsh_value, chsh_variants, entropic_variants, joint_entropy,
    marginal_entropy, ContextQuad, EntropicVariants, SignVariants,
};
pub use quantum::{
    correlator, joint_distribution, marginal_expectation, JointDistribution, MeasurementSetting,
    Observable, Party, StateParam,
};
pub use scenario::{
    classify_zone, contexts_for_assignment, evaluate_assignment, triple_violation_check, ClassId,
    PartyAssignment, TripleCheck, Zone, ZoneReport,
};
