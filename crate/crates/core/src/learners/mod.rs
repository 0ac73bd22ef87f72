//! Learners that identify or reconstruct the agent's private type.

pub mod assumptions;
mod equivalence;
mod infinite;
mod menu;
mod output;
mod single_round;
mod single_strategy;

use serde::{Deserialize, Serialize};

use crate::model::{Transcript, TypeId};

pub use assumptions::{
    check_assumption_breakpoints, check_assumption_no_dominant, check_assumption_nonparallel, AssumptionReport,
    Violation, PARALLEL_SIN_TOL, SHARED_BREAKPOINT_TOL,
};
pub use equivalence::behaviorally_equivalent;
pub use infinite::{
    learn_infinite_type, InfiniteOutcome, OracleStrategies, ReconstructedType, ATTEMPTS_PER_PAIR, MAX_HALVINGS,
    POINTS_PER_LINK,
};
pub use menu::{learn_via_menu, SHARED_MINIMIZER_TOL};
pub use output::LearnerReport;
pub use single_round::{single_round_identify, SingleRoundPlan, MATCH_TOL};
pub use single_strategy::{learn_via_single_strategy, CountProfile};

/// Result of a finite-type learner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Identification {
    pub type_id: TypeId,
    pub transcript: Transcript,
    /// Candidate ids remaining after each round.
    pub survivors: Vec<Vec<TypeId>>,
    /// Signed count changes observed at breakpoints (single-strategy learner only).
    pub count_steps: Vec<i64>,
}

/// `⌈log₂ k⌉ + 1`, the round budget of the one-dimensional learners.
pub fn halving_bound(k: usize) -> usize {
    let mut bits = 0;
    while (1usize << bits) < k {
        bits += 1;
    }
    bits + 1
}
