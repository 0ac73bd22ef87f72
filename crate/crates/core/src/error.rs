use std::fmt;

use crate::model::TypeId;

/// Which structural assumption a validator or learner gate refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    /// No two types share parallel effective gradients for any action.
    Nonparallel,
    /// No type has a dominant action on the unit interval.
    NoDominant,
    /// No two types leave the same action for different actions at a shared breakpoint.
    Breakpoints,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assumption::Nonparallel => write!(f, "non-parallel gradients"),
            Assumption::NoDominant => write!(f, "no dominant action"),
            Assumption::Breakpoints => write!(f, "no shared breakpoint transitions"),
        }
    }
}

/// Per-action parameters that a partial reconstruction managed to pin down.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialReconstruction {
    pub directions: Vec<Vec<f64>>,
    /// `(scale, intercept)` per action, `None` where no hyperplane link was found.
    pub links: Vec<Option<(f64, f64)>>,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("action index {index} out of range for {actions} actions")]
    ActionOutOfRange { index: usize, actions: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid strategy space: {0}")]
    InvalidSpace(String),

    #[error("invalid agent type: {0}")]
    InvalidType(String),

    #[error("invalid game instance: {0}")]
    InvalidGame(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("menu is empty")]
    EmptyMenu,

    #[error("ball of radius {radius} is not contained in the strategy space")]
    BallNotContained { radius: f64 },

    #[error("strategy is not feasible")]
    InfeasibleStrategy,

    #[error("operation requires effective dimension {expected}, space has {got}")]
    WrongEffectiveDim { expected: &'static str, got: usize },

    #[error("no point with positive margin for every type after {attempts} attempts")]
    NoInteriorPoint { attempts: usize },

    #[error("bisection endpoints both elicit action {action}")]
    SameResponse { action: usize },

    #[error("hyperplane points are degenerate (projection spread {spread:e})")]
    DegenerateSpread { spread: f64 },

    #[error("solved scale {scale} is not positive")]
    NonpositiveScale { scale: f64 },

    #[error("assumption violated ({assumption}): {detail}")]
    AssumptionViolated { assumption: Assumption, detail: String },

    #[error("observation matches both {first} and {second}")]
    AmbiguousMatch { first: TypeId, second: TypeId },

    #[error("observation matches no type in the candidate set")]
    NoMatch,

    #[error("types {0:?} cannot be separated by any tie-breaking assignment")]
    IndistinguishableTypes(Vec<TypeId>),

    #[error("best-response count jumps by {jump} at t = {at}")]
    CountJump { at: f64, jump: i64 },

    #[error("radius shrinking exhausted for action {action}: oracle strategy is not interior to its region")]
    ShrinkExhausted { action: usize },

    #[error("action {action} has a zero gradient; its direction cannot be recovered")]
    ZeroGradient { action: usize },

    #[error("region adjacency graph disconnected; actions {missing:?} undetermined")]
    Disconnected {
        missing: Vec<usize>,
        partial: Box<PartialReconstruction>,
    },

    #[error("agent behaved inconsistently: {0}")]
    InconsistentAgent(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
