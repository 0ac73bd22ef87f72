//! Learning an agent's private type in principal–agent games by posting
//! menus of strategies and watching revealed preferences.

pub mod agent;
pub mod error;
pub mod games;
pub mod geometry;
pub mod io;
pub mod learners;
pub mod model;
mod vecops;

pub use agent::{Agent, Choice, Dialogue, SimulatedAgent};
pub use error::{Assumption, Error, Result};
pub use learners::{Identification, LearnerReport, ReconstructedType};
pub use model::{
    best_response, choose_from_ball_menu, choose_from_finite_menu, utility, ActionIndex, AgentType, GameClass,
    GameInstance, LinearConstraint, Menu, Round, Strategy, StrategySpace, TieBreakRule, Transcript, TypeId,
    DEFAULT_TAU,
};
