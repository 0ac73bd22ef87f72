use crate::agent::{Agent, Choice, Dialogue};
use crate::error::{Assumption, Error, Result};
use crate::geometry::{find_interior_point, DEFAULT_INTERIOR_ATTEMPTS};
use crate::learners::{check_assumption_nonparallel, Identification};
use crate::model::{ActionIndex, GameInstance, Menu, Strategy, TieBreakRule, TypeId, DEFAULT_TAU};
use crate::vecops::{add_scaled, dist, norm};

/// Matching tolerance between observed and predicted ball choices.
pub const MATCH_TOL: f64 = 10.0 * DEFAULT_TAU;

#[derive(Clone, Debug)]
struct Prediction {
    id: TypeId,
    response: ActionIndex,
    choice: Strategy,
}

/// Precomputed ball menu plus the choice each type would make from it.
///
/// Preparing once and identifying many agents avoids repeating the interior
/// point search.
#[derive(Clone, Debug)]
pub struct SingleRoundPlan {
    center: Vec<f64>,
    radius: f64,
    predictions: Vec<Prediction>,
}

impl SingleRoundPlan {
    pub fn prepare(game: &GameInstance, seed: u64) -> Result<Self> {
        let report = check_assumption_nonparallel(game);
        report.require(Assumption::Nonparallel)?;
        if game.space.effective_dim() < 2 {
            return Err(Error::AssumptionViolated {
                assumption: Assumption::Nonparallel,
                detail: "effective dimension 1 forces parallel gradients".into(),
            });
        }
        let ip = find_interior_point(game, DEFAULT_INTERIOR_ATTEMPTS, seed)?;
        let radius = ip.radius_max / 2.0;
        let space = &game.space;
        let x_center = space.embed(&ip.center);
        let rule = TieBreakRule::default();
        let predictions = game
            .types
            .iter()
            .map(|ty| {
                let response = rule.select(&ty.utilities(&x_center.0));
                // optimal point on the ball for a fixed response
                let w = space.effective_gradient(&ty.directions()[response]);
                let wn = norm(&w);
                let t = if wn < 1e-12 {
                    ip.center.clone()
                } else {
                    add_scaled(&ip.center, radius / wn, &w)
                };
                Prediction {
                    id: ty.id().clone(),
                    response,
                    choice: space.embed(&t),
                }
            })
            .collect();
        Ok(SingleRoundPlan {
            center: ip.center,
            radius,
            predictions,
        })
    }

    pub fn menu(&self) -> Menu {
        Menu::Ball {
            center: self.center.clone(),
            radius: self.radius,
        }
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Predicted `(chosen strategy, response)` of a type.
    pub fn predicted(&self, id: &TypeId) -> Option<(&Strategy, ActionIndex)> {
        self.predictions
            .iter()
            .find(|p| &p.id == id)
            .map(|p| (&p.choice, p.response))
    }

    /// Maps an observed choice to the unique consistent type. Types whose
    /// response at the center differs from the observed one are excluded first.
    pub fn decode(&self, choice: &Choice) -> Result<TypeId> {
        let mut hits = self
            .predictions
            .iter()
            .filter(|p| p.response == choice.action)
            .filter(|p| dist(&p.choice.0, &choice.strategy.0) <= MATCH_TOL);
        let first = hits.next().ok_or(Error::NoMatch)?;
        if let Some(second) = hits.next() {
            return Err(Error::AmbiguousMatch {
                first: first.id.clone(),
                second: second.id.clone(),
            });
        }
        Ok(first.id.clone())
    }

    pub fn identify(&self, game: &GameInstance, agent: &mut dyn Agent) -> Result<Identification> {
        let mut dialogue = Dialogue::new(agent, &game.space);
        let choice = dialogue.post(self.menu())?;
        let id = self.decode(&choice)?;
        Ok(Identification {
            type_id: id.clone(),
            transcript: dialogue.finish(),
            survivors: vec![vec![id]],
            count_steps: Vec::new(),
        })
    }
}

/// Identifies the agent with one ball menu.
pub fn single_round_identify(game: &GameInstance, agent: &mut dyn Agent, seed: u64) -> Result<Identification> {
    SingleRoundPlan::prepare(game, seed)?.identify(game, agent)
}
