//! The agent side of the dialogue and the transcript-recording channel the
//! learners talk through.

use crate::error::{Error, Result};
use crate::model::{
    choose_from_ball_menu, choose_from_finite_menu, chosen_in_menu, ActionIndex, AgentType, Menu, Round, Strategy,
    StrategySpace, TieBreakRule, Transcript, TypeId,
};

/// A best-responding agent that can be shown menus.
pub trait Agent {
    /// Returns the chosen strategy (ambient coordinates) and the response action.
    fn respond(&mut self, menu: &Menu, space: &StrategySpace) -> Result<(Strategy, ActionIndex)>;

    /// Announces per-type tie-breaking conventions. Agents apply the entry for
    /// their own type, if any.
    fn install_tie_breaks(&mut self, _rules: &[(TypeId, TieBreakRule)]) {}
}

/// Myopic agent of a known type.
#[derive(Clone, Debug)]
pub struct SimulatedAgent {
    ty: AgentType,
    rule: TieBreakRule,
}

impl SimulatedAgent {
    pub fn new(ty: AgentType) -> Self {
        SimulatedAgent {
            ty,
            rule: TieBreakRule::default(),
        }
    }

    pub fn with_rule(ty: AgentType, rule: TieBreakRule) -> Self {
        SimulatedAgent { ty, rule }
    }

    pub fn agent_type(&self) -> &AgentType {
        &self.ty
    }
}

impl Agent for SimulatedAgent {
    fn respond(&mut self, menu: &Menu, space: &StrategySpace) -> Result<(Strategy, ActionIndex)> {
        match menu {
            Menu::Finite { items } => {
                let (_, x, j) = choose_from_finite_menu(&self.ty, items, &self.rule)?;
                Ok((x, j))
            }
            Menu::Ball { center, radius } => choose_from_ball_menu(&self.ty, space, center, *radius),
        }
    }

    fn install_tie_breaks(&mut self, rules: &[(TypeId, TieBreakRule)]) {
        if let Some((_, rule)) = rules.iter().find(|(id, _)| id == self.ty.id()) {
            self.rule = rule.clone();
        }
    }
}

/// Observation from one round.
#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub strategy: Strategy,
    pub action: ActionIndex,
    /// Position of the chosen item for finite menus.
    pub item: Option<usize>,
}

/// Sequential channel to an agent that records every round.
pub struct Dialogue<'a> {
    agent: &'a mut dyn Agent,
    space: &'a StrategySpace,
    transcript: Transcript,
}

impl<'a> Dialogue<'a> {
    pub fn new(agent: &'a mut dyn Agent, space: &'a StrategySpace) -> Self {
        Dialogue {
            agent,
            space,
            transcript: Transcript::default(),
        }
    }

    pub fn space(&self) -> &StrategySpace {
        self.space
    }

    pub fn rounds(&self) -> usize {
        self.transcript.round_count()
    }

    pub fn install_tie_breaks(&mut self, rules: &[(TypeId, TieBreakRule)]) {
        self.agent.install_tie_breaks(rules);
    }

    pub fn post(&mut self, menu: Menu) -> Result<Choice> {
        let (strategy, action) = self.agent.respond(&menu, self.space)?;
        if !chosen_in_menu(self.space, &menu, &strategy) {
            return Err(Error::InconsistentAgent(
                "agent chose a strategy outside the posted menu".into(),
            ));
        }
        let item = match &menu {
            Menu::Finite { items } => items.iter().position(|it| it == &strategy).or_else(|| {
                items.iter().position(|it| {
                    it.0.iter()
                        .zip(&strategy.0)
                        .all(|(a, b)| (a - b).abs() <= crate::model::FEASIBILITY_TOL)
                })
            }),
            Menu::Ball { .. } => None,
        };
        self.transcript.rounds.push(Round {
            menu,
            chosen: strategy.clone(),
            response: action,
        });
        Ok(Choice { strategy, action, item })
    }

    /// Posts a single strategy and returns the response.
    pub fn query(&mut self, x: Strategy) -> Result<ActionIndex> {
        Ok(self.post(Menu::single(x))?.action)
    }

    /// Posts a single effective point.
    pub fn query_effective(&mut self, t: &[f64]) -> Result<ActionIndex> {
        let x = self.space.embed(t);
        self.query(x)
    }

    pub fn finish(self) -> Transcript {
        self.transcript
    }
}
