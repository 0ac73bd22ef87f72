use serde::{Deserialize, Serialize};

use crate::error::{Assumption, Error, Result};
use crate::geometry::{build_envelope, Envelope1D, Transition};
use crate::model::{ActionIndex, GameInstance, TypeId};
use crate::vecops::norm;

/// One witness of an assumption failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub assumption: Assumption,
    pub types: Vec<TypeId>,
    pub action: Option<ActionIndex>,
    pub point: Option<f64>,
    pub detail: String,
}

/// Outcome of the assumption validators. A flag is `None` when that
/// validator has not been run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub nonparallel_ok: Option<bool>,
    pub no_dominant_ok: Option<bool>,
    pub breakpoints_ok: Option<bool>,
    pub violations: Vec<Violation>,
}

impl AssumptionReport {
    pub fn merge(mut self, other: AssumptionReport) -> Self {
        self.nonparallel_ok = other.nonparallel_ok.or(self.nonparallel_ok);
        self.no_dominant_ok = other.no_dominant_ok.or(self.no_dominant_ok);
        self.breakpoints_ok = other.breakpoints_ok.or(self.breakpoints_ok);
        self.violations.extend(other.violations);
        self
    }

    /// True when every validator that ran passed.
    pub fn all_ok(&self) -> bool {
        [self.nonparallel_ok, self.no_dominant_ok, self.breakpoints_ok]
            .iter()
            .all(|f| f.unwrap_or(true))
    }

    pub fn holds(&self, which: Assumption) -> Option<bool> {
        match which {
            Assumption::Nonparallel => self.nonparallel_ok,
            Assumption::NoDominant => self.no_dominant_ok,
            Assumption::Breakpoints => self.breakpoints_ok,
        }
    }

    /// Converts a failed flag into the typed gate error.
    pub fn require(&self, which: Assumption) -> Result<()> {
        if self.holds(which) == Some(false) {
            let detail = self
                .violations
                .iter()
                .find(|v| v.assumption == which)
                .map(|v| v.detail.clone())
                .unwrap_or_default();
            return Err(Error::AssumptionViolated {
                assumption: which,
                detail,
            });
        }
        Ok(())
    }

    fn set(assumption: Assumption, violations: Vec<Violation>) -> Self {
        let ok = Some(violations.is_empty());
        let mut r = AssumptionReport {
            violations,
            ..Default::default()
        };
        match assumption {
            Assumption::Nonparallel => r.nonparallel_ok = ok,
            Assumption::NoDominant => r.no_dominant_ok = ok,
            Assumption::Breakpoints => r.breakpoints_ok = ok,
        }
        r
    }
}

/// Gradients whose angle has sine at most this are parallel.
pub const PARALLEL_SIN_TOL: f64 = 1e-9;

/// `sin ∠(u, w) ≤ PARALLEL_SIN_TOL`, computed as `‖û − ŵ‖·‖û + ŵ‖ / 2` to
/// avoid cancellation. A zero vector is parallel to everything.
fn parallel(u: &[f64], w: &[f64]) -> bool {
    let (nu, nw) = (norm(u), norm(w));
    if nu == 0.0 || nw == 0.0 {
        return true;
    }
    let mut minus = 0.0;
    let mut plus = 0.0;
    for (a, b) in u.iter().zip(w) {
        let (a, b) = (a / nu, b / nw);
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    0.5 * (minus * plus).sqrt() <= PARALLEL_SIN_TOL
}

/// Flags every action and type pair whose effective gradients are parallel.
/// In one effective dimension every pair is parallel.
pub fn check_assumption_nonparallel(game: &GameInstance) -> AssumptionReport {
    let space = &game.space;
    let grads: Vec<Vec<Vec<f64>>> = game
        .types
        .iter()
        .map(|ty| ty.directions().iter().map(|v| space.effective_gradient(v)).collect())
        .collect();
    let mut violations = Vec::new();
    for a in 0..game.n_types() {
        for b in a + 1..game.n_types() {
            for j in 0..game.n_actions() {
                let (u, w) = (&grads[a][j], &grads[b][j]);
                if parallel(u, w) {
                    violations.push(Violation {
                        assumption: Assumption::Nonparallel,
                        types: vec![game.types[a].id().clone(), game.types[b].id().clone()],
                        action: Some(j),
                        point: None,
                        detail: format!(
                            "types {} and {} have parallel gradients for action {j}{}",
                            game.types[a].id(),
                            game.types[b].id(),
                            if space.effective_dim() == 1 {
                                " (forced in one effective dimension)"
                            } else {
                                ""
                            }
                        ),
                    });
                }
            }
        }
    }
    AssumptionReport::set(Assumption::Nonparallel, violations)
}

pub(crate) fn envelopes(game: &GameInstance) -> Result<Vec<Envelope1D>> {
    game.types.iter().map(|ty| build_envelope(ty, &game.space)).collect()
}

/// Flags types whose upper envelope on `[0, 1]` is a single action.
pub fn check_assumption_no_dominant(game: &GameInstance) -> Result<AssumptionReport> {
    let envs = envelopes(game)?;
    let violations = game
        .types
        .iter()
        .zip(&envs)
        .filter(|(_, env)| env.has_dominant_action())
        .map(|(ty, env)| {
            let j = env.segments()[0].action;
            Violation {
                assumption: Assumption::NoDominant,
                types: vec![ty.id().clone()],
                action: Some(j),
                point: None,
                detail: format!("type {} has dominant action {j}", ty.id()),
            }
        })
        .collect();
    Ok(AssumptionReport::set(Assumption::NoDominant, violations))
}

/// Tolerance for treating two envelope breakpoints as shared.
pub const SHARED_BREAKPOINT_TOL: f64 = 1e-9;

/// Flags pairs of types with a shared breakpoint where both leave the same
/// action for different actions.
pub fn check_assumption_breakpoints(game: &GameInstance) -> Result<AssumptionReport> {
    let envs = envelopes(game)?;
    let mut events: Vec<(usize, Transition)> = envs
        .iter()
        .enumerate()
        .flat_map(|(k, e)| e.transitions().into_iter().map(move |tr| (k, tr)))
        .collect();
    events.sort_by(|a, b| a.1.at.total_cmp(&b.1.at).then(a.0.cmp(&b.0)));
    let mut violations = Vec::new();
    for i in 0..events.len() {
        for j in i + 1..events.len() {
            let ((ka, ta), (kb, tb)) = (&events[i], &events[j]);
            if tb.at - ta.at > SHARED_BREAKPOINT_TOL {
                break;
            }
            if ka != kb && ta.from == tb.from && ta.to != tb.to {
                let (a, b) = (*ka.min(kb), *ka.max(kb));
                let (ta, tb) = if *ka < *kb { (ta, tb) } else { (tb, ta) };
                violations.push(Violation {
                    assumption: Assumption::Breakpoints,
                    types: vec![game.types[a].id().clone(), game.types[b].id().clone()],
                    action: Some(ta.from),
                    point: Some(ta.at),
                    detail: format!(
                        "types {} and {} both leave action {} at t = {} (to {} and {})",
                        game.types[a].id(),
                        game.types[b].id(),
                        ta.from,
                        ta.at,
                        ta.to,
                        tb.to
                    ),
                });
            }
        }
    }
    Ok(AssumptionReport::set(Assumption::Breakpoints, violations))
}
