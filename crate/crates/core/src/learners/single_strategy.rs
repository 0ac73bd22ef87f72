use crate::agent::{Agent, Dialogue};
use crate::error::{Assumption, Error, Result};
use crate::geometry::Envelope1D;
use crate::learners::assumptions::envelopes;
use crate::learners::{
    check_assumption_breakpoints, check_assumption_no_dominant, Identification, SHARED_BREAKPOINT_TOL,
};
use crate::model::{ActionIndex, GameInstance, TieBreakRule};

/// Piecewise-constant count of candidates responding `action` on the cells
/// between merged envelope breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct CountProfile {
    /// Cell boundaries, starting at 0 and ending at 1.
    pub edges: Vec<f64>,
    /// Count in the interior of each cell.
    pub counts: Vec<usize>,
}

impl CountProfile {
    /// Signed count changes between consecutive cells.
    pub fn steps(&self) -> Vec<i64> {
        self.counts.windows(2).map(|w| w[1] as i64 - w[0] as i64).collect()
    }
}

/// Sweeps the candidates' envelope transitions into and out of `action`.
/// Transitions closer than [`SHARED_BREAKPOINT_TOL`] share one edge.
fn count_profile(envs: &[Envelope1D], candidates: &[usize], action: ActionIndex) -> CountProfile {
    let mut events: Vec<(f64, i64)> = Vec::new();
    let mut start = 0usize;
    for &k in candidates {
        if envs[k].segments()[0].action == action {
            start += 1;
        }
        for tr in envs[k].transitions() {
            if tr.from == action {
                events.push((tr.at, -1));
            } else if tr.to == action {
                events.push((tr.at, 1));
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut edges = vec![0.0];
    let mut counts = vec![start];
    let mut i = 0;
    while i < events.len() {
        let at = events[i].0;
        let mut delta = 0;
        while i < events.len() && events[i].0 - at <= SHARED_BREAKPOINT_TOL {
            delta += events[i].1;
            i += 1;
        }
        if delta != 0 {
            edges.push(at);
            let last = *counts.last().unwrap() as i64;
            counts.push((last + delta).max(0) as usize);
        }
    }
    edges.push(1.0);
    CountProfile { edges, counts }
}

/// Halving with one posted strategy per round.
///
/// Each round either plays `t = 0` (when no action is shared by more than
/// half the candidates there) or the leftmost point where exactly half of the
/// candidates still respond with the most common action at `t = 0`.
pub fn learn_via_single_strategy(game: &GameInstance, agent: &mut dyn Agent) -> Result<Identification> {
    check_assumption_no_dominant(game)?.require(Assumption::NoDominant)?;
    check_assumption_breakpoints(game)?.require(Assumption::Breakpoints)?;
    let envs = envelopes(game)?;
    let rule = TieBreakRule::default();
    let space = &game.space;
    let mut dialogue = Dialogue::new(agent, space);
    let mut candidates: Vec<usize> = (0..game.n_types()).collect();
    let mut survivors = Vec::new();
    let mut count_steps = Vec::new();

    let respond = |k: usize, t: f64| rule.select(&game.types[k].utilities(&space.embed(&[t]).0));

    while candidates.len() > 1 {
        let half = candidates.len() / 2;
        let mut counts = vec![0usize; game.n_actions()];
        for &k in &candidates {
            counts[respond(k, 0.0)] += 1;
        }
        let top = (0..counts.len()).fold(0, |b, j| if counts[j] > counts[b] { j } else { b });

        let t_star = if counts[top] > half {
            let profile = count_profile(&envs, &candidates, top);
            for (step, w) in profile.steps().iter().zip(profile.edges[1..].iter()) {
                if step.abs() > 1 {
                    return Err(Error::CountJump { at: *w, jump: *step });
                }
                count_steps.push(*step);
            }
            let cell = profile
                .counts
                .iter()
                .position(|&c| c == half)
                .ok_or_else(|| Error::AssumptionViolated {
                    assumption: Assumption::NoDominant,
                    detail: format!("no point where exactly {half} candidates respond {top}"),
                })?;
            0.5 * (profile.edges[cell] + profile.edges[cell + 1])
        } else {
            0.0
        };

        let observed = dialogue.query_effective(&[t_star])?;
        candidates.retain(|&k| respond(k, t_star) == observed);
        if candidates.is_empty() {
            return Err(Error::NoMatch);
        }
        survivors.push(candidates.iter().map(|&k| game.types[k].id().clone()).collect());
    }

    Ok(Identification {
        type_id: game.types[candidates[0]].id().clone(),
        transcript: dialogue.finish(),
        survivors,
        count_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::SimulatedAgent;
    use crate::model::{AgentType, GameClass, StrategySpace};

    fn lines(id: &str, ls: &[(f64, f64)]) -> AgentType {
        AgentType::new(
            id,
            ls.iter().map(|l| vec![l.0]).collect(),
            ls.iter().map(|l| l.1).collect(),
        )
        .unwrap()
    }

    fn line_game(types: Vec<AgentType>) -> GameInstance {
        GameInstance::new(StrategySpace::unit_box(1).unwrap(), types, GameClass::Generic).unwrap()
    }

    #[test]
    fn distinct_responses_at_zero_take_one_round() {
        let a = lines("a", &[(-1.0, 0.5), (1.0, -0.5)]);
        let b = lines("b", &[(1.0, 0.5), (-1.0, 0.8)]);
        let g = line_game(vec![a, b]);
        for ty in &g.types {
            let out = learn_via_single_strategy(&g, &mut SimulatedAgent::new(ty.clone())).unwrap();
            assert_eq!(&out.type_id, ty.id());
            assert_eq!(out.transcript.round_count(), 1);
        }
    }

    #[test]
    fn staggered_switches_split_then_finish() {
        // all start on action 0 and switch to action 1 at 0.2, 0.5, 0.8
        let g = line_game(vec![
            lines("a", &[(-1.0, 0.2), (1.0, -0.2)]),
            lines("b", &[(-1.0, 0.5), (1.0, -0.5)]),
            lines("c", &[(-1.0, 0.8), (1.0, -0.8)]),
        ]);
        for ty in &g.types {
            let out = learn_via_single_strategy(&g, &mut SimulatedAgent::new(ty.clone())).unwrap();
            assert_eq!(&out.type_id, ty.id());
            assert!(out.transcript.round_count() <= 2);
        }
        // the first probe sits where exactly one type still plays action 0
        let out = learn_via_single_strategy(&g, &mut SimulatedAgent::new(g.types[0].clone())).unwrap();
        let t = out.transcript.rounds[0].chosen.0[0];
        assert!(t > 0.5 && t < 0.8, "first probe at {t}");
        assert_eq!(out.transcript.round_count(), 2);
        assert!(out.count_steps.iter().all(|&s| s == -1));
    }

    #[test]
    fn shared_split_breakpoint_rejected() {
        let a = lines("a", &[(-1.0, 0.5), (1.0, -0.5), (0.0, -5.0)]);
        let b = lines("b", &[(-1.0, 0.5), (0.0, -5.0), (2.0, -1.0)]);
        let g = line_game(vec![a.clone(), b]);
        assert!(matches!(
            learn_via_single_strategy(&g, &mut SimulatedAgent::new(a)),
            Err(Error::AssumptionViolated {
                assumption: Assumption::Breakpoints,
                ..
            })
        ));
    }

    #[test]
    fn double_drop_is_a_runtime_error() {
        // two types leave action 0 for the same action at the same point, a third never plays 0 first
        let g = line_game(vec![
            lines("a", &[(-1.0, 0.5), (1.0, -0.5)]),
            lines("b", &[(-2.0, 1.0), (2.0, -1.0)]),
            lines("c", &[(-1.0, 0.2), (1.0, -0.2)]),
        ]);
        let err = learn_via_single_strategy(&g, &mut SimulatedAgent::new(g.types[0].clone())).unwrap_err();
        assert!(matches!(err, Error::CountJump { jump: -2, .. }), "{err}");
    }
}
