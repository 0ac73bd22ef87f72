use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{Agent, Dialogue};
use crate::error::{Error, PartialReconstruction, Result};
use crate::geometry::{bisect_hyperplane, solve_link};
use crate::model::{ActionIndex, AgentType, Menu, Strategy, StrategySpace, TieBreakRule, Transcript, TypeId};
use crate::vecops::{add_scaled, norm, scale, sub};

/// Maximum number of radius halvings per action.
pub const MAX_HALVINGS: usize = 64;
/// Hyperplane points gathered before solving a link.
pub const POINTS_PER_LINK: usize = 4;
/// Bisection attempts per (known, unknown) action pair in one sweep.
pub const ATTEMPTS_PER_PAIR: usize = 8;

const JITTER_SEED: u64 = 0x6d65_6e75;

/// One strategy per action at which the agent best-responds with that action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OracleStrategies {
    points: Vec<Strategy>,
}

impl OracleStrategies {
    pub fn new(points: Vec<Strategy>) -> Self {
        OracleStrategies { points }
    }

    pub fn points(&self) -> &[Strategy] {
        &self.points
    }

    pub fn n_actions(&self) -> usize {
        self.points.len()
    }

    /// Probes every strategy once and checks the agent answers with its action.
    pub fn validate(&self, dialogue: &mut Dialogue<'_>) -> Result<()> {
        for (j, x) in self.points.iter().enumerate() {
            let got = dialogue.query(x.clone())?;
            if got != j {
                return Err(Error::InconsistentAgent(format!(
                    "oracle strategy for action {j} elicits action {got}"
                )));
            }
        }
        Ok(())
    }

    /// Simulation stand-in for the oracle: for every action, the sampled
    /// point with the largest certified radius inside that action's region.
    pub fn from_type(ty: &AgentType, space: &StrategySpace, samples: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lipschitz = ty
            .directions()
            .iter()
            .map(|v| norm(&space.effective_gradient(v)))
            .fold(0.0, f64::max);
        let mut best: Vec<Option<(f64, Vec<f64>)>> = vec![None; ty.n_actions()];
        for _ in 0..samples {
            let Some(t) = space.sample_feasible(&mut rng, 1000) else {
                continue;
            };
            let u = ty.utilities(&space.embed(&t).0);
            let j = TieBreakRule::default().select(&u);
            let second = (0..u.len())
                .filter(|&k| k != j)
                .map(|k| u[k])
                .fold(f64::NEG_INFINITY, f64::max);
            let radius = ((u[j] - second) / (2.0 * lipschitz.max(1e-300))).min(space.slack(&t));
            if best[j].as_ref().is_none_or(|(r, _)| radius > *r) {
                best[j] = Some((radius, t));
            }
        }
        let points = best
            .into_iter()
            .enumerate()
            .map(|(j, b)| match b {
                Some((r, t)) if r > 0.0 => Ok(space.embed(&t)),
                _ => Err(Error::InvalidParameter(format!(
                    "action {j} is never a strict best response in {samples} samples"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OracleStrategies { points })
    }

    /// Smallest certified radius over all actions, as found by [`Self::from_type`].
    pub fn min_certified_radius(&self, ty: &AgentType, space: &StrategySpace) -> f64 {
        let lipschitz = ty
            .directions()
            .iter()
            .map(|v| norm(&space.effective_gradient(v)))
            .fold(0.0, f64::max);
        self.points
            .iter()
            .map(|x| {
                let u = ty.utilities(&x.0);
                let j = TieBreakRule::default().select(&u);
                let second = (0..u.len())
                    .filter(|&k| k != j)
                    .map(|k| u[k])
                    .fold(f64::NEG_INFINITY, f64::max);
                ((u[j] - second) / (2.0 * lipschitz.max(1e-300))).min(space.slack(&space.to_effective(x)))
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Recovered utility parameters, identified up to a common positive scale
/// and a common intercept shift. The gauge fixes the reference action to
/// scale 1 and intercept 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructedType {
    pub directions: Vec<Vec<f64>>,
    pub scales: Vec<f64>,
    pub intercepts: Vec<f64>,
    pub reference_action: ActionIndex,
    pub precision_bits: u32,
}

impl ReconstructedType {
    /// Utility parameters `v_j = λ_j ṽ_j`, `c_j`.
    pub fn to_agent_type(&self, id: impl Into<TypeId>) -> Result<AgentType> {
        let dirs = self
            .directions
            .iter()
            .zip(&self.scales)
            .map(|(d, &l)| scale(d, l))
            .collect();
        AgentType::new(id, dirs, self.intercepts.clone())
    }

    /// Largest absolute difference over every stored parameter.
    pub fn max_abs_diff(&self, other: &ReconstructedType) -> f64 {
        let mut m: f64 = 0.0;
        for (a, b) in self.directions.iter().flatten().zip(other.directions.iter().flatten()) {
            m = m.max((a - b).abs());
        }
        for (a, b) in self.scales.iter().zip(&other.scales) {
            m = m.max((a - b).abs());
        }
        for (a, b) in self.intercepts.iter().zip(&other.intercepts) {
            m = m.max((a - b).abs());
        }
        m
    }
}

/// Everything `learn_infinite_type` produces.
#[derive(Clone, Debug)]
pub struct InfiniteOutcome {
    pub reconstruction: ReconstructedType,
    pub transcript: Transcript,
    /// Accepted ball radius per action.
    pub radii: Vec<f64>,
    /// Solved links as `(known action, new action)` in discovery order.
    pub links: Vec<(ActionIndex, ActionIndex)>,
}

impl InfiniteOutcome {
    /// Measured rounds divided by `n²·L`.
    pub fn round_constant(&self) -> f64 {
        let n = self.reconstruction.scales.len() as f64;
        self.transcript.round_count() as f64 / (n * n * self.reconstruction.precision_bits as f64)
    }
}

fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return scale(&v, 1.0 / n);
        }
    }
}

/// Reconstructs the agent's utility from ball menus around the oracle
/// strategies and hyperplane points between adjacent regions.
pub fn learn_infinite_type(
    agent: &mut dyn Agent,
    oracle: &OracleStrategies,
    space: &StrategySpace,
    precision_bits: u32,
) -> Result<InfiniteOutcome> {
    if !space.is_identity_chart() || space.ambient_dim() < 2 {
        return Err(Error::WrongEffectiveDim {
            expected: "ambient (identity chart, >= 2)",
            got: space.effective_dim(),
        });
    }
    let n = oracle.n_actions();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "need oracle strategies for at least 2 actions".into(),
        ));
    }
    if oracle.points().iter().any(|x| !space.contains(x)) {
        return Err(Error::InfeasibleStrategy);
    }
    let mut dialogue = Dialogue::new(agent, space);
    oracle.validate(&mut dialogue)?;

    // Directions from shrinking ball menus.
    let mut directions = Vec::with_capacity(n);
    let mut radii = Vec::with_capacity(n);
    for (j, x) in oracle.points().iter().enumerate() {
        let center = x.0.clone();
        let slack = space.slack(&center);
        if slack <= 0.0 {
            return Err(Error::ShrinkExhausted { action: j });
        }
        let mut radius = (0.1 * space.box_diameter()).min(slack);
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let choice = dialogue.post(Menu::Ball {
                center: center.clone(),
                radius,
            })?;
            if choice.action == j {
                accepted = Some(choice.strategy);
                break;
            }
            radius /= 2.0;
        }
        let chosen = accepted.ok_or(Error::ShrinkExhausted { action: j })?;
        let raw = scale(&sub(&chosen.0, &center), 1.0 / radius);
        let len = norm(&raw);
        if len < 1e-9 {
            return Err(Error::ZeroGradient { action: j });
        }
        directions.push(scale(&raw, 1.0 / len));
        radii.push(radius);
    }

    // Scales and intercepts from hyperplane links, breadth-first from action 0.
    let reference = 0;
    let mut known: Vec<Option<(f64, f64)>> = vec![None; n];
    known[reference] = Some((1.0, 0.0));
    let mut points: BTreeMap<(ActionIndex, ActionIndex), Vec<Strategy>> = BTreeMap::new();
    let mut links = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED);
    let jitter = |rng: &mut ChaCha8Rng, j: usize, attempt: usize| -> Strategy {
        let base = &oracle.points()[j].0;
        if attempt == 0 {
            return Strategy(base.clone());
        }
        let r = 0.5 * radii[j] * rng.random_range(0.25..1.0);
        Strategy(add_scaled(base, r, &random_unit(rng, base.len())))
    };

    loop {
        if known.iter().all(Option::is_some) {
            break;
        }
        let mut progress = false;
        for j in 0..n {
            if known[j].is_none() {
                continue;
            }
            for k in 0..n {
                if known[k].is_some() {
                    continue;
                }
                for attempt in 0..ATTEMPTS_PER_PAIR {
                    if known[k].is_some() {
                        break;
                    }
                    let a = jitter(&mut rng, j, attempt);
                    let b = jitter(&mut rng, k, attempt);
                    let res = bisect_hyperplane(|x| dialogue.query(x.clone()), &a, &b, precision_bits);
                    let bis = match res {
                        Ok(b) => b,
                        Err(Error::SameResponse { .. }) => continue,
                        Err(e) => return Err(e),
                    };
                    let (p, q) = bis.side_actions;
                    let key = (p.min(q), p.max(q));
                    points.entry(key).or_default().push(bis.point);
                    if let Some(new) = try_link(key, &points, &directions, &mut known)? {
                        links.push(new);
                        progress = true;
                    }
                }
            }
        }
        if !progress {
            let missing: Vec<usize> = (0..n).filter(|&j| known[j].is_none()).collect();
            return Err(Error::Disconnected {
                missing,
                partial: Box::new(PartialReconstruction {
                    directions,
                    links: known,
                }),
            });
        }
    }

    let (scales, intercepts) = known.into_iter().map(|k| k.expect("all actions linked")).unzip();
    Ok(InfiniteOutcome {
        reconstruction: ReconstructedType {
            directions,
            scales,
            intercepts,
            reference_action: reference,
            precision_bits,
        },
        transcript: dialogue.finish(),
        radii,
        links,
    })
}

/// Solves the link for `key` when exactly one side is known and enough
/// points with spread are available.
fn try_link(
    key: (ActionIndex, ActionIndex),
    points: &BTreeMap<(ActionIndex, ActionIndex), Vec<Strategy>>,
    directions: &[Vec<f64>],
    known: &mut [Option<(f64, f64)>],
) -> Result<Option<(ActionIndex, ActionIndex)>> {
    let (p, q) = key;
    let (from, to) = match (known[p], known[q]) {
        (Some(_), None) => (p, q),
        (None, Some(_)) => (q, p),
        _ => return Ok(None),
    };
    let pts = &points[&key];
    if pts.len() < POINTS_PER_LINK {
        return Ok(None);
    }
    match solve_link(known[from].unwrap(), &directions[from], &directions[to], pts) {
        Ok(solved) => {
            known[to] = Some(solved);
            Ok(Some((from, to)))
        }
        // more points may still arrive for this pair
        Err(Error::DegenerateSpread { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::SimulatedAgent;

    #[test]
    fn two_action_example() {
        let space = StrategySpace::unit_box(2).unwrap();
        let ty = AgentType::new("t", vec![vec![1.0, 0.0], vec![0.0, 2.0]], vec![0.0, -0.5]).unwrap();
        let oracle = OracleStrategies::new(vec![Strategy(vec![0.8, 0.2]), Strategy(vec![0.2, 0.8])]);
        let out = learn_infinite_type(&mut SimulatedAgent::new(ty), &oracle, &space, 40).unwrap();
        let r = &out.reconstruction;
        assert!((r.directions[1][0]).abs() < 1e-9 && (r.directions[1][1] - 1.0).abs() < 1e-9);
        assert!((r.scales[1] - 2.0).abs() < 1e-6);
        assert!((r.intercepts[1] + 0.5).abs() < 1e-6);
        assert_eq!((r.scales[0], r.intercepts[0]), (1.0, 0.0));
        assert_eq!(out.links, vec![(0, 1)]);
        assert!(out.transcript.round_count() <= 8 * 4 * 40);
    }

    #[test]
    fn invalid_oracle_is_caught() {
        let space = StrategySpace::unit_box(2).unwrap();
        let ty = AgentType::new("t", vec![vec![1.0, 0.0], vec![0.0, 2.0]], vec![0.0, -0.5]).unwrap();
        let oracle = OracleStrategies::new(vec![Strategy(vec![0.2, 0.8]), Strategy(vec![0.8, 0.2])]);
        assert!(matches!(
            learn_infinite_type(&mut SimulatedAgent::new(ty), &oracle, &space, 20),
            Err(Error::InconsistentAgent(_))
        ));
    }

    #[test]
    fn non_identity_chart_rejected() {
        let space = StrategySpace::simplex(3).unwrap();
        let ty = AgentType::new("t", vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], vec![0.0, 0.0]).unwrap();
        let oracle = OracleStrategies::new(vec![Strategy(vec![0.8, 0.1, 0.1]), Strategy(vec![0.1, 0.8, 0.1])]);
        assert!(matches!(
            learn_infinite_type(&mut SimulatedAgent::new(ty), &oracle, &space, 20),
            Err(Error::WrongEffectiveDim { .. })
        ));
    }

    #[test]
    fn oracle_on_boundary_cannot_shrink() {
        let space = StrategySpace::unit_box(2).unwrap();
        let ty = AgentType::new("t", vec![vec![1.0, 0.0], vec![0.0, 2.0]], vec![0.0, -0.5]).unwrap();
        let oracle = OracleStrategies::new(vec![Strategy(vec![1.0, 0.2]), Strategy(vec![0.2, 0.8])]);
        assert!(matches!(
            learn_infinite_type(&mut SimulatedAgent::new(ty), &oracle, &space, 20),
            Err(Error::ShrinkExhausted { action: 0 })
        ));
    }

    #[test]
    fn oracle_from_type_covers_every_action() {
        let space = StrategySpace::unit_box(2).unwrap();
        let ty = AgentType::new(
            "t",
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
            vec![0.0, 0.0, 0.6],
        )
        .unwrap();
        let o = OracleStrategies::from_type(&ty, &space, 2000, 9).unwrap();
        let rule = TieBreakRule::default();
        for (j, x) in o.points().iter().enumerate() {
            assert_eq!(crate::model::best_response(&ty, x, &rule).unwrap(), j);
        }
        assert!(o.min_certified_radius(&ty, &space) > 0.0);
    }
}
