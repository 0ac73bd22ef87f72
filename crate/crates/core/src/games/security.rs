use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::games::type_name;
use crate::learners::{check_assumption_breakpoints, check_assumption_no_dominant, AssumptionReport};
use crate::model::{AgentType, GameClass, GameInstance, LinearConstraint, StrategySpace};

/// Defender covers `n` targets with `r` resources; the attacker's action is
/// the target it attacks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecuritySpec {
    pub n: usize,
    pub r: usize,
    /// Per type, attacker payoff when the attacked target is covered.
    pub attacker_penalty: Vec<Vec<f64>>,
    /// Per type, attacker payoff when the attacked target is uncovered.
    pub attacker_reward: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defender_penalty: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defender_reward: Option<Vec<f64>>,
}

/// Full-space game plus a one-dimensional slice for the single-strategy learner.
#[derive(Clone, Debug)]
pub struct SecurityGame {
    pub full: GameInstance,
    pub slice: GameInstance,
    pub slice_direction: Vec<f64>,
    pub slice_report: AssumptionReport,
}

impl SecuritySpec {
    pub fn random(n: usize, r: usize, k: usize, seed: u64) -> Result<Self> {
        if r < 1 || r >= n || k < 1 {
            return Err(Error::InvalidParameter(format!(
                "security needs 1 <= r < n and K >= 1 (got n={n}, r={r}, K={k})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut attacker_penalty = Vec::with_capacity(k);
        let mut attacker_reward = Vec::with_capacity(k);
        for _ in 0..k {
            attacker_reward.push((0..n).map(|_| rng.random_range(0.0..1.0)).collect());
            attacker_penalty.push((0..n).map(|_| -rng.random_range(0.0..1.0)).collect());
        }
        let defender_reward = Some((0..n).map(|_| rng.random_range(0.0..1.0)).collect());
        let defender_penalty = Some((0..n).map(|_| -rng.random_range(0.0..1.0)).collect());
        Ok(SecuritySpec {
            n,
            r,
            attacker_penalty,
            attacker_reward,
            defender_penalty,
            defender_reward,
        })
    }

    /// `x_j P_j + (1 − x_j) R_j` for type `k` attacking target `j`.
    pub fn attacker_utility(&self, k: usize, x: &[f64], j: usize) -> f64 {
        x[j] * self.attacker_penalty[k][j] + (1.0 - x[j]) * self.attacker_reward[k][j]
    }

    fn types(&self) -> Result<Vec<AgentType>> {
        (0..self.attacker_reward.len())
            .map(|k| {
                let dirs = (0..self.n)
                    .map(|j| {
                        let mut v = vec![0.0; self.n];
                        v[j] = self.attacker_penalty[k][j] - self.attacker_reward[k][j];
                        v
                    })
                    .collect();
                AgentType::new(type_name(k), dirs, self.attacker_reward[k].clone())
            })
            .collect()
    }

    /// Coverage space `{x ∈ [0,1]^n : Σ x ≤ r}`.
    pub fn coverage_space(&self) -> Result<StrategySpace> {
        let n = self.n;
        let mut chart = vec![0.0; n * n];
        for i in 0..n {
            chart[i * n + i] = 1.0;
        }
        StrategySpace::new(
            n,
            n,
            chart,
            vec![0.0; n],
            vec![0.0; n],
            vec![1.0; n],
            vec![LinearConstraint {
                g: vec![1.0; n],
                h: self.r as f64,
            }],
        )
    }

    pub fn to_game(&self) -> Result<GameInstance> {
        GameInstance::with_metadata(
            self.coverage_space()?,
            self.types()?,
            GameClass::Security,
            json!({
                "n": self.n,
                "r": self.r,
                "defender_reward": self.defender_reward,
                "defender_penalty": self.defender_penalty,
            }),
        )
    }

    /// The uniform-coverage slice `x(s) = s·(r/n)·1`.
    pub fn uniform_direction(&self) -> Vec<f64> {
        vec![self.r as f64 / self.n as f64; self.n]
    }

    /// Restricts the game to `x(s) = s·direction`, `s ∈ [0, 1]`, and runs the
    /// one-dimensional assumption checks there. `direction` must keep the
    /// segment inside the coverage space.
    pub fn sliced(&self, direction: Vec<f64>) -> Result<SecurityGame> {
        let full = self.to_game()?;
        let end = crate::model::Strategy(direction.clone());
        if direction.len() != self.n || !full.space.contains(&end) {
            return Err(Error::InvalidParameter(
                "slice direction leaves the coverage space".into(),
            ));
        }
        let slice = full.with_space(StrategySpace::segment(direction.clone(), vec![0.0; self.n])?)?;
        let slice_report = check_assumption_no_dominant(&slice)?.merge(check_assumption_breakpoints(&slice)?);
        Ok(SecurityGame {
            full,
            slice,
            slice_direction: direction,
            slice_report,
        })
    }
}

pub fn gen_security(n: usize, r: usize, k: usize, seed: u64) -> Result<SecurityGame> {
    let spec = SecuritySpec::random(n, r, k, seed)?;
    let dir = spec.uniform_direction();
    spec.sliced(dir)
}
