use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::games::{flat_dirichlet, type_name, uniform_vec};
use crate::model::{AgentType, GameClass, GameInstance, StrategySpace};

/// Default bound on every outcome payment.
pub const DEFAULT_PAY_CAP: f64 = 1.0;

/// Principal pays `x_i` on outcome `i`; agent action `j` induces outcome
/// distribution `p_j` at cost `c_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractSpec {
    pub m: usize,
    pub n: usize,
    /// Per type, `n` outcome distributions of length `m`.
    pub distributions: Vec<Vec<Vec<f64>>>,
    /// Per type, `n` nonnegative action costs.
    pub costs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward: Option<Vec<f64>>,
    pub pay_cap: f64,
}

impl ContractSpec {
    pub fn random(m: usize, n: usize, k: usize, seed: u64) -> Result<Self> {
        if m < 2 || n < 2 || k < 1 {
            return Err(Error::InvalidParameter(format!(
                "contract needs m >= 2, n >= 2, K >= 1 (got m={m}, n={n}, K={k})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut distributions = Vec::with_capacity(k);
        let mut costs = Vec::with_capacity(k);
        for _ in 0..k {
            distributions.push((0..n).map(|_| flat_dirichlet(&mut rng, m)).collect());
            costs.push((0..n).map(|_| rng.random_range(0.0..1.0)).collect());
        }
        let reward = Some(uniform_vec(&mut rng, m, 0.0, 1.0));
        Ok(ContractSpec {
            m,
            n,
            distributions,
            costs,
            reward,
            pay_cap: DEFAULT_PAY_CAP,
        })
    }

    /// `Σ_i x_i p_{j,i} − c_j` for type `k`.
    pub fn agent_utility(&self, k: usize, x: &[f64], j: usize) -> f64 {
        let p = &self.distributions[k][j];
        (0..self.m).map(|i| x[i] * p[i]).sum::<f64>() - self.costs[k][j]
    }

    pub fn to_game(&self) -> Result<GameInstance> {
        let types = (0..self.distributions.len())
            .map(|k| {
                AgentType::new(
                    type_name(k),
                    self.distributions[k].clone(),
                    self.costs[k].iter().map(|c| -c).collect(),
                )
            })
            .collect::<Result<_>>()?;
        GameInstance::with_metadata(
            StrategySpace::boxed(vec![0.0; self.m], vec![self.pay_cap; self.m])?,
            types,
            GameClass::Contract,
            json!({ "m": self.m, "n": self.n, "pay_cap": self.pay_cap, "reward": self.reward }),
        )
    }
}

pub fn gen_contract(m: usize, n: usize, k: usize, seed: u64) -> Result<GameInstance> {
    ContractSpec::random(m, n, k, seed)?.to_game()
}
