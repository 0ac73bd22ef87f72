use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::games::{type_name, uniform_vec};
use crate::geometry::{build_envelope, envelope_minimizer};
use crate::model::{AgentType, GameClass, GameInstance, StrategySpace};

/// Leader with `m` pure actions mixing over the simplex; follower with `n`
/// actions and one payoff matrix per type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StackelbergSpec {
    pub m: usize,
    pub n: usize,
    /// Per type, an `m × n` follower matrix (rows are leader actions).
    pub follower: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leader: Option<Vec<Vec<f64>>>,
}

impl StackelbergSpec {
    pub fn random(m: usize, n: usize, k: usize, seed: u64) -> Result<Self> {
        check_sizes(m, n, k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let follower = (0..k)
            .map(|_| (0..m).map(|_| uniform_vec(&mut rng, n, -1.0, 1.0)).collect())
            .collect();
        let leader = Some((0..m).map(|_| uniform_vec(&mut rng, n, -1.0, 1.0)).collect());
        Ok(StackelbergSpec { m, n, follower, leader })
    }

    /// `Σ_i x_i F_{i,j}` for type `k`.
    pub fn follower_utility(&self, k: usize, x: &[f64], j: usize) -> f64 {
        (0..self.m).map(|i| x[i] * self.follower[k][i][j]).sum()
    }

    pub fn type_of(&self, k: usize) -> Result<AgentType> {
        let f = &self.follower[k];
        let dirs = (0..self.n).map(|j| (0..self.m).map(|i| f[i][j]).collect()).collect();
        AgentType::new(type_name(k), dirs, vec![0.0; self.n])
    }

    pub fn to_game(&self) -> Result<GameInstance> {
        let types = (0..self.follower.len())
            .map(|k| self.type_of(k))
            .collect::<Result<_>>()?;
        GameInstance::with_metadata(
            StrategySpace::simplex(self.m)?,
            types,
            GameClass::Stackelberg,
            json!({ "m": self.m, "n": self.n, "leader": self.leader }),
        )
    }
}

fn check_sizes(m: usize, n: usize, k: usize) -> Result<()> {
    if m < 2 || n < 2 || k < 1 {
        return Err(Error::InvalidParameter(format!(
            "stackelberg needs m >= 2, n >= 2, K >= 1 (got m={m}, n={n}, K={k})"
        )));
    }
    Ok(())
}

pub fn gen_stackelberg(m: usize, n: usize, k: usize, seed: u64) -> Result<GameInstance> {
    StackelbergSpec::random(m, n, k, seed)?.to_game()
}

/// Two leader actions, so the strategy space is the unit interval. Each
/// follower matrix is redrawn until the type's upper envelope attains its
/// minimum strictly inside `(0, 1)`, which rules out dominant actions.
pub fn gen_stackelberg_line(n: usize, k: usize, seed: u64) -> Result<GameInstance> {
    check_sizes(2, n, k)?;
    let space = StrategySpace::simplex(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut follower = Vec::with_capacity(k);
    while follower.len() < k {
        let f: Vec<Vec<f64>> = (0..2).map(|_| uniform_vec(&mut rng, n, -1.0, 1.0)).collect();
        let dirs = (0..n).map(|j| vec![f[0][j], f[1][j]]).collect();
        let ty = AgentType::new("probe", dirs, vec![0.0; n])?;
        let t = envelope_minimizer(&build_envelope(&ty, &space)?);
        if t > 1e-6 && t < 1.0 - 1e-6 {
            follower.push(f);
        }
    }
    StackelbergSpec {
        m: 2,
        n,
        follower,
        leader: None,
    }
    .to_game()
}
