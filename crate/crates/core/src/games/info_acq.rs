use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::games::{flat_dirichlet, type_name};
use crate::model::{AgentType, GameClass, GameInstance, StrategySpace};

/// Information acquisition in linearized form: the principal's strategy is a
/// score vector indexed by (observation, state), flattened as `o·nw + w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoAcqSpec {
    pub nw: usize,
    pub no: usize,
    pub n: usize,
    /// Per type and action, the joint `Pr(w, o | j)` flattened as `o·nw + w`.
    pub joint: Vec<Vec<Vec<f64>>>,
    pub costs: Vec<Vec<f64>>,
}

impl InfoAcqSpec {
    pub fn random(nw: usize, no: usize, n: usize, k: usize, seed: u64) -> Result<Self> {
        if nw < 2 || no < 2 || n < 2 || k < 1 {
            return Err(Error::InvalidParameter(format!(
                "info acquisition needs nw, no, n >= 2 and K >= 1 (got nw={nw}, no={no}, n={n}, K={k})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut joint = Vec::with_capacity(k);
        let mut costs = Vec::with_capacity(k);
        for _ in 0..k {
            joint.push((0..n).map(|_| flat_dirichlet(&mut rng, nw * no)).collect());
            costs.push((0..n).map(|_| rng.random_range(0.0..1.0)).collect());
        }
        Ok(InfoAcqSpec {
            nw,
            no,
            n,
            joint,
            costs,
        })
    }

    pub fn dim(&self) -> usize {
        self.nw * self.no
    }

    /// `Σ_{w,o} S(o, w) Pr(w, o | j) − c_j` for type `k` and score vector `score`.
    pub fn agent_utility(&self, k: usize, score: &[f64], j: usize) -> f64 {
        let mut u = -self.costs[k][j];
        for o in 0..self.no {
            for w in 0..self.nw {
                u += score[o * self.nw + w] * self.joint[k][j][o * self.nw + w];
            }
        }
        u
    }

    pub fn to_game(&self) -> Result<GameInstance> {
        let types = (0..self.joint.len())
            .map(|k| {
                AgentType::new(
                    type_name(k),
                    self.joint[k].clone(),
                    self.costs[k].iter().map(|c| -c).collect(),
                )
            })
            .collect::<Result<_>>()?;
        GameInstance::with_metadata(
            StrategySpace::unit_box(self.dim())?,
            types,
            GameClass::InfoAcq,
            json!({ "nw": self.nw, "no": self.no, "n": self.n }),
        )
    }
}

pub fn gen_info_acquisition(nw: usize, no: usize, n: usize, k: usize, seed: u64) -> Result<GameInstance> {
    InfoAcqSpec::random(nw, no, n, k, seed)?.to_game()
}
