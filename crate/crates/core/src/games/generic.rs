use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::games::uniform_vec;
use crate::learners::OracleStrategies;
use crate::model::{AgentType, StrategySpace};
use crate::vecops::dot;

/// Smallest certified radius accepted for a generated oracle strategy.
pub const MIN_ORACLE_RADIUS: f64 = 1e-3;

const ORACLE_SAMPLES: usize = 4096;
const MAX_REDRAWS: usize = 1000;

/// One agent type on `[0,1]^m` whose every action is a strict best response
/// somewhere, with oracle strategies for each action.
#[derive(Clone, Debug)]
pub struct InfiniteInstance {
    pub ty: AgentType,
    pub space: StrategySpace,
    pub oracle: OracleStrategies,
}

/// Random type on `[0,1]^m` built from a perturbed power diagram: action `j`
/// is anchored at a random point `p_j`, a common random linear term varies
/// the gradient directions without moving the regions, and the whole
/// utility is rescaled and shifted. Draws are repeated until every action
/// has an oracle strategy with certified radius at least
/// [`MIN_ORACLE_RADIUS`].
pub fn gen_infinite_type(n: usize, m: usize, seed: u64) -> Result<InfiniteInstance> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2 and m >= 2, got n={n}, m={m}"
        )));
    }
    let space = StrategySpace::unit_box(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 0..MAX_REDRAWS {
        let common = uniform_vec(&mut rng, m, -2.0, 2.0);
        let scale = uniform_vec(&mut rng, 1, 0.5, 3.0)[0];
        let shift = uniform_vec(&mut rng, 1, -1.0, 1.0)[0];
        let mut dirs = Vec::with_capacity(n);
        let mut intercepts = Vec::with_capacity(n);
        for _ in 0..n {
            let p = uniform_vec(&mut rng, m, 0.1, 0.9);
            let wobble = uniform_vec(&mut rng, m, -0.3, 0.3);
            let weight = uniform_vec(&mut rng, 1, -0.05, 0.05)[0];
            let v: Vec<f64> = (0..m).map(|i| scale * (2.0 * p[i] + common[i] + wobble[i])).collect();
            dirs.push(v);
            intercepts.push(scale * (weight - dot(&p, &p)) + shift);
        }
        let ty = AgentType::new("truth", dirs, intercepts)?;
        let Ok(oracle) = OracleStrategies::from_type(&ty, &space, ORACLE_SAMPLES, seed ^ draw as u64) else {
            continue;
        };
        if oracle.min_certified_radius(&ty, &space) >= MIN_ORACLE_RADIUS {
            return Ok(InfiniteInstance { ty, space, oracle });
        }
    }
    Err(Error::InvalidParameter(format!(
        "no instance with n={n}, m={m} after {MAX_REDRAWS} draws"
    )))
}
