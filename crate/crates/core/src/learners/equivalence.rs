use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{AgentType, StrategySpace, TieBreakRule};

/// Compares best responses of `a` and `b` on `probes` uniform feasible
/// strategies, skipping probes where `b`'s top-two margin is below
/// `margin_floor`. Returns whether no compared probe disagrees, and the
/// disagreement rate among compared probes.
pub fn behaviorally_equivalent(
    a: &AgentType,
    b: &AgentType,
    space: &StrategySpace,
    probes: usize,
    margin_floor: f64,
    seed: u64,
) -> Result<(bool, f64)> {
    if a.n_actions() != b.n_actions() {
        return Err(Error::DimensionMismatch {
            expected: b.n_actions(),
            got: a.n_actions(),
        });
    }
    for ty in [a, b] {
        if ty.ambient_dim() != space.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.ambient_dim(),
                got: ty.ambient_dim(),
            });
        }
    }
    let rule = TieBreakRule::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut compared, mut disagreements) = (0usize, 0usize);
    for _ in 0..probes {
        let Some(t) = space.sample_feasible(&mut rng, 1000) else {
            continue;
        };
        let x = space.embed(&t);
        let ub = b.utilities(&x.0);
        let jb = rule.select(&ub);
        let second = (0..ub.len())
            .filter(|&k| k != jb)
            .map(|k| ub[k])
            .fold(f64::NEG_INFINITY, f64::max);
        if ub[jb] - second < margin_floor {
            continue;
        }
        compared += 1;
        if rule.select(&a.utilities(&x.0)) != jb {
            disagreements += 1;
        }
    }
    let rate = if compared == 0 {
        0.0
    } else {
        disagreements as f64 / compared as f64
    };
    Ok((disagreements == 0, rate))
}
