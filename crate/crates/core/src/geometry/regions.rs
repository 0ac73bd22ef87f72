use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionIndex, GameInstance, TieBreakRule, DEFAULT_TAU};
use crate::vecops::norm;

/// Per-type best actions and top-two utility gaps at one effective point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionProbe {
    pub point: Vec<f64>,
    pub best: Vec<ActionIndex>,
    pub margin: Vec<f64>,
}

impl RegionProbe {
    pub fn min_margin(&self) -> f64 {
        self.margin.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

pub fn probe_regions(game: &GameInstance, t: &[f64]) -> Result<RegionProbe> {
    if t.len() != game.space.effective_dim() {
        return Err(Error::DimensionMismatch {
            expected: game.space.effective_dim(),
            got: t.len(),
        });
    }
    if !game.space.is_feasible(t) {
        return Err(Error::InfeasibleStrategy);
    }
    let x = game.space.embed(t);
    let rule = TieBreakRule::default();
    let mut best = Vec::with_capacity(game.n_types());
    let mut margin = Vec::with_capacity(game.n_types());
    for ty in &game.types {
        let u = ty.utilities(&x.0);
        let j = rule.select(&u);
        let second = u
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        best.push(j);
        margin.push((u[j] - second).max(0.0));
    }
    Ok(RegionProbe {
        point: t.to_vec(),
        best,
        margin,
    })
}

/// A strictly feasible point where every type's response is locally fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteriorPoint {
    pub center: Vec<f64>,
    /// Certified radius: no type changes its best response inside this ball.
    pub radius_max: f64,
    pub min_margin: f64,
}

pub const DEFAULT_INTERIOR_ATTEMPTS: usize = 512;

/// Largest effective-gradient norm over all types and actions.
pub fn max_gradient_norm(game: &GameInstance) -> f64 {
    game.types
        .iter()
        .flat_map(|ty| ty.directions().iter())
        .map(|v| norm(&game.space.effective_gradient(v)))
        .fold(0.0, f64::max)
}

/// Radius certified by the margin/Lipschitz bound at a probe, capped by the
/// distance to the constraint faces.
pub fn certified_radius(game: &GameInstance, probe: &RegionProbe, lipschitz: f64) -> f64 {
    let slack = game.space.slack(&probe.point);
    let by_margin = if lipschitz > 0.0 {
        probe.min_margin() / (2.0 * lipschitz)
    } else {
        f64::INFINITY
    };
    by_margin.min(slack)
}

/// Rejection-samples `attempts` strictly feasible points and keeps the one
/// with the largest certified radius among those whose every type margin
/// exceeds the indifference tolerance.
pub fn find_interior_point(game: &GameInstance, attempts: usize, seed: u64) -> Result<InteriorPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lipschitz = max_gradient_norm(game);
    let mut best: Option<InteriorPoint> = None;
    for _ in 0..attempts {
        let Some(t) = game.space.sample_feasible(&mut rng, 1000) else {
            continue;
        };
        let probe = probe_regions(game, &t)?;
        let min_margin = probe.min_margin();
        if min_margin <= DEFAULT_TAU {
            continue;
        }
        let radius = certified_radius(game, &probe, lipschitz);
        if radius <= 0.0 {
            continue;
        }
        if best.as_ref().is_none_or(|b| radius > b.radius_max) {
            best = Some(InteriorPoint {
                center: t,
                radius_max: radius,
                min_margin,
            });
        }
    }
    best.ok_or(Error::NoInteriorPoint { attempts })
}
