//! Instance generators for the four game families, the hardness example,
//! and random instances for the one-dimensional and infinite-type learners.

mod contract;
mod generic;
mod hardness;
mod info_acq;
mod security;
mod stackelberg;

use rand::Rng;

pub use contract::{gen_contract, ContractSpec};
pub use generic::{gen_infinite_type, InfiniteInstance, MIN_ORACLE_RADIUS};
pub use hardness::{
    build_hardness_example, hardness_single_strategy_baseline, identify_via_hardness_menu, HardnessExample,
    EMPTY_TYPE_ID,
};
pub use info_acq::{gen_info_acquisition, InfoAcqSpec};
pub use security::{gen_security, SecurityGame, SecuritySpec};
pub use stackelberg::{gen_stackelberg, gen_stackelberg_line, StackelbergSpec};

fn uniform_vec<R: Rng>(rng: &mut R, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(lo..hi)).collect()
}

/// Dirichlet(1, …, 1) sample via normalized exponentials.
fn flat_dirichlet<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(rand_distr::Exp1)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn type_name(k: usize) -> String {
    format!("t{k}")
}
