use menuprobe::games::{
    build_hardness_example, gen_contract, gen_infinite_type, gen_info_acquisition, gen_security, gen_stackelberg,
    gen_stackelberg_line, hardness_single_strategy_baseline, identify_via_hardness_menu, HardnessExample,
};
use menuprobe::learners::{
    behaviorally_equivalent, check_assumption_breakpoints, check_assumption_no_dominant, check_assumption_nonparallel,
    learn_infinite_type, learn_via_menu, learn_via_single_strategy, AssumptionReport, Identification, InfiniteOutcome,
    LearnerReport, OracleStrategies, SingleRoundPlan,
};
use menuprobe::{Error, GameInstance, SimulatedAgent, Strategy, StrategySpace, TypeId};
use serde_json::json;

use crate::config::{ClassArg, LearnerArg};

/// Probes used to judge a reconstruction.
pub const EQUIVALENCE_PROBES: usize = 10_000;
pub const EQUIVALENCE_MARGIN: f64 = 1e-5;
const ORACLE_SAMPLES: usize = 4096;

/// Size parameters for one generated instance.
#[derive(Clone, Copy, Debug)]
pub struct Sizes {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub nw: usize,
    pub no: usize,
}

/// Generates a game for `class`. Security and hardness details are recorded
/// in the metadata so a saved file can be run later.
pub fn generate(class: ClassArg, s: Sizes, seed: u64) -> menuprobe::Result<GameInstance> {
    match class {
        ClassArg::Stackelberg => gen_stackelberg(s.m, s.n, s.k, seed),
        ClassArg::Line => gen_stackelberg_line(s.n, s.k, seed),
        ClassArg::Security => Ok(gen_security(s.n, s.r, s.k, seed)?.full),
        ClassArg::Contract => gen_contract(s.m, s.n, s.k, seed),
        ClassArg::InfoAcq => gen_info_acquisition(s.nw, s.no, s.n, s.k, seed),
        ClassArg::Hardness => Ok(build_hardness_example(s.m, 10.0 * s.m as f64)?.game),
        ClassArg::Infinite => {
            let inst = gen_infinite_type(s.n, s.m, seed)?;
            GameInstance::with_metadata(
                inst.space,
                vec![inst.ty],
                menuprobe::GameClass::Generic,
                json!({ "oracle_strategies": inst.oracle }),
            )
        }
    }
}

/// Rebuilds the hardness menu when the game came from the hardness builder.
pub fn hardness_of(game: &GameInstance) -> Option<HardnessExample> {
    if game.metadata.get("example")?.as_str()? != "hardness" {
        return None;
    }
    let m = game.metadata.get("m")?.as_u64()? as usize;
    let big_n = game.metadata.get("N")?.as_f64()?;
    let ex = build_hardness_example(m, big_n).ok()?;
    (ex.game.types == game.types).then_some(ex)
}

/// The uniform-coverage slice of a security game, or the game itself when
/// it is already one-dimensional.
pub fn one_dimensional(game: &GameInstance) -> menuprobe::Result<GameInstance> {
    if game.class == menuprobe::GameClass::Security && game.space.effective_dim() > 1 {
        let n = game.space.ambient_dim();
        let r = game.metadata.get("r").and_then(|v| v.as_u64()).unwrap_or(1) as f64;
        return game.with_space(StrategySpace::segment(vec![r / n as f64; n], vec![0.0; n])?);
    }
    Ok(game.clone())
}

/// Assumption checks that apply to the game's dimension.
pub fn default_report(game: &GameInstance) -> menuprobe::Result<AssumptionReport> {
    if game.space.effective_dim() == 1 {
        Ok(check_assumption_no_dominant(game)?.merge(check_assumption_breakpoints(game)?))
    } else {
        Ok(check_assumption_nonparallel(game))
    }
}

/// Outcome of one learner run against one ground-truth type.
pub enum RunResult {
    Identified(Identification),
    Reconstructed { outcome: InfiniteOutcome, equivalent: bool },
}

impl RunResult {
    pub fn rounds(&self) -> usize {
        match self {
            RunResult::Identified(id) => id.transcript.round_count(),
            RunResult::Reconstructed { outcome, .. } => outcome.transcript.round_count(),
        }
    }

    pub fn correct(&self, truth: &TypeId) -> bool {
        match self {
            RunResult::Identified(id) => &id.type_id == truth,
            RunResult::Reconstructed { equivalent, .. } => *equivalent,
        }
    }

    pub fn report(&self, learner: LearnerArg, assumptions: AssumptionReport) -> LearnerReport {
        let name = learner.to_string();
        match self {
            RunResult::Identified(id) => LearnerReport::identified(&name, id, assumptions),
            RunResult::Reconstructed { outcome, .. } => LearnerReport::reconstructed(&name, outcome, assumptions),
        }
    }
}

fn oracle_for(game: &GameInstance, truth: usize, seed: u64) -> menuprobe::Result<OracleStrategies> {
    if let Some(v) = game.metadata.get("oracle_strategies") {
        if game.n_types() == 1 {
            let points: Vec<Strategy> = serde_json::from_value(v.clone())?;
            return Ok(OracleStrategies::new(points));
        }
    }
    OracleStrategies::from_type(&game.types[truth], &game.space, ORACLE_SAMPLES, seed)
}

/// Runs `learner` with type `truth` as the simulated agent.
pub fn run_learner(
    game: &GameInstance,
    learner: LearnerArg,
    truth: usize,
    seed: u64,
    precision_bits: u32,
) -> menuprobe::Result<RunResult> {
    let ty = game.types[truth].clone();
    let mut agent = SimulatedAgent::new(ty.clone());
    if let Some(ex) = hardness_of(game) {
        return match learner {
            LearnerArg::SingleRound => Ok(RunResult::Identified(identify_via_hardness_menu(&ex, &mut agent)?)),
            LearnerArg::SingleStrategy => Ok(RunResult::Identified(hardness_single_strategy_baseline(
                &ex, &mut agent,
            )?)),
            _ => Err(Error::InvalidParameter(format!(
                "learner {learner} does not apply to the hardness family (use single-round or single-strategy)"
            ))),
        };
    }
    match learner {
        LearnerArg::SingleRound => Ok(RunResult::Identified(
            SingleRoundPlan::prepare(game, seed)?.identify(game, &mut agent)?,
        )),
        LearnerArg::Menu => Ok(RunResult::Identified(learn_via_menu(
            &one_dimensional(game)?,
            &mut agent,
        )?)),
        LearnerArg::SingleStrategy => Ok(RunResult::Identified(learn_via_single_strategy(
            &one_dimensional(game)?,
            &mut agent,
        )?)),
        LearnerArg::Infinite => {
            let oracle = oracle_for(game, truth, seed)?;
            let outcome = learn_infinite_type(&mut agent, &oracle, &game.space, precision_bits)?;
            let rebuilt = outcome.reconstruction.to_agent_type("reconstruction")?;
            let (equivalent, _) =
                behaviorally_equivalent(&rebuilt, &ty, &game.space, EQUIVALENCE_PROBES, EQUIVALENCE_MARGIN, seed)?;
            Ok(RunResult::Reconstructed { outcome, equivalent })
        }
    }
}

/// Plan reused across ground truths when the learner allows it.
pub fn run_all_types(
    game: &GameInstance,
    learner: LearnerArg,
    seed: u64,
    precision_bits: u32,
) -> Vec<menuprobe::Result<RunResult>> {
    if learner == LearnerArg::SingleRound && hardness_of(game).is_none() {
        return match SingleRoundPlan::prepare(game, seed) {
            Ok(plan) => game
                .types
                .iter()
                .map(|ty| {
                    Ok(RunResult::Identified(
                        plan.identify(game, &mut SimulatedAgent::new(ty.clone()))?,
                    ))
                })
                .collect(),
            Err(e) => (0..game.n_types()).map(|_| Err(clone_error(&e))).collect(),
        };
    }
    (0..game.n_types())
        .map(|k| run_learner(game, learner, k, seed, precision_bits))
        .collect()
}

fn clone_error(e: &Error) -> Error {
    match e {
        Error::AssumptionViolated { assumption, detail } => Error::AssumptionViolated {
            assumption: *assumption,
            detail: detail.clone(),
        },
        other => Error::InvalidParameter(other.to_string()),
    }
}

/// Exit code for a learner error: 2 for unmet preconditions, 1 otherwise.
pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NoMatch | Error::AmbiguousMatch { .. } | Error::InconsistentAgent(_) => 1,
        _ => 2,
    }
}
