use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

/// Game family selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassArg {
    /// Leader simplex with `m` actions, `n` follower actions.
    Stackelberg,
    /// Two leader actions; types redrawn until their envelope minimum is interior.
    Line,
    /// `n` targets, `r` resources; one-dimensional learners use the uniform-coverage slice.
    Security,
    /// `m` outcomes, `n` actions, payments in `[0, 1]^m`.
    Contract,
    /// `nw` states × `no` observations, `n` actions.
    InfoAcq,
    /// Hard single-strategy family with `m` leader actions (`K = C(m, m/2) + 1`).
    Hardness,
    /// One random type on `[0, 1]^m` with `n` actions, for the infinite-type learner.
    Infinite,
}

impl fmt::Display for ClassArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerArg {
    SingleRound,
    Menu,
    SingleStrategy,
    Infinite,
}

impl fmt::Display for LearnerArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

/// A scalar or a list in the config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Config file contents; every field can be overridden by the matching flag.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub class: Option<OneOrMany<ClassArg>>,
    pub m: Option<OneOrMany<usize>>,
    pub n: Option<OneOrMany<usize>>,
    #[serde(rename = "K")]
    pub k: Option<OneOrMany<usize>>,
    pub r: Option<usize>,
    pub nw: Option<usize>,
    pub no: Option<usize>,
    pub learner: Option<OneOrMany<LearnerArg>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub precision_bits: Option<u32>,
    pub true_type: Option<String>,
    pub out: Option<PathBuf>,
    pub timing: Option<bool>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))
    }
}

/// Flag values win, then the config file, then the default.
pub fn pick<T>(flag: Vec<T>, file: Option<OneOrMany<T>>, default: T) -> Vec<T> {
    if !flag.is_empty() {
        return flag;
    }
    match file {
        Some(v) => v.into_vec(),
        None => vec![default],
    }
}
