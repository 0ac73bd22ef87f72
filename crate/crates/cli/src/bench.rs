use std::time::Instant;

use rayon::prelude::*;

use crate::config::{ClassArg, LearnerArg};
use crate::instance::{exit_code_for, generate, run_all_types, Sizes};

pub const CSV_HEADER: &str = "class,m,n,K,learner,trials,mean_rounds,max_rounds,accuracy,wall_ms";

pub struct Plan {
    pub classes: Vec<ClassArg>,
    pub ms: Vec<usize>,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub r: usize,
    pub nw: usize,
    pub no: usize,
    pub learners: Vec<LearnerArg>,
    pub trials: usize,
    pub seed: u64,
    pub precision_bits: u32,
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Cell {
    class: ClassArg,
    m: usize,
    n: usize,
    k: usize,
    learner: LearnerArg,
}

#[derive(Default)]
struct Trial {
    /// Type count of the generated game, `None` when generation failed.
    types: Option<usize>,
    rounds: Vec<usize>,
    correct: usize,
    gated: bool,
    wall_ms: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub class: ClassArg,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub learner: LearnerArg,
    pub trials: usize,
    pub mean_rounds: f64,
    pub max_rounds: usize,
    pub accuracy: f64,
    pub wall_ms: u128,
}

/// Pins the sizes a class ignores so equivalent cells collapse.
fn normalize(mut c: Cell) -> Cell {
    match c.class {
        ClassArg::Line => c.m = 2,
        ClassArg::Security => c.m = c.n,
        ClassArg::Hardness => {
            c.n = c.m + 2;
            c.k = 0;
        }
        ClassArg::Infinite => c.k = 1,
        _ => {}
    }
    c
}

fn run_trial(plan: &Plan, cell: Cell, seed: u64) -> Trial {
    let start = Instant::now();
    let sizes = Sizes {
        m: cell.m,
        n: cell.n,
        k: cell.k,
        r: plan.r,
        nw: plan.nw,
        no: plan.no,
    };
    let mut trial = Trial::default();
    match generate(cell.class, sizes, seed) {
        Ok(game) => {
            trial.types = Some(game.n_types());
            for (ty, res) in game
                .types
                .iter()
                .zip(run_all_types(&game, cell.learner, seed, plan.precision_bits))
            {
                match res {
                    Ok(r) => {
                        trial.rounds.push(r.rounds());
                        trial.correct += r.correct(ty.id()) as usize;
                    }
                    Err(e) if exit_code_for(&e) == 2 => trial.gated = true,
                    Err(_) => trial.rounds.push(0),
                }
            }
        }
        Err(_) => trial.gated = true,
    }
    if trial.gated {
        trial.rounds.clear();
        trial.correct = 0;
    }
    if plan.timing {
        trial.wall_ms = start.elapsed().as_millis();
    }
    trial
}

/// Every trial of every grid cell, with ground truth ranging over the whole
/// type set. Gated trials (the learner's preconditions fail) are left out
/// of the row and reported on stderr.
pub fn run(plan: &Plan) -> Vec<SummaryRow> {
    let mut cells = Vec::new();
    for &class in &plan.classes {
        for &m in &plan.ms {
            for &n in &plan.ns {
                for &k in &plan.ks {
                    for &learner in &plan.learners {
                        cells.push(normalize(Cell {
                            class,
                            m,
                            n,
                            k,
                            learner,
                        }));
                    }
                }
            }
        }
    }
    cells.sort();
    cells.dedup();

    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..plan.trials as u64).map(move |t| (c, t)))
        .collect();
    let results: Vec<Trial> = jobs
        .par_iter()
        .map(|&(c, t)| run_trial(plan, cells[c], plan.seed.wrapping_add(t)))
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    for (c, cell) in cells.iter().enumerate() {
        let trials = &results[c * plan.trials..(c + 1) * plan.trials];
        let kept: Vec<&Trial> = trials.iter().filter(|t| !t.gated).collect();
        let gated = trials.len() - kept.len();
        if gated > 0 {
            eprintln!(
                "{} m={} n={} K={} {}: {gated}/{} trials gated",
                cell.class,
                cell.m,
                cell.n,
                cell.k,
                cell.learner,
                trials.len()
            );
        }
        let rounds: Vec<usize> = kept.iter().flat_map(|t| t.rounds.iter().copied()).collect();
        let correct: usize = kept.iter().map(|t| t.correct).sum();
        let k = trials.iter().find_map(|t| t.types).unwrap_or(cell.k);
        rows.push(SummaryRow {
            class: cell.class,
            m: cell.m,
            n: cell.n,
            k,
            learner: cell.learner,
            trials: kept.len(),
            mean_rounds: if rounds.is_empty() {
                f64::NAN
            } else {
                rounds.iter().sum::<usize>() as f64 / rounds.len() as f64
            },
            max_rounds: rounds.iter().copied().max().unwrap_or(0),
            accuracy: if rounds.is_empty() {
                f64::NAN
            } else {
                correct as f64 / rounds.len() as f64
            },
            wall_ms: trials.iter().map(|t| t.wall_ms).sum(),
        });
    }
    rows.sort_by(|a, b| (a.class, a.m, a.n, a.k, a.learner).cmp(&(b.class, b.m, b.n, b.k, b.learner)));
    rows
}

pub fn to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.4},{},{:.4},{}\n",
            r.class, r.m, r.n, r.k, r.learner, r.trials, r.mean_rounds, r.max_rounds, r.accuracy, r.wall_ms
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_row_width() {
        let row = SummaryRow {
            class: ClassArg::Line,
            m: 2,
            n: 3,
            k: 4,
            learner: LearnerArg::Menu,
            trials: 1,
            mean_rounds: 2.5,
            max_rounds: 3,
            accuracy: 1.0,
            wall_ms: 0,
        };
        let csv = to_csv(&[row]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
        assert_eq!(lines[1], "line,2,3,4,menu,1,2.5000,3,1.0000,0");
    }
}
