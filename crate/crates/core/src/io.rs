//! JSON documents for game instances and transcripts.
//!
//! Box bounds on the effective coordinates are written into
//! `param_constraints` as axis-aligned rows (`g = ±e_i`), so the document
//! only has the single constraint list.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AgentType, GameClass, GameInstance, LinearConstraint, StrategySpace, Transcript, TypeId};

#[derive(Serialize, Deserialize)]
struct TypeDoc {
    id: TypeId,
    directions: Vec<Vec<f64>>,
    intercepts: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GameDoc {
    ambient_dim: usize,
    effective_dim: usize,
    chart_matrix: Vec<Vec<f64>>,
    chart_offset: Vec<f64>,
    param_constraints: Vec<LinearConstraint>,
    types: Vec<TypeDoc>,
    class: GameClass,
    #[serde(default = "empty_object")]
    metadata: serde_json::Value,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

fn space_constraints(space: &StrategySpace) -> Vec<LinearConstraint> {
    let d = space.effective_dim();
    let mut out = Vec::with_capacity(2 * d + space.constraints().len());
    for i in 0..d {
        let mut g = vec![0.0; d];
        g[i] = -1.0;
        out.push(LinearConstraint {
            g: g.clone(),
            h: -space.lower()[i],
        });
        g[i] = 1.0;
        out.push(LinearConstraint { g, h: space.upper()[i] });
    }
    out.extend(space.constraints().iter().cloned());
    out
}

fn split_constraints(d: usize, rows: Vec<LinearConstraint>) -> Result<(Vec<f64>, Vec<f64>, Vec<LinearConstraint>)> {
    let mut lower: Vec<Option<f64>> = vec![None; d];
    let mut upper: Vec<Option<f64>> = vec![None; d];
    let mut general = Vec::new();
    for c in rows {
        if c.g.len() != d {
            return Err(Error::InvalidSpace("constraint row has wrong length".into()));
        }
        let nz: Vec<usize> = (0..d).filter(|&i| c.g[i] != 0.0).collect();
        if nz.len() == 1 {
            let i = nz[0];
            if c.g[i] == 1.0 && upper[i].is_none() {
                upper[i] = Some(c.h);
                continue;
            }
            if c.g[i] == -1.0 && lower[i].is_none() {
                lower[i] = Some(-c.h);
                continue;
            }
        }
        general.push(c);
    }
    let lower = lower
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::InvalidSpace(format!("coordinate {i} has no lower bound"))))
        .collect::<Result<Vec<_>>>()?;
    let upper = upper
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::InvalidSpace(format!("coordinate {i} has no upper bound"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((lower, upper, general))
}

fn to_doc(game: &GameInstance) -> GameDoc {
    let s = &game.space;
    let d = s.effective_dim();
    GameDoc {
        ambient_dim: s.ambient_dim(),
        effective_dim: d,
        chart_matrix: s.chart().chunks(d).map(|r| r.to_vec()).collect(),
        chart_offset: s.offset().to_vec(),
        param_constraints: space_constraints(s),
        types: game
            .types
            .iter()
            .map(|t| TypeDoc {
                id: t.id().clone(),
                directions: t.directions().to_vec(),
                intercepts: t.intercepts().to_vec(),
            })
            .collect(),
        class: game.class,
        metadata: game.metadata.clone(),
    }
}

fn from_doc(doc: GameDoc) -> Result<GameInstance> {
    let (m, d) = (doc.ambient_dim, doc.effective_dim);
    if doc.chart_matrix.len() != m || doc.chart_matrix.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidSpace(format!("chart_matrix must be {m} rows of {d}")));
    }
    let chart: Vec<f64> = doc.chart_matrix.into_iter().flatten().collect();
    let (lower, upper, general) = split_constraints(d, doc.param_constraints)?;
    let space = StrategySpace::new(m, d, chart, doc.chart_offset, lower, upper, general)?;
    let types = doc
        .types
        .into_iter()
        .map(|t| AgentType::new(t.id, t.directions, t.intercepts))
        .collect::<Result<Vec<_>>>()?;
    GameInstance::with_metadata(space, types, doc.class, doc.metadata)
}

pub fn game_to_json(game: &GameInstance) -> String {
    serde_json::to_string_pretty(&to_doc(game)).expect("game document serializes")
}

pub fn game_from_json(s: &str) -> Result<GameInstance> {
    from_doc(serde_json::from_str(s)?)
}

pub fn write_game(path: impl AsRef<Path>, game: &GameInstance) -> Result<()> {
    std::fs::write(path, game_to_json(game) + "\n")?;
    Ok(())
}

pub fn read_game(path: impl AsRef<Path>) -> Result<GameInstance> {
    game_from_json(&std::fs::read_to_string(path)?)
}

pub fn transcript_to_json(t: &Transcript) -> String {
    serde_json::to_string_pretty(t).expect("transcript serializes")
}

pub fn transcript_from_json(s: &str) -> Result<Transcript> {
    Ok(serde_json::from_str(s)?)
}
