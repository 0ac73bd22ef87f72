use serde_json::json;

use crate::agent::{Agent, Dialogue};
use crate::error::{Error, Result};
use crate::learners::Identification;
use crate::model::{ActionIndex, AgentType, GameClass, GameInstance, Menu, Strategy, StrategySpace, TypeId};

/// Id of the type whose index set is empty.
pub const EMPTY_TYPE_ID: &str = "{}";

/// Hard Stackelberg family for single strategies together with the
/// separating menu: item `i` is the leader strategy reserved for
/// `menu_types[i]`.
#[derive(Clone, Debug)]
pub struct HardnessExample {
    pub game: GameInstance,
    pub menu: Menu,
    pub menu_types: Vec<TypeId>,
    /// The distinguished follower action whose column encodes the type.
    pub a_star: ActionIndex,
    pub big_n: f64,
}

fn subsets(m: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=m - left {
            cur.push(i);
            rec(i + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, size, &mut Vec::new(), &mut out);
    out
}

fn subset_id(s: &[usize]) -> TypeId {
    let inner: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
    TypeId(format!("{{{}}}", inner.join(",")))
}

/// Builds the `C(m, m/2) + 1` follower types over the leader simplex `Δ^m`
/// and the menu `{x^θ}` with `x^θ_i = 2/m` on `θ` and 0 elsewhere.
///
/// Follower actions `0..m` have columns `1` at their own index and
/// `−2/(m−2)` elsewhere, action `m` has constant `−1/N³`, and action `m+1`
/// (`a*`) has `v^θ / N²` with `v^θ_i = 1` on `θ` and `−N` elsewhere. The
/// empty type uses `v = (−N, …, −N)`. The empty type has no menu item since
/// the zero vector is not a leader mixed strategy.
pub fn build_hardness_example(m: usize, big_n: f64) -> Result<HardnessExample> {
    if m < 4 || m % 2 != 0 {
        return Err(Error::InvalidParameter(format!("m must be even and >= 4, got {m}")));
    }
    if !(big_n > m as f64) {
        return Err(Error::InvalidParameter(format!(
            "N must exceed m, got N={big_n}, m={m}"
        )));
    }
    let off = -2.0 / (m as f64 - 2.0);
    let mut shared: Vec<Vec<f64>> = (0..m)
        .map(|j| (0..m).map(|i| if i == j { 1.0 } else { off }).collect())
        .collect();
    shared.push(vec![-1.0 / big_n.powi(3); m]);
    let make = |id: TypeId, set: &[usize]| {
        let mut dirs = shared.clone();
        dirs.push(
            (0..m)
                .map(|i| if set.contains(&i) { 1.0 } else { -big_n } / (big_n * big_n))
                .collect(),
        );
        AgentType::new(id, dirs, vec![0.0; m + 2])
    };

    let sets = subsets(m, m / 2);
    let mut types = Vec::with_capacity(sets.len() + 1);
    let mut items = Vec::with_capacity(sets.len());
    let mut menu_types = Vec::with_capacity(sets.len());
    for s in &sets {
        let id = subset_id(s);
        types.push(make(id.clone(), s)?);
        items.push(Strategy(
            (0..m)
                .map(|i| if s.contains(&i) { 2.0 / m as f64 } else { 0.0 })
                .collect(),
        ));
        menu_types.push(id);
    }
    types.push(make(TypeId::from(EMPTY_TYPE_ID), &[])?);

    let game = GameInstance::with_metadata(
        StrategySpace::simplex(m)?,
        types,
        GameClass::Stackelberg,
        json!({ "example": "hardness", "m": m, "N": big_n }),
    )?;
    Ok(HardnessExample {
        game,
        menu: Menu::Finite { items },
        menu_types,
        a_star: m + 1,
        big_n,
    })
}

/// One round: the chosen item names the type when the response is `a*`;
/// any other response means the empty type.
pub fn identify_via_hardness_menu(ex: &HardnessExample, agent: &mut dyn Agent) -> Result<Identification> {
    let mut dialogue = Dialogue::new(agent, &ex.game.space);
    let choice = dialogue.post(ex.menu.clone())?;
    let id = if choice.action == ex.a_star {
        let item = choice.item.ok_or(Error::NoMatch)?;
        ex.menu_types.get(item).cloned().ok_or(Error::NoMatch)?
    } else {
        TypeId::from(EMPTY_TYPE_ID)
    };
    Ok(Identification {
        type_id: id.clone(),
        transcript: dialogue.finish(),
        survivors: vec![vec![id]],
        count_steps: Vec::new(),
    })
}

/// Single-strategy baseline on the same family: posts the menu items one
/// at a time until some type answers `a*`. Each probe separates one type
/// from all others, so the empty type needs every item.
pub fn hardness_single_strategy_baseline(ex: &HardnessExample, agent: &mut dyn Agent) -> Result<Identification> {
    let items = match &ex.menu {
        Menu::Finite { items } => items,
        Menu::Ball { .. } => return Err(Error::InvalidParameter("hardness menu must be finite".into())),
    };
    let mut dialogue = Dialogue::new(agent, &ex.game.space);
    let mut remaining: Vec<TypeId> = ex.game.types.iter().map(|t| t.id().clone()).collect();
    let mut survivors = Vec::new();
    let mut found = None;
    for (x, id) in items.iter().zip(&ex.menu_types) {
        if dialogue.query(x.clone())? == ex.a_star {
            remaining.retain(|t| t == id);
            found = Some(id.clone());
        } else {
            remaining.retain(|t| t != id);
        }
        survivors.push(remaining.clone());
        if found.is_some() {
            break;
        }
    }
    Ok(Identification {
        type_id: found.unwrap_or_else(|| TypeId::from(EMPTY_TYPE_ID)),
        transcript: dialogue.finish(),
        survivors,
        count_steps: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::SimulatedAgent;
    use crate::model::utility;

    #[test]
    fn four_leader_actions() {
        let ex = build_hardness_example(4, 40.0).unwrap();
        assert_eq!(ex.game.n_types(), 7);
        let Menu::Finite { items } = &ex.menu else { panic!() };
        assert_eq!(items.len(), 6);
        assert_eq!(items[0].0, vec![0.5, 0.5, 0.0, 0.0]);
        let ty = ex.game.type_by_id(&TypeId::from("{1,2}")).unwrap();
        assert!((utility(ty, &items[0], ex.a_star).unwrap() - 1.0 / 1600.0).abs() < 1e-15);
    }

    #[test]
    fn menu_identifies_every_type_in_one_round() {
        let ex = build_hardness_example(4, 40.0).unwrap();
        for ty in &ex.game.types {
            let out = identify_via_hardness_menu(&ex, &mut SimulatedAgent::new(ty.clone())).unwrap();
            assert_eq!(&out.type_id, ty.id());
            assert_eq!(out.transcript.round_count(), 1);
        }
        let empty = ex.game.type_by_id(&TypeId::from(EMPTY_TYPE_ID)).unwrap().clone();
        let out = identify_via_hardness_menu(&ex, &mut SimulatedAgent::new(empty)).unwrap();
        assert_ne!(out.transcript.rounds[0].response, ex.a_star);
    }

    #[test]
    fn baseline_needs_every_item_for_the_empty_type() {
        let ex = build_hardness_example(4, 40.0).unwrap();
        let empty = ex.game.type_by_id(&TypeId::from(EMPTY_TYPE_ID)).unwrap().clone();
        let out = hardness_single_strategy_baseline(&ex, &mut SimulatedAgent::new(empty)).unwrap();
        assert_eq!(out.type_id, TypeId::from(EMPTY_TYPE_ID));
        assert_eq!(out.transcript.round_count(), ex.game.n_types() - 1);
    }

    #[test]
    fn parameter_checks() {
        assert!(build_hardness_example(5, 50.0).is_err());
        assert!(build_hardness_example(2, 50.0).is_err());
        assert!(build_hardness_example(4, 3.0).is_err());
    }
}
