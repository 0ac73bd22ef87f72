use crate::agent::{Agent, Dialogue};
use crate::error::{Assumption, Error, Result};
use crate::geometry::envelope_minimizer;
use crate::learners::assumptions::envelopes;
use crate::learners::{check_assumption_no_dominant, Identification};
use crate::model::{ActionIndex, GameInstance, Menu, TieBreakRule, TypeId};

/// Minimizers closer than this are treated as shared.
pub const SHARED_MINIMIZER_TOL: f64 = 1e-9;

struct Group {
    point: f64,
    members: Vec<usize>,
}

/// Halving search over sorted envelope minimizers with two-item menus.
///
/// Types sharing a minimizer travel together; if more than one survives the
/// halving, the principal posts that point alone after announcing tie-breaking
/// rules that make their responses pairwise distinct.
pub fn learn_via_menu(game: &GameInstance, agent: &mut dyn Agent) -> Result<Identification> {
    check_assumption_no_dominant(game)?.require(Assumption::NoDominant)?;
    let minimizers: Vec<f64> = envelopes(game)?.iter().map(envelope_minimizer).collect();

    let mut order: Vec<usize> = (0..game.n_types()).collect();
    order.sort_by(|&a, &b| minimizers[a].total_cmp(&minimizers[b]));
    let mut groups: Vec<Group> = Vec::new();
    for k in order {
        match groups.last_mut() {
            Some(g) if (minimizers[k] - g.point).abs() <= SHARED_MINIMIZER_TOL => g.members.push(k),
            _ => groups.push(Group {
                point: minimizers[k],
                members: vec![k],
            }),
        }
    }

    let ids = |groups: &[Group]| -> Vec<TypeId> {
        groups
            .iter()
            .flat_map(|g| g.members.iter().map(|&k| game.types[k].id().clone()))
            .collect()
    };
    let space = &game.space;
    let mut dialogue = Dialogue::new(agent, space);
    let mut survivors = Vec::new();

    while groups.len() > 1 {
        let mid = groups.len() / 2;
        let left = space.embed(&[groups[mid - 1].point]);
        let right = space.embed(&[groups[mid].point]);
        let choice = dialogue.post(Menu::Finite {
            items: vec![left, right],
        })?;
        match choice.item {
            // preferring the left item puts the minimizer to its right
            Some(0) => {
                groups.drain(..mid);
            }
            Some(1) => {
                groups.truncate(mid);
            }
            _ => return Err(Error::InconsistentAgent("choice is not a menu item".into())),
        }
        survivors.push(ids(&groups));
    }

    let group = groups.pop().ok_or(Error::NoMatch)?;
    if group.members.len() == 1 {
        let id = game.types[group.members[0]].id().clone();
        return Ok(Identification {
            type_id: id,
            transcript: dialogue.finish(),
            survivors,
            count_steps: Vec::new(),
        });
    }

    // shared minimizer: make responses injective through tie-breaking
    let x = space.embed(&[group.point]);
    let default_rule = TieBreakRule::default();
    let options: Vec<Vec<ActionIndex>> = group
        .members
        .iter()
        .map(|&k| default_rule.maximal_set(&game.types[k].utilities(&x.0)))
        .collect();
    let assignment = injective_assignment(&options).ok_or_else(|| {
        Error::IndistinguishableTypes(group.members.iter().map(|&k| game.types[k].id().clone()).collect())
    })?;
    let rules: Vec<(TypeId, TieBreakRule)> = group
        .members
        .iter()
        .zip(&assignment)
        .map(|(&k, &a)| (game.types[k].id().clone(), TieBreakRule::preferring(a)))
        .collect();
    dialogue.install_tie_breaks(&rules);
    let observed = dialogue.query(x)?;
    let pos = assignment.iter().position(|&a| a == observed).ok_or(Error::NoMatch)?;
    let id = game.types[group.members[pos]].id().clone();
    survivors.push(vec![id.clone()]);
    Ok(Identification {
        type_id: id,
        transcript: dialogue.finish(),
        survivors,
        count_steps: Vec::new(),
    })
}

/// Picks one option per row with all picks distinct (bipartite matching by
/// augmenting paths).
pub(crate) fn injective_assignment(options: &[Vec<ActionIndex>]) -> Option<Vec<ActionIndex>> {
    let n_actions = options.iter().flatten().max().map_or(0, |m| m + 1);
    let mut owner: Vec<Option<usize>> = vec![None; n_actions];

    fn augment(row: usize, options: &[Vec<ActionIndex>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &a in &options[row] {
            if seen[a] {
                continue;
            }
            seen[a] = true;
            if owner[a].is_none_or(|r| augment(r, options, owner, seen)) {
                owner[a] = Some(row);
                return true;
            }
        }
        false
    }

    for row in 0..options.len() {
        let mut seen = vec![false; n_actions];
        if !augment(row, options, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut picks = vec![0; options.len()];
    for (a, r) in owner.iter().enumerate() {
        if let Some(r) = r {
            picks[*r] = a;
        }
    }
    Some(picks)
}
