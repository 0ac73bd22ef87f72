//! Game model: strategy spaces with an affine chart, linear-utility agent
//! types, menus, and the exact agent simulator.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecops::{dot, norm};

pub type ActionIndex = usize;

/// Default indifference tolerance for action ties.
pub const DEFAULT_TAU: f64 = 1e-9;

/// Tolerance used when checking feasibility and menu membership.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Ambient principal strategy `x ∈ X ⊆ R^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Strategy(pub Vec<f64>);

impl Strategy {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<f64>> for Strategy {
    fn from(v: Vec<f64>) -> Self {
        Strategy(v)
    }
}

/// Opaque identifier of an agent type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeId(pub String);

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TypeId {
    fn from(s: &str) -> Self {
        TypeId(s.to_owned())
    }
}

impl From<String> for TypeId {
    fn from(s: String) -> Self {
        TypeId(s)
    }
}

/// A linear inequality `⟨g, t⟩ ≤ h` on effective coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub g: Vec<f64>,
    pub h: f64,
}

/// The principal's feasible set, described in effective coordinates `t ∈ R^d`
/// and embedded into the ambient space by `x = A·t + b`.
///
/// Every space carries box bounds on `t` (used for sampling) plus an optional
/// list of general linear constraints.
#[derive(Clone, Debug)]
pub struct StrategySpace {
    ambient_dim: usize,
    effective_dim: usize,
    /// Row-major `m × d`.
    chart: Vec<f64>,
    offset: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    constraints: Vec<LinearConstraint>,
    /// Row-major `d × m` left inverse of the chart.
    pinv: Vec<f64>,
}

impl PartialEq for StrategySpace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.effective_dim == other.effective_dim
            && self.chart == other.chart
            && self.offset == other.offset
            && self.lower == other.lower
            && self.upper == other.upper
            && self.constraints == other.constraints
    }
}

impl StrategySpace {
    /// Builds a space from a row-major `m × d` chart matrix.
    pub fn new(
        ambient_dim: usize,
        effective_dim: usize,
        chart: Vec<f64>,
        offset: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        constraints: Vec<LinearConstraint>,
    ) -> Result<Self> {
        let (m, d) = (ambient_dim, effective_dim);
        if m == 0 || d == 0 || d > m {
            return Err(Error::InvalidSpace(format!(
                "need 1 <= effective_dim <= ambient_dim, got d={d}, m={m}"
            )));
        }
        if chart.len() != m * d {
            return Err(Error::DimensionMismatch {
                expected: m * d,
                got: chart.len(),
            });
        }
        for (name, v, len) in [("offset", &offset, m), ("lower", &lower, d), ("upper", &upper, d)] {
            if v.len() != len {
                return Err(Error::InvalidSpace(format!(
                    "{name} has length {}, expected {len}",
                    v.len()
                )));
            }
        }
        if chart
            .iter()
            .chain(&offset)
            .chain(&lower)
            .chain(&upper)
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidSpace("non-finite chart, offset or bounds".into()));
        }
        if lower.iter().zip(&upper).any(|(lo, hi)| lo >= hi) {
            return Err(Error::InvalidSpace("box bounds must satisfy lower < upper".into()));
        }
        for c in &constraints {
            if c.g.len() != d || !c.h.is_finite() || c.g.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidSpace("malformed linear constraint".into()));
            }
        }

        let a = DMatrix::from_row_slice(m, d, &chart);
        let sv = a.clone().svd(false, false).singular_values;
        let smallest = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if smallest <= 1e-9 {
            return Err(Error::InvalidSpace(format!(
                "chart matrix is rank deficient (smallest singular value {smallest:e})"
            )));
        }
        let ata = a.transpose() * &a;
        let inv = ata
            .try_inverse()
            .ok_or_else(|| Error::InvalidSpace("chart normal matrix is singular".into()))?;
        let p = inv * a.transpose();
        let mut pinv = Vec::with_capacity(d * m);
        for r in 0..d {
            for c in 0..m {
                pinv.push(p[(r, c)]);
            }
        }

        Ok(StrategySpace {
            ambient_dim: m,
            effective_dim: d,
            chart,
            offset,
            lower,
            upper,
            constraints,
            pinv,
        })
    }

    /// Identity chart over the box `[lower, upper]`.
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let m = lower.len();
        let mut chart = vec![0.0; m * m];
        for i in 0..m {
            chart[i * m + i] = 1.0;
        }
        Self::new(m, m, chart, vec![0.0; m], lower, upper, Vec::new())
    }

    pub fn unit_box(m: usize) -> Result<Self> {
        Self::boxed(vec![0.0; m], vec![1.0; m])
    }

    /// Probability simplex `Δ^m`, charted by the first `m − 1` coordinates.
    pub fn simplex(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidSpace("simplex needs m >= 2".into()));
        }
        let d = m - 1;
        let mut chart = vec![0.0; m * d];
        for i in 0..d {
            chart[i * d + i] = 1.0;
        }
        for c in 0..d {
            chart[d * d + c] = -1.0;
        }
        let mut offset = vec![0.0; m];
        offset[m - 1] = 1.0;
        let constraints = if d >= 2 {
            vec![LinearConstraint {
                g: vec![1.0; d],
                h: 1.0,
            }]
        } else {
            Vec::new()
        };
        Self::new(m, d, chart, offset, vec![0.0; d], vec![1.0; d], constraints)
    }

    /// One-dimensional segment `x(t) = offset + t·direction`, `t ∈ [0, 1]`.
    pub fn segment(direction: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        let m = direction.len();
        Self::new(m, 1, direction, offset, vec![0.0], vec![1.0], Vec::new())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn effective_dim(&self) -> usize {
        self.effective_dim
    }

    /// Row-major `m × d` chart matrix.
    pub fn chart(&self) -> &[f64] {
        &self.chart
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn is_identity_chart(&self) -> bool {
        let m = self.ambient_dim;
        self.effective_dim == m
            && self.offset.iter().all(|&b| b == 0.0)
            && (0..m).all(|r| (0..m).all(|c| self.chart[r * m + c] == if r == c { 1.0 } else { 0.0 }))
    }

    /// True when the effective box is exactly `[0, 1]` and there are no extra
    /// constraints, which is the normalized form used by the one-dimensional learners.
    pub fn is_unit_interval(&self) -> bool {
        self.effective_dim == 1 && self.lower[0] == 0.0 && self.upper[0] == 1.0 && self.constraints.is_empty()
    }

    pub fn embed(&self, t: &[f64]) -> Strategy {
        let d = self.effective_dim;
        let x = (0..self.ambient_dim)
            .map(|r| self.offset[r] + dot(&self.chart[r * d..(r + 1) * d], t))
            .collect();
        Strategy(x)
    }

    /// Least-squares preimage of an ambient point under the chart.
    pub fn to_effective(&self, x: &Strategy) -> Vec<f64> {
        let m = self.ambient_dim;
        let centered: Vec<f64> = x.0.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        (0..self.effective_dim)
            .map(|r| dot(&self.pinv[r * m..(r + 1) * m], &centered))
            .collect()
    }

    /// Effective gradient `Aᵀ v`.
    pub fn effective_gradient(&self, v: &[f64]) -> Vec<f64> {
        let d = self.effective_dim;
        (0..d)
            .map(|c| (0..self.ambient_dim).map(|r| self.chart[r * d + c] * v[r]).sum())
            .collect()
    }

    /// Effective intercept `⟨v, b⟩ + c`.
    pub fn effective_intercept(&self, v: &[f64], c: f64) -> f64 {
        dot(v, &self.offset) + c
    }

    /// Signed Euclidean distance from `t` to the nearest constraint face
    /// (negative when infeasible).
    pub fn slack(&self, t: &[f64]) -> f64 {
        let mut s = f64::INFINITY;
        for i in 0..self.effective_dim {
            s = s.min(t[i] - self.lower[i]).min(self.upper[i] - t[i]);
        }
        for c in &self.constraints {
            let gn = norm(&c.g);
            if gn > 0.0 {
                s = s.min((c.h - dot(&c.g, t)) / gn);
            }
        }
        s
    }

    pub fn is_feasible(&self, t: &[f64]) -> bool {
        t.len() == self.effective_dim && self.slack(t) >= -FEASIBILITY_TOL
    }

    /// Feasibility of an ambient strategy: it must lie on the chart image and
    /// map to feasible effective coordinates.
    pub fn contains(&self, x: &Strategy) -> bool {
        if x.dim() != self.ambient_dim {
            return false;
        }
        let t = self.to_effective(x);
        let back = self.embed(&t);
        let on_chart = back.0.iter().zip(&x.0).all(|(a, b)| (a - b).abs() <= FEASIBILITY_TOL);
        on_chart && self.is_feasible(&t)
    }

    pub fn ball_inside(&self, center: &[f64], radius: f64) -> bool {
        center.len() == self.effective_dim && self.slack(center) >= radius - 1e-12
    }

    /// Euclidean diameter of the effective box.
    pub fn box_diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    /// Rejection sample of a uniformly distributed feasible effective point.
    pub fn sample_feasible<R: Rng + ?Sized>(&self, rng: &mut R, max_draws: usize) -> Option<Vec<f64>> {
        for _ in 0..max_draws {
            let t: Vec<f64> = self
                .lower
                .iter()
                .zip(&self.upper)
                .map(|(lo, hi)| rng.random_range(*lo..*hi))
                .collect();
            if self.slack(&t) > 0.0 {
                return Some(t);
            }
        }
        None
    }
}

/// One private agent type: per-action utility `V(x, j) = ⟨v_j, x⟩ + c_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentType {
    id: TypeId,
    directions: Vec<Vec<f64>>,
    intercepts: Vec<f64>,
}

impl AgentType {
    pub fn new(id: impl Into<TypeId>, directions: Vec<Vec<f64>>, intercepts: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if directions.len() < 2 {
            return Err(Error::InvalidType(format!("type {id} needs at least 2 actions")));
        }
        if directions.len() != intercepts.len() {
            return Err(Error::InvalidType(format!(
                "type {id}: {} directions but {} intercepts",
                directions.len(),
                intercepts.len()
            )));
        }
        let m = directions[0].len();
        if m == 0 || directions.iter().any(|v| v.len() != m) {
            return Err(Error::InvalidType(format!("type {id}: ragged direction vectors")));
        }
        if directions.iter().flatten().chain(&intercepts).any(|x| !x.is_finite()) {
            return Err(Error::InvalidType(format!("type {id}: non-finite parameter")));
        }
        Ok(AgentType {
            id,
            directions,
            intercepts,
        })
    }

    pub fn id(&self) -> &TypeId {
        &self.id
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    pub fn n_actions(&self) -> usize {
        self.directions.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.directions[0].len()
    }

    pub fn with_id(mut self, id: impl Into<TypeId>) -> Self {
        self.id = id.into();
        self
    }

    /// Utilities of every action at `x`, without bounds checks.
    pub fn utilities(&self, x: &[f64]) -> Vec<f64> {
        self.directions
            .iter()
            .zip(&self.intercepts)
            .map(|(v, c)| dot(v, x) + c)
            .collect()
    }

    pub(crate) fn check_dim(&self, x: &Strategy) -> Result<()> {
        if x.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }
}

/// Metadata tag recording which game family an instance came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameClass {
    Stackelberg,
    Security,
    Contract,
    InfoAcq,
    Generic,
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GameClass::Stackelberg => "stackelberg",
            GameClass::Security => "security",
            GameClass::Contract => "contract",
            GameClass::InfoAcq => "info_acq",
            GameClass::Generic => "generic",
        };
        f.write_str(s)
    }
}

/// A strategy space together with the finite type set `Θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GameInstance {
    pub space: StrategySpace,
    pub types: Vec<AgentType>,
    pub class: GameClass,
    /// Principal-side payoff data. Carried along, never read by a learner.
    pub metadata: serde_json::Value,
}

impl GameInstance {
    pub fn new(space: StrategySpace, types: Vec<AgentType>, class: GameClass) -> Result<Self> {
        Self::with_metadata(space, types, class, serde_json::Value::Object(Default::default()))
    }

    pub fn with_metadata(
        space: StrategySpace,
        types: Vec<AgentType>,
        class: GameClass,
        metadata: serde_json::Value,
    ) -> Result<Self> {
        let first = types
            .first()
            .ok_or_else(|| Error::InvalidGame("type set is empty".into()))?;
        let (n, m) = (first.n_actions(), first.ambient_dim());
        if m != space.ambient_dim() {
            return Err(Error::InvalidGame(format!(
                "types have dimension {m}, space has ambient dimension {}",
                space.ambient_dim()
            )));
        }
        let mut ids = std::collections::BTreeSet::new();
        for ty in &types {
            if ty.n_actions() != n || ty.ambient_dim() != m {
                return Err(Error::InvalidGame(format!(
                    "type {} does not share action count {n} and dimension {m}",
                    ty.id()
                )));
            }
            if !ids.insert(ty.id().clone()) {
                return Err(Error::InvalidGame(format!("duplicate type id {}", ty.id())));
            }
        }
        Ok(GameInstance {
            space,
            types,
            class,
            metadata,
        })
    }

    pub fn n_actions(&self) -> usize {
        self.types[0].n_actions()
    }

    pub fn n_types(&self) -> usize {
        self.types.len()
    }

    pub fn type_by_id(&self, id: &TypeId) -> Option<&AgentType> {
        self.types.iter().find(|t| t.id() == id)
    }

    /// Same types over a different strategy space (e.g. a one-dimensional slice).
    pub fn with_space(&self, space: StrategySpace) -> Result<Self> {
        Self::with_metadata(space, self.types.clone(), self.class, self.metadata.clone())
    }
}

/// What the principal posts in one round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Menu {
    Finite {
        items: Vec<Strategy>,
    },
    /// Closed ball in effective coordinates; stores the radius, not its square.
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
}

impl Menu {
    pub fn single(x: Strategy) -> Self {
        Menu::Finite { items: vec![x] }
    }
}

/// Resolves indifference among utility-maximal actions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TieBreakRule {
    pub tau: f64,
    /// Preference order over actions; `None` means lowest index first.
    pub priority: Option<Vec<ActionIndex>>,
}

impl Default for TieBreakRule {
    fn default() -> Self {
        TieBreakRule {
            tau: DEFAULT_TAU,
            priority: None,
        }
    }
}

impl TieBreakRule {
    /// Prefer `action` whenever it is among the maximal set.
    pub fn preferring(action: ActionIndex) -> Self {
        TieBreakRule {
            tau: DEFAULT_TAU,
            priority: Some(vec![action]),
        }
    }

    /// Actions within `tau` of the maximum.
    pub fn maximal_set(&self, utilities: &[f64]) -> Vec<ActionIndex> {
        let best = utilities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (0..utilities.len())
            .filter(|&j| utilities[j] >= best - self.tau)
            .collect()
    }

    pub fn select(&self, utilities: &[f64]) -> ActionIndex {
        let set = self.maximal_set(utilities);
        if let Some(order) = &self.priority {
            if let Some(&j) = order.iter().find(|j| set.contains(j)) {
                return j;
            }
        }
        set[0]
    }
}

/// One posted menu with the agent's observed choice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub menu: Menu,
    pub chosen: Strategy,
    pub response: ActionIndex,
}

/// Ordered record of a principal–agent dialogue.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transcript {
    pub rounds: Vec<Round>,
}

impl Transcript {
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    /// Checks that every chosen strategy belongs to the posted menu.
    pub fn validate(&self, space: &StrategySpace) -> Result<()> {
        for (k, r) in self.rounds.iter().enumerate() {
            if !chosen_in_menu(space, &r.menu, &r.chosen) {
                return Err(Error::InconsistentAgent(format!(
                    "round {k}: chosen strategy is not in the posted menu"
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn chosen_in_menu(space: &StrategySpace, menu: &Menu, chosen: &Strategy) -> bool {
    match menu {
        Menu::Finite { items } => items.iter().any(|it| {
            it.dim() == chosen.dim()
                && it
                    .0
                    .iter()
                    .zip(&chosen.0)
                    .all(|(a, b)| (a - b).abs() <= FEASIBILITY_TOL)
        }),
        Menu::Ball { center, radius } => {
            chosen.dim() == space.ambient_dim()
                && crate::vecops::dist(&space.to_effective(chosen), center) <= radius + FEASIBILITY_TOL
        }
    }
}

/// `V(x, j) = ⟨v_j, x⟩ + c_j`.
pub fn utility(ty: &AgentType, x: &Strategy, j: ActionIndex) -> Result<f64> {
    ty.check_dim(x)?;
    if j >= ty.n_actions() {
        return Err(Error::ActionOutOfRange {
            index: j,
            actions: ty.n_actions(),
        });
    }
    Ok(dot(&ty.directions[j], &x.0) + ty.intercepts[j])
}

pub fn best_response(ty: &AgentType, x: &Strategy, rule: &TieBreakRule) -> Result<ActionIndex> {
    ty.check_dim(x)?;
    Ok(rule.select(&ty.utilities(&x.0)))
}

/// Agent's choice from a finite menu. Items are compared exactly (first
/// maximal item wins); the response at the chosen item follows `rule`.
///
/// Returns `(item index, chosen strategy, response)`.
pub fn choose_from_finite_menu(
    ty: &AgentType,
    items: &[Strategy],
    rule: &TieBreakRule,
) -> Result<(usize, Strategy, ActionIndex)> {
    if items.is_empty() {
        return Err(Error::EmptyMenu);
    }
    let mut best_item = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (k, x) in items.iter().enumerate() {
        ty.check_dim(x)?;
        let value = ty.utilities(&x.0).into_iter().fold(f64::NEG_INFINITY, f64::max);
        if value > best_value {
            best_value = value;
            best_item = k;
        }
    }
    let x = items[best_item].clone();
    let j = rule.select(&ty.utilities(&x.0));
    Ok((best_item, x, j))
}

/// Agent's choice from the ball `{t : |t − center| ≤ radius}` in effective
/// coordinates. Maximizes jointly over actions and ball points: the winning
/// action has the largest `⟨w_j, t̂⟩ + c'_j + ρ‖w_j‖`, and the chosen point
/// moves from the center by `ρ` along its unit effective gradient.
pub fn choose_from_ball_menu(
    ty: &AgentType,
    space: &StrategySpace,
    center: &[f64],
    radius: f64,
) -> Result<(Strategy, ActionIndex)> {
    if ty.ambient_dim() != space.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: space.ambient_dim(),
            got: ty.ambient_dim(),
        });
    }
    if center.len() != space.effective_dim() {
        return Err(Error::DimensionMismatch {
            expected: space.effective_dim(),
            got: center.len(),
        });
    }
    if !(radius > 0.0) || !space.ball_inside(center, radius) {
        return Err(Error::BallNotContained { radius });
    }
    let mut grads = Vec::with_capacity(ty.n_actions());
    let mut scores = Vec::with_capacity(ty.n_actions());
    for (v, &c) in ty.directions().iter().zip(ty.intercepts()) {
        let w = space.effective_gradient(v);
        let c_eff = space.effective_intercept(v, c);
        let wn = norm(&w);
        scores.push(dot(&w, center) + c_eff + radius * wn);
        grads.push((w, wn));
    }
    let j = TieBreakRule::default().select(&scores);
    let (w, wn) = &grads[j];
    let t = if *wn < 1e-12 {
        center.to_vec()
    } else {
        crate::vecops::add_scaled(center, radius / wn, w)
    };
    Ok((space.embed(&t), j))
}
