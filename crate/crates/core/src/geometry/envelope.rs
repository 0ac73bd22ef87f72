use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionIndex, AgentType, StrategySpace};

/// One linear piece of an upper envelope on `[start, end]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub action: ActionIndex,
    pub slope: f64,
    pub intercept: f64,
    pub start: f64,
    pub end: f64,
}

impl Segment {
    pub fn value(&self, t: f64) -> f64 {
        self.slope * t + self.intercept
    }
}

/// Upper envelope `max_j (slope_j·t + intercept_j)` over `t ∈ [0, 1]`.
///
/// Segments tile `[0, 1]` left to right and their slopes strictly increase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope1D {
    segments: Vec<Segment>,
}

/// Action change at an interior breakpoint of an envelope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub at: f64,
    pub from: ActionIndex,
    pub to: ActionIndex,
}

impl Envelope1D {
    /// Envelope of `lines[j] = (slope, intercept)`; action indices are the
    /// positions in `lines`. Exactly collinear duplicates keep the lowest index.
    pub fn from_lines(lines: &[(f64, f64)]) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::InvalidParameter("envelope needs at least one line".into()));
        }
        // Start with the best line at t = 0; among equal values the steeper one
        // owns the right neighbourhood of 0.
        let mut current = 0;
        for j in 1..lines.len() {
            let (a, b) = lines[j];
            let (ca, cb) = lines[current];
            if b > cb || (b == cb && a > ca) {
                current = j;
            }
        }
        let mut segments = Vec::new();
        let mut start = 0.0_f64;
        loop {
            let (ca, cb) = lines[current];
            let mut next: Option<(f64, usize)> = None;
            for (k, &(a, b)) in lines.iter().enumerate() {
                if a <= ca {
                    continue;
                }
                let cross = ((cb - b) / (a - ca)).max(start);
                if cross >= 1.0 {
                    continue;
                }
                let better = match next {
                    None => true,
                    Some((t, n)) => cross < t || (cross == t && a > lines[n].0),
                };
                if better {
                    next = Some((cross, k));
                }
            }
            match next {
                Some((t, k)) => {
                    if t > start {
                        segments.push(Segment {
                            action: current,
                            slope: ca,
                            intercept: cb,
                            start,
                            end: t,
                        });
                        start = t;
                    }
                    current = k;
                }
                None => {
                    segments.push(Segment {
                        action: current,
                        slope: ca,
                        intercept: cb,
                        start,
                        end: 1.0,
                    });
                    break;
                }
            }
        }
        Ok(Envelope1D { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `0`, every interior breakpoint, then `1`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.segments.iter().map(|s| s.start).collect();
        b.push(1.0);
        b
    }

    pub fn transitions(&self) -> Vec<Transition> {
        self.segments
            .windows(2)
            .map(|w| Transition {
                at: w[1].start,
                from: w[0].action,
                to: w[1].action,
            })
            .collect()
    }

    pub fn value(&self, t: f64) -> f64 {
        self.segment_at(t).value(t)
    }

    pub fn segment_at(&self, t: f64) -> &Segment {
        self.segments
            .iter()
            .find(|s| t < s.end)
            .unwrap_or_else(|| self.segments.last().expect("envelope has a segment"))
    }

    /// True when a single action owns all of `[0, 1]`.
    pub fn has_dominant_action(&self) -> bool {
        self.segments.len() == 1
    }
}

/// Envelope of a type's effective lines on a unit-interval space.
pub fn build_envelope(ty: &AgentType, space: &StrategySpace) -> Result<Envelope1D> {
    if space.effective_dim() != 1 {
        return Err(Error::WrongEffectiveDim {
            expected: "1",
            got: space.effective_dim(),
        });
    }
    if !space.is_unit_interval() {
        return Err(Error::InvalidSpace(
            "one-dimensional operations need the effective interval [0, 1]".into(),
        ));
    }
    Envelope1D::from_lines(&effective_lines(ty, space))
}

/// `(slope, intercept)` of every action in the effective coordinate.
pub fn effective_lines(ty: &AgentType, space: &StrategySpace) -> Vec<(f64, f64)> {
    ty.directions()
        .iter()
        .zip(ty.intercepts())
        .map(|(v, &c)| (space.effective_gradient(v)[0], space.effective_intercept(v, c)))
        .collect()
}

/// Leftmost minimizer: the start of the first segment whose slope is
/// nonnegative, or `1` when the envelope decreases throughout.
pub fn envelope_minimizer(env: &Envelope1D) -> f64 {
    env.segments()
        .iter()
        .find(|s| s.slope >= 0.0)
        .map(|s| s.start)
        .unwrap_or(1.0)
}
