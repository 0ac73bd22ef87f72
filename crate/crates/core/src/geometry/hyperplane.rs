use crate::error::{Error, Result};
use crate::model::{ActionIndex, Strategy};
use crate::vecops::{dot, midpoint};

/// Result of a bisection between two regions.
#[derive(Clone, Debug, PartialEq)]
pub struct Bisection {
    /// Midpoint of the final bracket.
    pub point: Strategy,
    /// Actions elicited at the final bracket endpoints.
    pub side_actions: (ActionIndex, ActionIndex),
    pub bracket: (Strategy, Strategy),
    pub queries: usize,
}

/// Binary search for a point on the boundary between the regions containing
/// `x_a` and `x_b`.
///
/// After `precision_bits` halvings the bracket has length
/// `‖x_b − x_a‖·2^−L`; total oracle calls are `L + 2`. When a midpoint elicits
/// a third action it replaces the `b` end, so the `a` side always keeps the
/// action first observed at `x_a`.
pub fn bisect_hyperplane<O>(mut oracle: O, x_a: &Strategy, x_b: &Strategy, precision_bits: u32) -> Result<Bisection>
where
    O: FnMut(&Strategy) -> Result<ActionIndex>,
{
    if x_a.dim() != x_b.dim() {
        return Err(Error::DimensionMismatch {
            expected: x_a.dim(),
            got: x_b.dim(),
        });
    }
    let ja = oracle(x_a)?;
    let mut jb = oracle(x_b)?;
    if ja == jb {
        return Err(Error::SameResponse { action: ja });
    }
    let mut a = x_a.0.clone();
    let mut b = x_b.0.clone();
    let mut queries = 2;
    for _ in 0..precision_bits {
        let m = Strategy(midpoint(&a, &b));
        let jm = oracle(&m)?;
        queries += 1;
        if jm == ja {
            a = m.0;
        } else {
            b = m.0;
            jb = jm;
        }
    }
    Ok(Bisection {
        point: Strategy(midpoint(&a, &b)),
        side_actions: (ja, jb),
        bracket: (Strategy(a), Strategy(b)),
        queries,
    })
}

/// Minimum spread of hyperplane points projected on the unknown direction.
pub const MIN_LINK_SPREAD: f64 = 1e-6;

/// Solves `λ_j⟨u_j, x_k⟩ + c_j = λ'⟨u', x_k⟩ + c'` for `(λ', c')` by least
/// squares over points `x_k` on the `(j, j')` boundary.
pub fn solve_link(
    known: (f64, f64),
    dir_known: &[f64],
    dir_unknown: &[f64],
    points: &[Strategy],
) -> Result<(f64, f64)> {
    let (scale, intercept) = known;
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("known scale {scale} must be positive")));
    }
    if points.len() < 2 {
        return Err(Error::DegenerateSpread { spread: 0.0 });
    }
    let proj: Vec<f64> = points.iter().map(|x| dot(dir_unknown, &x.0)).collect();
    let target: Vec<f64> = points
        .iter()
        .map(|x| scale * dot(dir_known, &x.0) + intercept)
        .collect();
    let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    if !(spread > MIN_LINK_SPREAD) {
        return Err(Error::DegenerateSpread { spread });
    }
    let k = points.len() as f64;
    let pm = proj.iter().sum::<f64>() / k;
    let tm = target.iter().sum::<f64>() / k;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (p, t) in proj.iter().zip(&target) {
        sxy += (p - pm) * (t - tm);
        sxx += (p - pm) * (p - pm);
    }
    let new_scale = sxy / sxx;
    if !(new_scale > 0.0) {
        return Err(Error::NonpositiveScale { scale: new_scale });
    }
    Ok((new_scale, tm - new_scale * pm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{best_response, AgentType, TieBreakRule};

    #[test]
    fn bisection_on_symmetric_pair() {
        let ty = AgentType::new("a", vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]).unwrap();
        let rule = TieBreakRule::default();
        let mut calls = 0;
        let res = bisect_hyperplane(
            |x| {
                calls += 1;
                best_response(&ty, x, &rule)
            },
            &Strategy(vec![1.0, 0.0]),
            &Strategy(vec![0.0, 1.0]),
            10,
        )
        .unwrap();
        assert_eq!(calls, 12);
        assert_eq!(res.queries, 12);
        assert_eq!(res.side_actions, (0, 1));
        let tol = 2f64.sqrt() * 2f64.powi(-10);
        assert!((res.point.0[0] - 0.5).abs() <= tol);
        assert!((res.point.0[1] - 0.5).abs() <= tol);
    }

    #[test]
    fn bisection_needs_distinct_endpoints() {
        let err = bisect_hyperplane(|_| Ok(3), &Strategy(vec![0.0]), &Strategy(vec![1.0]), 8).unwrap_err();
        assert!(matches!(err, Error::SameResponse { action: 3 }));
    }

    #[test]
    fn third_action_replaces_far_end() {
        // regions along the line: action 0 on [0, 0.3), action 2 on [0.3, 0.6), action 1 beyond
        let oracle = |x: &Strategy| {
            Ok(if x.0[0] < 0.3 {
                0
            } else if x.0[0] < 0.6 {
                2
            } else {
                1
            })
        };
        let res = bisect_hyperplane(oracle, &Strategy(vec![0.0]), &Strategy(vec![1.0]), 30).unwrap();
        assert_eq!(res.side_actions, (0, 2));
        assert!((res.point.0[0] - 0.3).abs() < 1e-8);
    }

    #[test]
    fn link_hand_solved() {
        let pts = vec![Strategy(vec![0.5, 0.5]), Strategy(vec![0.1, 0.3])];
        let (l, c) = solve_link((1.0, 0.0), &[1.0, 0.0], &[0.0, 1.0], &pts).unwrap();
        assert!((l - 2.0).abs() < 1e-12);
        assert!((c + 0.5).abs() < 1e-12);
    }

    #[test]
    fn link_degenerate_and_sign_errors() {
        let pts = vec![Strategy(vec![0.5, 0.5]), Strategy(vec![0.5, 0.5])];
        assert!(matches!(
            solve_link((1.0, 0.0), &[1.0, 0.0], &[0.0, 1.0], &pts),
            Err(Error::DegenerateSpread { .. })
        ));
        // flipping the unknown direction makes the solved scale negative
        let pts = vec![Strategy(vec![0.5, 0.5]), Strategy(vec![0.1, 0.3])];
        assert!(matches!(
            solve_link((1.0, 0.0), &[1.0, 0.0], &[0.0, -1.0], &pts),
            Err(Error::NonpositiveScale { .. })
        ));
    }
}
