//! Regression rank scores: the dual program, its location-case closed form,
//! and the left derivative of the score trajectory at level one.
//!
//! The rank scores `â(α)` maximize `Yᵀa` subject to
//! `X*ᵀa = (1−α)·X*ᵀ1` and `a ∈ [0,1]^n`. They are continuous and piecewise
//! linear in `α`, run from `â(0) = 1` down to `â(1) = 0`, and do not change
//! when `Y` is shifted by any column combination of the design. In the
//! location case they reduce to Hájek's rank scores. The left derivative at
//! `α = 1` vanishes off the optimal base and equals
//! `−1ᵀX*(X*_{n1})⁻¹` on it, which links the dual trajectory to the
//! base-weight representation of the averaged extreme quantile.

use crate::data::{BaseWeights, Dataset, QuantileFit};
use crate::linalg::{dot, solve_square_system_with, transpose, LinearSolveResult};
use crate::simplex::{solve_lp, LpProblem, LpStatus, Sense};
use crate::tol::Tolerances;
use crate::{Error, Result};

/// A solved rank-score vector at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct RankScoreSolution {
    pub alpha: f64,
    /// `â(α) ∈ [0,1]^n`.
    pub scores: Vec<f64>,
    /// `Yᵀâ(α)`.
    pub dual_objective: f64,
}

/// Left derivative `â′(1)`: zero off the base, `−1ᵀX*(X*_{n1})⁻¹` on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreDerivativeAtOne {
    /// Full `n`-vector, nonzero only at the base indices.
    pub derivative: Vec<f64>,
    /// 0-based base indices, sorted ascending.
    pub base_indices: Vec<usize>,
}

/// One grid point of the score-route trajectory of `B_n(α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTrajectoryPoint {
    pub alpha: f64,
    /// `−(1/n) Σ y_i â′_i(α)` by finite differences.
    pub value: f64,
    /// Step used by the finite difference.
    pub step: f64,
    /// False when the linearity check kept failing: the grid point straddles
    /// a breakpoint of the score trajectory and the value is unreliable.
    pub linear: bool,
}

/// Solves the rank-score program at `alpha ∈ [0, 1]`.
///
/// At the boundaries the equality row for the intercept pins the solution
/// completely (`Σa_i = (1−α)n` with `a ∈ [0,1]^n` forces all ones or all
/// zeros), so those are returned in closed form.
pub fn solve_rank_scores(data: &Dataset, alpha: f64, tol: &Tolerances) -> Result<RankScoreSolution> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha {
            alpha,
            range: "[0, 1]",
        });
    }
    let n = data.n();
    if alpha == 0.0 {
        let scores = vec![1.0; n];
        let dual_objective = data.y().iter().sum();
        return Ok(RankScoreSolution {
            alpha,
            scores,
            dual_objective,
        });
    }
    if alpha == 1.0 {
        return Ok(RankScoreSolution {
            alpha,
            scores: vec![0.0; n],
            dual_objective: 0.0,
        });
    }

    let mut lp = LpProblem::maximize(data.y().to_vec());
    for j in 0..n {
        lp.set_bounds(j, 0.0, 1.0);
    }
    let cols = transpose(&data.design_rows());
    let sums = data.design_col_sums();
    for (row, s) in cols.into_iter().zip(&sums) {
        lp.constraint(row, Sense::Eq, (1.0 - alpha) * s);
    }
    let sol = solve_lp(&lp, tol)?;
    if sol.status != LpStatus::Optimal {
        // a = (1-alpha)·1 is always feasible and the box keeps it bounded
        return Err(Error::Internal(format!(
            "rank-score program returned {:?} at alpha = {}",
            sol.status, alpha
        )));
    }
    Ok(RankScoreSolution {
        alpha,
        scores: sol.x,
        dual_objective: sol.objective,
    })
}

/// Hájek's rank scores: the location-case closed form. `ranks` must be a
/// permutation of `1..=n`.
pub fn hajek_scores(ranks: &[usize], alpha: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha {
            alpha,
            range: "[0, 1]",
        });
    }
    let n = ranks.len();
    let mut seen = vec![false; n];
    for &r in ranks {
        if r < 1 || r > n || seen[r - 1] {
            return Err(Error::NotAPermutation(format!("rank {} in a sample of {}", r, n)));
        }
        seen[r - 1] = true;
    }
    let na = n as f64 * alpha;
    Ok(ranks
        .iter()
        .map(|&ri| {
            let r = ri as f64;
            if na <= r - 1.0 {
                1.0
            } else if na < r {
                r - na
            } else {
                0.0
            }
        })
        .collect())
}

/// Ranks of a sample, 1-based, ties broken by lowest index.
pub fn ranks_of(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0; values.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    ranks
}

/// Left derivative of the rank scores at `α = 1`, computed in closed form
/// from the optimal base rather than by differencing LP solutions.
pub fn derivative_at_one(data: &Dataset, base: &BaseWeights) -> Result<ScoreDerivativeAtOne> {
    let p1 = data.p() + 1;
    if base.indices.len() != p1 {
        return Err(Error::Degenerate(format!(
            "base has {} rows, expected {}",
            base.indices.len(),
            p1
        )));
    }
    // zᵀ X*_{n1} = 1ᵀX*  ⇔  X*_{n1}ᵀ z = column sums
    let at = transpose(&base.base_matrix);
    let sums = data.design_col_sums();
    let z = match solve_square_system_with(&at, &sums, Tolerances::default().rank_pivot_ratio) {
        LinearSolveResult::Solution(z) => z,
        LinearSolveResult::Singular { .. } => return Err(Error::SingularBase),
    };
    let mut derivative = vec![0.0; data.n()];
    for (k, &i) in base.indices.iter().enumerate() {
        derivative[i] = -z[k];
    }

    // Both summation identities follow from the solve; a gross violation
    // means the base was not actually optimal.
    let total: f64 = derivative.iter().sum();
    if (total + data.n() as f64).abs() > 1e-6 * (1.0 + data.n() as f64) {
        return Err(Error::Internal(format!(
            "score derivative sums to {}, expected {}",
            total,
            -(data.n() as f64)
        )));
    }
    Ok(ScoreDerivativeAtOne {
        derivative,
        base_indices: base.indices.clone(),
    })
}

/// `B_n(α)` along a grid by central (one-sided at `α = 1`) finite
/// differences of the rank scores, with a linearity check that detects
/// breakpoint straddles and shrinks the step before giving up.
pub fn averaged_rq_via_scores(
    data: &Dataset,
    alphas: &[f64],
    tol: &Tolerances,
) -> Result<Vec<ScoreTrajectoryPoint>> {
    let n = data.n() as f64;
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidAlpha {
                alpha,
                range: "[0, 1]",
            });
        }
        let point = if alpha == 1.0 {
            one_sided_at_one(data, tol)?
        } else {
            central_difference(data, alpha, tol)?
        };
        let _ = n;
        out.push(point);
    }
    Ok(out)
}

fn one_sided_at_one(data: &Dataset, tol: &Tolerances) -> Result<ScoreTrajectoryPoint> {
    let n = data.n() as f64;
    let mut h = 1.0 / (2.0 * n);
    let mut last = None;
    for _ in 0..3 {
        let coarse = solve_rank_scores(data, 1.0 - h, tol)?;
        let fine = solve_rank_scores(data, 1.0 - h / 2.0, tol)?;
        // â(1) = 0, so the secant slopes are -s/h and -s/(h/2).
        let slope_gap = coarse
            .scores
            .iter()
            .zip(&fine.scores)
            .map(|(a, b)| (a / h - b / (h / 2.0)).abs())
            .fold(0.0_f64, f64::max);
        let value = data
            .y()
            .iter()
            .zip(&fine.scores)
            .map(|(y, s)| y * (s / (h / 2.0)))
            .sum::<f64>()
            / n;
        let linear = slope_gap <= 1e-7 * (1.0 + n);
        last = Some(ScoreTrajectoryPoint {
            alpha: 1.0,
            value,
            step: h / 2.0,
            linear,
        });
        if linear {
            break;
        }
        h /= 4.0;
    }
    Ok(last.expect("at least one attempt"))
}

fn central_difference(data: &Dataset, alpha: f64, tol: &Tolerances) -> Result<ScoreTrajectoryPoint> {
    let n = data.n() as f64;
    let mut h = (1.0 / (2.0 * n)).min(alpha / 2.0).min((1.0 - alpha) / 2.0);
    let mut last = None;
    for _ in 0..3 {
        let minus = solve_rank_scores(data, alpha - h, tol)?;
        let plus = solve_rank_scores(data, alpha + h, tol)?;
        let center = solve_rank_scores(data, alpha, tol)?;
        let curvature = plus
            .scores
            .iter()
            .zip(&minus.scores)
            .zip(&center.scores)
            .map(|((p, m), c)| (p + m - 2.0 * c).abs())
            .fold(0.0_f64, f64::max);
        let value = -plus
            .scores
            .iter()
            .zip(&minus.scores)
            .zip(data.y())
            .map(|((p, m), y)| y * (p - m) / (2.0 * h))
            .sum::<f64>()
            / n;
        let linear = curvature <= 1e-8;
        last = Some(ScoreTrajectoryPoint {
            alpha,
            value,
            step: h,
            linear,
        });
        if linear {
            break;
        }
        h /= 4.0;
    }
    Ok(last.expect("at least one attempt"))
}

/// The default evaluation grid: 99 interior levels at step 0.01.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 * 0.01).collect()
}

/// `‖X*ᵀâ − (1−α)·X*ᵀ1‖_∞`, the dual-constraint residual.
pub fn dual_constraint_violation(data: &Dataset, sol: &RankScoreSolution) -> f64 {
    let cols = transpose(&data.design_rows());
    let sums = data.design_col_sums();
    cols.iter()
        .zip(&sums)
        .map(|(col, s)| (dot(col, &sol.scores) - (1.0 - sol.alpha) * s).abs())
        .fold(0.0_f64, f64::max)
}

/// Largest complementary-slackness violation between a primal fit and the
/// rank scores at the same level: positive residuals force a score of one,
/// negative residuals force zero, and fractional scores force a zero
/// residual.
pub fn complementarity_gap(data: &Dataset, fit: &QuantileFit, sol: &RankScoreSolution) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..data.n() {
        let r = fit.residuals[i];
        let a = sol.scores[i];
        let band = 1e-7 * (1.0 + data.y()[i].abs());
        if r > band {
            worst = worst.max((1.0 - a).abs());
        } else if r < -band {
            worst = worst.max(a.abs());
        } else if a > 1e-7 && a < 1.0 - 1e-7 {
            worst = worst.max(r.abs() / (1.0 + data.y()[i].abs()));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaged::aerq_via_weights;
    use crate::rq::{extract_base, fit_extreme_rq};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn worked_instance() -> Dataset {
        Dataset::new(vec![1.0, 3.0, 2.0], &[vec![0.0], vec![1.0], vec![3.0]]).unwrap()
    }

    #[test]
    fn boundary_levels_are_exact() {
        let d = worked_instance();
        let s0 = solve_rank_scores(&d, 0.0, &tol()).unwrap();
        assert_eq!(s0.scores, vec![1.0, 1.0, 1.0]);
        assert_eq!(s0.dual_objective, 6.0);
        let s1 = solve_rank_scores(&d, 1.0, &tol()).unwrap();
        assert_eq!(s1.scores, vec![0.0, 0.0, 0.0]);
        assert_eq!(s1.dual_objective, 0.0);
    }

    #[test]
    fn location_scores_match_hajek_closed_form() {
        // y = (1, 3, 2) has ranks (1, 3, 2); at level 0.6 the closed form
        // gives (0, 1, 2 - 3·0.6).
        let d = Dataset::location(vec![1.0, 3.0, 2.0]).unwrap();
        let lp = solve_rank_scores(&d, 0.6, &tol()).unwrap();
        let closed = hajek_scores(&ranks_of(d.y()), 0.6).unwrap();
        assert_eq!(lp.scores, closed);
        assert!(closed[0] == 0.0 && closed[1] == 1.0);
        assert!((closed[2] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn hajek_branches() {
        // middle branch: 0.5 < 0.6 <= 0.75
        let s = hajek_scores(&[3], 0.6);
        assert!(matches!(s, Err(Error::NotAPermutation(_))));
        let s = hajek_scores(&[3, 1, 2, 4], 0.6).unwrap();
        assert!((s[0] - (3.0 - 4.0 * 0.6)).abs() < 1e-15);
        // level zero: everything scores one
        let s = hajek_scores(&[2, 1, 3], 0.0).unwrap();
        assert_eq!(s, vec![1.0, 1.0, 1.0]);
        // third branch: rank/n = 0.25 <= 0.5
        let s = hajek_scores(&[1, 2, 3, 4], 0.5).unwrap();
        assert_eq!(s[0], 0.0);
    }

    #[test]
    fn derivative_at_one_location_case() {
        let d = Dataset::location(vec![1.0, 3.0, 2.0]).unwrap();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        let base = extract_base(&f, &d, &tol()).unwrap();
        let (_, w) = aerq_via_weights(&d, &base.indices, &tol()).unwrap();
        let der = derivative_at_one(&d, &w).unwrap();
        assert_eq!(der.base_indices, vec![1]);
        assert!((der.derivative[1] + 3.0).abs() < 1e-12);
        assert_eq!(der.derivative[0], 0.0);
        assert_eq!(der.derivative[2], 0.0);
    }

    #[test]
    fn derivative_at_one_worked_instance() {
        let d = worked_instance();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        let base = extract_base(&f, &d, &tol()).unwrap();
        let (_, w) = aerq_via_weights(&d, &base.indices, &tol()).unwrap();
        let der = derivative_at_one(&d, &w).unwrap();
        // nonzeros -(5/2, 1/2) at the base rows
        assert!(der.derivative[0].abs() < 1e-12);
        assert!((der.derivative[1] + 2.5).abs() < 1e-12);
        assert!((der.derivative[2] + 0.5).abs() < 1e-12);
        let total: f64 = der.derivative.iter().sum();
        assert!((total + 3.0).abs() < 1e-12);
        // Σ x_i â′_i(1) = -Σ x_i: 1·(-5/2) + 3·(-1/2) = -4
        let wx: f64 = (0..3).map(|i| d.row(i)[0] * der.derivative[i]).sum();
        assert!((wx + 4.0).abs() < 1e-12);
    }

    #[test]
    fn score_route_value_at_one_matches_weights() {
        let d = worked_instance();
        let pts = averaged_rq_via_scores(&d, &[1.0], &tol()).unwrap();
        assert!(pts[0].linear);
        assert!((pts[0].value - 17.0 / 6.0).abs() < 1e-8);
    }

    #[test]
    fn location_trajectory_hits_order_statistics() {
        // Inside a rank segment only one score has slope -n, so the
        // finite-difference value is the matching order statistic.
        let d = Dataset::location(vec![1.0, 3.0, 2.0]).unwrap();
        let pts = averaged_rq_via_scores(&d, &[0.5, 0.8], &tol()).unwrap();
        assert!(pts[0].linear);
        assert!((pts[0].value - 2.0).abs() < 1e-8); // second order statistic
        assert!(pts[1].linear);
        assert!((pts[1].value - 3.0).abs() < 1e-8); // maximum
    }

    #[test]
    fn dual_constraints_hold_on_a_grid() {
        let d = worked_instance();
        for k in 1..10 {
            let alpha = k as f64 / 10.0;
            let s = solve_rank_scores(&d, alpha, &tol()).unwrap();
            assert!(dual_constraint_violation(&d, &s) < 1e-9 * (1.0 + d.n() as f64));
            assert!(s.scores.iter().all(|&a| (-1e-12..=1.0 + 1e-12).contains(&a)));
        }
    }

    #[test]
    fn complementarity_with_primal_fit() {
        let d = worked_instance();
        let alpha = 0.75;
        let fit = crate::rq::fit_rq(&d, alpha, &tol()).unwrap();
        let scores = solve_rank_scores(&d, alpha, &tol()).unwrap();
        assert!(complementarity_gap(&d, &fit, &scores) < 1e-8);
    }
}
