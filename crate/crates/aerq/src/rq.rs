//! Primal regression-quantile fitting.
//!
//! The level-`alpha` fit minimizes the asymmetric check loss
//! `Σ α(y_i − x*ᵢᵀb)⁺ + (1−α)(y_i − x*ᵢᵀb)⁻`. At `alpha = 1` the same
//! minimizer solves a cleaner program: minimize `Σ x*ᵢᵀb` subject to
//! `y_i ≤ x*ᵢᵀb` — the lowest hyperplane weakly above all observations.
//! That program's objective is what this module reports for the extreme
//! fit; its `p + 1` active constraints are the optimal-base candidates.

use crate::data::{Dataset, QuantileFit};
use crate::linalg::{self, dot};
use crate::simplex::{solve_lp, LpProblem, LpStatus, Sense};
use crate::tol::Tolerances;
use crate::{Error, Result};

/// An extreme (level-1) regression quantile fit together with the active
/// constraints that nominate the optimal base.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeFit {
    /// The fitted quantile, `alpha = 1`.
    pub fit: QuantileFit,
    /// Active-set indices (0-based, sorted); equal to `fit.active_set`.
    pub base_candidates: Vec<usize>,
}

/// Indices extracted from a non-degenerate extreme fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedBase {
    /// 0-based, sorted ascending; the rows form an invertible submatrix.
    pub indices: Vec<usize>,
    /// True when every observation is active (`n = p + 1` interpolation).
    pub complete: bool,
}

/// Fits the extreme regression quantile by linear programming.
///
/// The program is never unbounded (the objective is the sum of constrained
/// quantities) and never infeasible (raise the intercept), so any other
/// solver status is an internal error.
pub fn fit_extreme_rq(data: &Dataset, tol: &Tolerances) -> Result<ExtremeFit> {
    let p1 = data.p() + 1;
    let mut lp = LpProblem::minimize(data.design_col_sums());
    for i in 0..data.n() {
        lp.constraint(data.design_row(i), Sense::Ge, data.y()[i]);
    }
    let sol = solve_lp(&lp, tol)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Internal(format!(
            "extreme-quantile program returned {:?}",
            sol.status
        )));
    }

    let coef = sol.x;
    let fitted: Vec<f64> = (0..data.n())
        .map(|i| dot(&data.design_row(i), &coef))
        .collect();
    let residuals: Vec<f64> = data.y().iter().zip(&fitted).map(|(y, f)| y - f).collect();

    let y_scale = data.y().iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    let worst = residuals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if worst > tol.abs * (1.0 + y_scale) {
        return Err(Error::Internal(format!(
            "extreme fit leaves a positive residual {}",
            worst
        )));
    }

    let active_set = active_indices(data, &residuals, tol);
    let degenerate = is_degenerate(data, &active_set, tol);
    let fit = QuantileFit {
        alpha: 1.0,
        intercept: coef[0],
        slopes: coef[1..p1].to_vec(),
        objective: sol.objective,
        active_set: active_set.clone(),
        degenerate,
        fitted,
        residuals,
    };
    Ok(ExtremeFit {
        fit,
        base_candidates: active_set,
    })
}

/// Fits the regression quantile at an interior level `0 < alpha < 1` and
/// certifies optimality through the subgradient condition.
pub fn fit_rq(data: &Dataset, alpha: f64, tol: &Tolerances) -> Result<QuantileFit> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha {
            alpha,
            range: "(0, 1)",
        });
    }
    let n = data.n();
    let p1 = data.p() + 1;

    // Variables: coefficients (free), then positive/negative residual parts.
    let mut objective = vec![0.0; p1];
    objective.extend(std::iter::repeat(alpha).take(n));
    objective.extend(std::iter::repeat(1.0 - alpha).take(n));
    let mut lp = LpProblem::minimize(objective);
    for j in 0..n {
        lp.set_bounds(p1 + j, 0.0, f64::INFINITY);
        lp.set_bounds(p1 + n + j, 0.0, f64::INFINITY);
    }
    for i in 0..n {
        let mut row = vec![0.0; p1 + 2 * n];
        row[..p1].copy_from_slice(&data.design_row(i));
        row[p1 + i] = 1.0;
        row[p1 + n + i] = -1.0;
        lp.constraint(row, Sense::Eq, data.y()[i]);
    }
    let sol = solve_lp(&lp, tol)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Internal(format!(
            "quantile program at alpha = {} returned {:?}",
            alpha, sol.status
        )));
    }

    let coef = sol.x[..p1].to_vec();
    let fitted: Vec<f64> = (0..n).map(|i| dot(&data.design_row(i), &coef)).collect();
    let residuals: Vec<f64> = data.y().iter().zip(&fitted).map(|(y, f)| y - f).collect();

    let y_scale = data.y().iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    let slack = min_directional_derivative(data, alpha, &coef, tol);
    if slack < -1e-8 * (1.0 + y_scale) {
        return Err(Error::Internal(format!(
            "subgradient certification failed at alpha = {}: descent rate {}",
            alpha, slack
        )));
    }

    let active_set = active_indices(data, &residuals, tol);
    let degenerate = is_degenerate(data, &active_set, tol);
    Ok(QuantileFit {
        alpha,
        intercept: coef[0],
        slopes: coef[1..].to_vec(),
        objective: sol.objective,
        active_set,
        degenerate,
        fitted,
        residuals,
    })
}

/// Returns the `p + 1` active indices of a non-degenerate extreme fit,
/// checking that the corresponding design rows are invertible.
pub fn extract_base(fit: &ExtremeFit, data: &Dataset, tol: &Tolerances) -> Result<ExtractedBase> {
    let p1 = data.p() + 1;
    let indices = &fit.fit.active_set;
    if indices.len() != p1 {
        return Err(Error::Degenerate(format!(
            "active set has {} observations, expected {}",
            indices.len(),
            p1
        )));
    }
    let rows: Vec<Vec<f64>> = indices.iter().map(|&i| data.design_row(i)).collect();
    if linalg::rank(&rows, tol.rank_pivot_ratio) < p1 {
        return Err(Error::SingularBase);
    }
    Ok(ExtractedBase {
        indices: indices.clone(),
        complete: indices.len() == data.n(),
    })
}

/// The check loss `α z⁺ + (1−α) z⁻`.
pub fn check_loss(alpha: f64, z: f64) -> f64 {
    alpha * z.max(0.0) + (1.0 - alpha) * (-z).max(0.0)
}

/// Check-loss objective at an arbitrary coefficient vector.
pub fn objective_value(data: &Dataset, alpha: f64, coef: &[f64]) -> f64 {
    (0..data.n())
        .map(|i| check_loss(alpha, data.y()[i] - dot(&data.design_row(i), coef)))
        .sum()
}

/// Smallest one-sided directional derivative of the check-loss objective
/// along `±e_j` over all coordinates. Non-negative (up to tolerance) at an
/// optimum.
pub fn min_directional_derivative(
    data: &Dataset,
    alpha: f64,
    coef: &[f64],
    tol: &Tolerances,
) -> f64 {
    let p1 = data.p() + 1;
    let mut worst = f64::INFINITY;
    for j in 0..p1 {
        for sign in [1.0, -1.0] {
            let mut rate = 0.0;
            for i in 0..data.n() {
                let row = data.design_row(i);
                let r = data.y()[i] - dot(&row, coef);
                let w = sign * row[j];
                let zero_band = tol.active_set * (1.0 + data.y()[i].abs());
                rate += if r > zero_band {
                    -alpha * w
                } else if r < -zero_band {
                    (1.0 - alpha) * w
                } else {
                    ((1.0 - alpha) * w).max(-alpha * w)
                };
            }
            worst = worst.min(rate);
        }
    }
    worst
}

fn active_indices(data: &Dataset, residuals: &[f64], tol: &Tolerances) -> Vec<usize> {
    residuals
        .iter()
        .enumerate()
        .filter(|(i, r)| r.abs() <= tol.active_set * (1.0 + data.y()[*i].abs()))
        .map(|(i, _)| i)
        .collect()
}

fn is_degenerate(data: &Dataset, active: &[usize], tol: &Tolerances) -> bool {
    let p1 = data.p() + 1;
    if active.len() != p1 {
        return true;
    }
    let rows: Vec<Vec<f64>> = active.iter().map(|&i| data.design_row(i)).collect();
    linalg::rank(&rows, tol.rank_pivot_ratio) < p1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn worked_instance() -> Dataset {
        Dataset::new(vec![1.0, 3.0, 2.0], &[vec![0.0], vec![1.0], vec![3.0]]).unwrap()
    }

    #[test]
    fn extreme_fit_on_worked_instance() {
        let d = worked_instance();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        assert!((f.fit.intercept - 3.5).abs() < 1e-10);
        assert!((f.fit.slopes[0] + 0.5).abs() < 1e-10);
        assert!((f.fit.objective - 8.5).abs() < 1e-10);
        assert_eq!(f.fit.active_set, vec![1, 2]);
        assert!(!f.fit.degenerate);
        // residuals (-2.5, 0, 0)
        assert!((f.fit.residuals[0] + 2.5).abs() < 1e-10);
        assert!(f.fit.residuals[1].abs() < 1e-10);
        assert!(f.fit.residuals[2].abs() < 1e-10);
    }

    #[test]
    fn extreme_fit_location_case_is_the_maximum() {
        let d = Dataset::location(vec![1.0, 3.0, 2.0]).unwrap();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        assert!((f.fit.intercept - 3.0).abs() < 1e-12);
        assert!(f.fit.slopes.is_empty());
        assert_eq!(f.fit.active_set, vec![1]);
    }

    #[test]
    fn square_case_interpolates() {
        let d = Dataset::interpolating(vec![0.0, 1.0], &[vec![0.0], vec![1.0]]).unwrap();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        assert!(f.fit.intercept.abs() < 1e-12);
        assert!((f.fit.slopes[0] - 1.0).abs() < 1e-12);
        assert!(f.fit.residuals.iter().all(|r| r.abs() < 1e-12));
        let base = extract_base(&f, &d, &tol()).unwrap();
        assert_eq!(base.indices, vec![0, 1]);
        assert!(base.complete);
    }

    #[test]
    fn extract_base_on_worked_instance() {
        let d = worked_instance();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        let base = extract_base(&f, &d, &tol()).unwrap();
        assert_eq!(base.indices, vec![1, 2]);
        assert!(!base.complete);
    }

    #[test]
    fn duplicated_rows_force_degeneracy() {
        let d = Dataset::new(
            vec![1.0, 2.0, 1.0, 2.0],
            &[vec![0.0], vec![1.0], vec![0.0], vec![1.0]],
        )
        .unwrap();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        assert_eq!(f.fit.active_set.len(), 4);
        assert!(f.fit.degenerate);
        assert!(matches!(
            extract_base(&f, &d, &tol()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn median_of_location_sample() {
        let d = Dataset::location(vec![1.0, 2.0, 9.0]).unwrap();
        let f = fit_rq(&d, 0.5, &tol()).unwrap();
        assert!((f.intercept - 2.0).abs() < 1e-10);
    }

    #[test]
    fn interior_fit_beats_a_grid_around_it() {
        let d = worked_instance();
        let f = fit_rq(&d, 0.9, &tol()).unwrap();
        let at_fit = objective_value(&d, 0.9, &f.coefficients());
        assert!((at_fit - f.objective).abs() < 1e-10);
        for di in -5..=5 {
            for dj in -5..=5 {
                let coef = vec![
                    f.intercept + di as f64 * 0.01,
                    f.slopes[0] + dj as f64 * 0.01,
                ];
                assert!(objective_value(&d, 0.9, &coef) >= at_fit - 1e-10);
            }
        }
    }

    #[test]
    fn near_one_objective_approaches_extreme_fit() {
        let d = worked_instance();
        let alpha = 1.0 - 1.0 / (2.0 * d.n() as f64);
        let interior = fit_rq(&d, alpha, &tol()).unwrap();
        let extreme = fit_extreme_rq(&d, &tol()).unwrap();
        let neg_sum: f64 = extreme.fit.residuals.iter().map(|r| (-r).max(0.0)).sum();
        let bound = (1.0 - alpha) * neg_sum + 1e-10;
        assert!(
            interior.objective <= bound,
            "objective {} exceeds step bound {}",
            interior.objective,
            bound
        );
    }

    #[test]
    fn alpha_must_be_interior() {
        let d = worked_instance();
        assert!(matches!(
            fit_rq(&d, 0.0, &tol()),
            Err(Error::InvalidAlpha { .. })
        ));
        assert!(matches!(
            fit_rq(&d, 1.0, &tol()),
            Err(Error::InvalidAlpha { .. })
        ));
    }
}
