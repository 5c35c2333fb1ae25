//! Rank-dispersion R-estimation of the slopes with the extreme score
//! function, and its minimax reformulation.
//!
//! With scores that put all weight on the top-ranked residual, the Jaeckel
//! dispersion collapses to `D_n(b) = max_i{y_i − (x_i − x̄)ᵀb} − ȳ`: a
//! continuous, convex, piecewise-linear function of the slopes. Its
//! minimizer is the one-sided Chebyshev slope; adding the intercept
//! `max_i{y_i − x_iᵀb}` reproduces the extreme regression quantile, and the
//! minimax value itself is the averaged extreme quantile.

use crate::data::Dataset;
use crate::linalg::dot;
use crate::rankscores::ranks_of;
use crate::simplex::{solve_lp, LpProblem, LpStatus, Sense};
use crate::tol::Tolerances;
use crate::{Error, Result};

/// A fitted extreme R-estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct RFit {
    /// Slope estimate (the intercept is not identified by ranks).
    pub slopes: Vec<f64>,
    /// Intercept completing the extreme quantile: `max_i{y_i − x_iᵀb}`.
    pub intercept: f64,
    /// `max_i{y_i − (x_i − x̄)ᵀb}` at the optimum; equals the AERQ.
    pub minimax_value: f64,
    /// Dispersion at the optimum, `minimax_value − ȳ`.
    pub dispersion_at_opt: f64,
}

/// Dispersion evaluated through the raw rank-score definition.
#[derive(Debug, Clone, PartialEq)]
pub struct RankFormDispersion {
    pub value: f64,
    /// The maximal residual is attained more than once; the score function
    /// is discontinuous at the top rank, so cross-checks should skip.
    pub top_tie: bool,
}

/// `D_n(b) = max_i{y_i − (x_i − x̄)ᵀb} − ȳ`.
pub fn dispersion(data: &Dataset, b: &[f64]) -> f64 {
    max_centered_residual(data, b) - data.mean_y()
}

/// `max_i{y_i − (x_i − x̄)ᵀb}`, the quantity the R-estimator minimizes.
pub fn max_centered_residual(data: &Dataset, b: &[f64]) -> f64 {
    assert_eq!(b.len(), data.p(), "slope vector must have length p");
    let means = data.x_means();
    (0..data.n())
        .map(|i| {
            let perturbation: f64 = data
                .row(i)
                .iter()
                .zip(&means)
                .zip(b)
                .map(|((x, m), bj)| (x - m) * bj)
                .sum();
            data.y()[i] - perturbation
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The same dispersion through the rank-weighted sum with the extreme score
/// function: residuals ranked, the top rank weighted `1 − 1/n`, the rest
/// `−1/n`. Agrees with [`dispersion`] identically when the top residual is
/// unique.
pub fn dispersion_rank_form(data: &Dataset, b: &[f64]) -> RankFormDispersion {
    assert_eq!(b.len(), data.p(), "slope vector must have length p");
    let n = data.n();
    let residuals: Vec<f64> = (0..n)
        .map(|i| data.y()[i] - dot(data.row(i), b))
        .collect();
    let ranks = ranks_of(&residuals);
    let top = residuals
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let top_tie = residuals.iter().filter(|&&r| r == top).count() > 1;
    let value = residuals
        .iter()
        .zip(&ranks)
        .map(|(&r, &rank)| {
            let score = if rank == n { 1.0 } else { 0.0 } - 1.0 / n as f64;
            r * score
        })
        .sum();
    RankFormDispersion { value, top_tie }
}

/// Minimizes the dispersion over slopes by solving the minimax program
/// `min t` s.t. `t + (x_i − x̄)ᵀb ≥ y_i`, then completes the intercept.
pub fn fit_r_estimator(data: &Dataset, tol: &Tolerances) -> Result<RFit> {
    let p = data.p();
    if p == 0 {
        return Err(Error::InvalidInput(
            "the R-estimator fits slopes; location-case data has none".into(),
        ));
    }
    let means = data.x_means();
    // variables: t, then the p slopes, all free
    let mut objective = vec![0.0; p + 1];
    objective[0] = 1.0;
    let mut lp = LpProblem::minimize(objective);
    for i in 0..data.n() {
        let mut row = vec![0.0; p + 1];
        row[0] = 1.0;
        for j in 0..p {
            row[j + 1] = data.row(i)[j] - means[j];
        }
        lp.constraint(row, Sense::Ge, data.y()[i]);
    }
    let sol = solve_lp(&lp, tol)?;
    if sol.status != LpStatus::Optimal {
        // centered regressors sum to zero, so no direction improves forever
        return Err(Error::Internal(format!(
            "minimax program returned {:?}",
            sol.status
        )));
    }
    let slopes = sol.x[1..].to_vec();
    let minimax_value = sol.x[0];
    let intercept = (0..data.n())
        .map(|i| data.y()[i] - dot(data.row(i), &slopes))
        .fold(f64::NEG_INFINITY, f64::max);

    let recomposed = intercept + dot(&means, &slopes);
    if (recomposed - minimax_value).abs() > tol.feas(1.0 + minimax_value.abs()) {
        return Err(Error::Internal(format!(
            "intercept decomposition drifted: {} vs {}",
            recomposed, minimax_value
        )));
    }
    Ok(RFit {
        slopes,
        intercept,
        minimax_value,
        dispersion_at_opt: minimax_value - data.mean_y(),
    })
}

/// Stacks intercept over slopes into the extended coefficient vector, which
/// is feasible for the extreme-quantile program and attains the same AERQ.
pub fn assemble_extended(fit: &RFit) -> Vec<f64> {
    let mut v = Vec::with_capacity(fit.slopes.len() + 1);
    v.push(fit.intercept);
    v.extend_from_slice(&fit.slopes);
    v
}
