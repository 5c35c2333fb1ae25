//! The averaged regression quantile `B_n(α) = x̄*ᵀβ̂*(α)` and, at level one,
//! its three equivalent computations with a cross-route verdict.
//!
//! `B_n(1)` is a single scalar with three faces: the regressor-averaged
//! extreme fit, a positively-weighted mean of the `p + 1` base responses,
//! and the minimax value of the centered-residual program. The routes agree
//! to solver precision on non-degenerate data, sit between `mean(y)` and
//! `max(y)`, and their gap to the mean is exactly the (non-positive)
//! expected conditional shortfall. [`verify_identities`] computes all of it
//! and renders a machine-readable report.

use serde::Serialize;

use crate::data::{BaseWeights, Dataset, QuantileFit};
use crate::linalg::{dot, solve_square_system_with, transpose, LinearSolveResult};
use crate::rankscores::derivative_at_one;
use crate::restimator::fit_r_estimator;
use crate::rq::{extract_base, fit_extreme_rq, ExtremeFit};
use crate::tol::Tolerances;
use crate::{Error, Result};

/// `x̄*ᵀβ̂*(α)`: the fitted hyperplane averaged over the observed regressors.
pub fn averaged_rq(fit: &QuantileFit, data: &Dataset) -> f64 {
    fit.intercept + dot(&data.x_means(), &fit.slopes)
}

/// The weights route: `w = n⁻¹·1ᵀX*(X*_{n1})⁻¹` over the base rows, and
/// `B = Σ w_k y_{i_k}`. The weights are validated to sum to one; positivity
/// is the caller's degeneracy signal, not an error.
pub fn aerq_via_weights(
    data: &Dataset,
    base_indices: &[usize],
    tol: &Tolerances,
) -> Result<(f64, BaseWeights)> {
    let p1 = data.p() + 1;
    if base_indices.len() != p1 {
        return Err(Error::Degenerate(format!(
            "base has {} indices, expected {}",
            base_indices.len(),
            p1
        )));
    }
    let base_matrix: Vec<Vec<f64>> = base_indices.iter().map(|&i| data.design_row(i)).collect();
    let at = transpose(&base_matrix);
    let rhs: Vec<f64> = data
        .design_col_sums()
        .iter()
        .map(|s| s / data.n() as f64)
        .collect();
    let weights = match solve_square_system_with(&at, &rhs, tol.rank_pivot_ratio) {
        LinearSolveResult::Solution(w) => w,
        LinearSolveResult::Singular { .. } => return Err(Error::SingularBase),
    };
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::Internal(format!(
            "base weights sum to {}, expected 1",
            sum
        )));
    }
    let value = base_indices
        .iter()
        .zip(&weights)
        .map(|(&i, w)| w * data.y()[i])
        .sum();
    Ok((
        value,
        BaseWeights {
            indices: base_indices.to_vec(),
            weights,
            base_matrix,
        },
    ))
}

/// The minimax route: `max_i{y_i − (x_i − x̄)ᵀβ̃}` at the fitted R-estimator
/// slope. In the location case there is no slope to fit and the value is
/// `max(y)` directly.
pub fn aerq_via_restimator(data: &Dataset, tol: &Tolerances) -> Result<f64> {
    if data.p() == 0 {
        return Ok(data.max_y());
    }
    Ok(fit_r_estimator(data, tol)?.minimax_value)
}

/// Expected conditional shortfall `mean(y) − B_n(1) ≤ 0`.
pub fn shortfall(data: &Dataset, extreme: &ExtremeFit) -> f64 {
    data.mean_y() - averaged_rq(&extreme.fit, data)
}

/// The same shortfall through the residuals: `−(1/n)Σ(y_i − x*ᵢᵀβ̂*(1))⁻`.
pub fn shortfall_residual_form(extreme: &ExtremeFit) -> f64 {
    let n = extreme.fit.residuals.len() as f64;
    -extreme
        .fit
        .residuals
        .iter()
        .map(|r| (-r).max(0.0))
        .sum::<f64>()
        / n
}

/// Cross-route verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "skipped-degenerate")]
    SkippedDegenerate,
}

/// Pairwise absolute gaps between the routes.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Discrepancies {
    pub primal_weights: Option<f64>,
    pub primal_restimator: f64,
    pub weights_restimator: Option<f64>,
    pub primal_scores: Option<f64>,
}

/// Everything [`verify_identities`] establishes about one dataset.
#[derive(Debug, Clone, Serialize)]
pub struct AerqReport {
    pub b_primal: f64,
    pub b_weights: Option<f64>,
    pub b_restimator: f64,
    /// `−(1/n) Σ y_i â′_i(1)`, the score-route value.
    pub b_scores: Option<f64>,
    pub weights: Option<Vec<f64>>,
    /// 1-based observation indices of the optimal base.
    pub base_indices: Option<Vec<usize>>,
    pub shortfall: f64,
    pub mean_y: f64,
    pub max_y: f64,
    pub discrepancies: Discrepancies,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl AerqReport {
    /// Stable single-line JSON rendering (field order fixed by the struct).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// Runs every route on one dataset: the primal extreme fit, the base
/// weights, the score derivative, the R-estimator, and the shortfall.
/// Degenerate instances (ties, too many active constraints, nonpositive
/// weights) get a `skipped-degenerate` verdict instead of failing.
pub fn verify_identities(data: &Dataset, tol: &Tolerances) -> Result<AerqReport> {
    let extreme = fit_extreme_rq(data, tol)?;
    let b_primal = averaged_rq(&extreme.fit, data);
    let mean_y = data.mean_y();
    let max_y = data.max_y();
    let sf = shortfall(data, &extreme);
    let sf_residual = shortfall_residual_form(&extreme);

    let mut notes = Vec::new();
    let mut degenerate = false;

    let b_restimator = aerq_via_restimator(data, tol)?;

    let mut b_weights = None;
    let mut b_scores = None;
    let mut weights_out = None;
    let mut base_indices = None;

    match extract_base(&extreme, data, tol) {
        Ok(base) => {
            let (bw, weights) = aerq_via_weights(data, &base.indices, tol)?;
            if !weights.all_positive(tol.abs) {
                degenerate = true;
                notes.push(format!(
                    "nonpositive base weight (min {:e})",
                    weights
                        .weights
                        .iter()
                        .cloned()
                        .fold(f64::INFINITY, f64::min)
                ));
            }
            if base.complete {
                notes.push("complete interpolation: every observation is in the base".into());
            }
            let der = derivative_at_one(data, &weights)?;
            let bs = -dot(data.y(), &der.derivative) / data.n() as f64;
            b_weights = Some(bw);
            b_scores = Some(bs);
            base_indices = Some(base.indices.iter().map(|i| i + 1).collect());
            weights_out = Some(weights.weights);
        }
        Err(Error::Degenerate(msg)) => {
            degenerate = true;
            notes.push(format!("base extraction skipped: {}", msg));
        }
        Err(Error::SingularBase) => {
            degenerate = true;
            notes.push("base extraction skipped: singular base submatrix".into());
        }
        Err(e) => return Err(e),
    }
    if extreme.fit.degenerate && !degenerate {
        degenerate = true;
        notes.push("extreme fit flagged degenerate".into());
    }

    let discrepancies = Discrepancies {
        primal_weights: b_weights.map(|b| (b_primal - b).abs()),
        primal_restimator: (b_primal - b_restimator).abs(),
        weights_restimator: b_weights.map(|b| (b - b_restimator).abs()),
        primal_scores: b_scores.map(|b| (b_primal - b).abs()),
    };

    let verdict = if degenerate {
        Verdict::SkippedDegenerate
    } else {
        let gap_ok = |g: Option<f64>| g.map_or(true, |g| g <= tol.route_equality * (1.0 + b_primal.abs()));
        let mut ok = gap_ok(discrepancies.primal_weights)
            && discrepancies.primal_restimator <= tol.route_equality * (1.0 + b_primal.abs())
            && gap_ok(discrepancies.weights_restimator)
            && gap_ok(discrepancies.primal_scores);
        if b_primal < mean_y - 1e-10 * (1.0 + mean_y.abs()) {
            ok = false;
            notes.push(format!("ordering violated: B = {} below mean {}", b_primal, mean_y));
        }
        if b_primal > max_y + tol.feas(1.0 + max_y.abs()) {
            ok = false;
            notes.push(format!("ordering violated: B = {} above max {}", b_primal, max_y));
        }
        if data.p() >= 1 && !(b_primal < max_y) {
            ok = false;
            notes.push("strict ordering B < max(y) failed on a regression instance".into());
        }
        if sf > tol.feas(1.0 + mean_y.abs()) {
            ok = false;
            notes.push(format!("positive shortfall {}", sf));
        }
        if (sf - sf_residual).abs() > tol.feas(1.0 + sf.abs()) {
            ok = false;
            notes.push(format!(
                "shortfall forms disagree: {} vs {}",
                sf, sf_residual
            ));
        }
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    };

    Ok(AerqReport {
        b_primal,
        b_weights,
        b_restimator,
        b_scores,
        weights: weights_out,
        base_indices,
        shortfall: sf,
        mean_y,
        max_y,
        discrepancies,
        verdict,
        notes,
    })
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
    fn averaged_value_on_worked_instance() {
        let d = worked_instance();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        // 3.5 + (4/3)(-0.5) = 17/6
        assert!((averaged_rq(&f.fit, &d) - 17.0 / 6.0).abs() < 1e-10);
    }

    #[test]
    fn averaged_value_in_location_case_is_the_intercept() {
        let d = Dataset::location(vec![1.0, 3.0, 2.0]).unwrap();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        assert_eq!(averaged_rq(&f.fit, &d), f.fit.intercept);
    }

    #[test]
    fn averaged_value_is_equivariant() {
        let d = worked_instance();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        let b0 = averaged_rq(&f.fit, &d);
        let gamma = [2.0, -1.5];
        let shifted_y: Vec<f64> = (0..d.n())
            .map(|i| d.y()[i] + dot(&d.design_row(i), &gamma))
            .collect();
        let d2 = Dataset::new(shifted_y, &d.x_rows()).unwrap();
        let f2 = fit_extreme_rq(&d2, &tol()).unwrap();
        let expected = b0 + dot(&d.design_mean(), &gamma);
        assert!((averaged_rq(&f2.fit, &d2) - expected).abs() < 1e-9);
    }

    #[test]
    fn weights_route_on_worked_instance() {
        let d = worked_instance();
        let (b, w) = aerq_via_weights(&d, &[1, 2], &tol()).unwrap();
        assert!((w.weights[0] - 5.0 / 6.0).abs() < 1e-12);
        assert!((w.weights[1] - 1.0 / 6.0).abs() < 1e-12);
        assert!((b - 17.0 / 6.0).abs() < 1e-12);
        assert!((w.weight_sum() - 1.0).abs() < 1e-12);
        assert!(w.all_positive(1e-12));
    }

    #[test]
    fn weights_route_location_case() {
        let d = Dataset::location(vec![1.0, 3.0, 2.0]).unwrap();
        let (b, w) = aerq_via_weights(&d, &[1], &tol()).unwrap();
        assert_eq!(w.weights, vec![1.0]);
        assert_eq!(b, 3.0);
    }

    #[test]
    fn restimator_route_values() {
        let d = worked_instance();
        assert!((aerq_via_restimator(&d, &tol()).unwrap() - 17.0 / 6.0).abs() < 1e-10);
        let loc = Dataset::location(vec![1.0, 3.0, 2.0]).unwrap();
        assert_eq!(aerq_via_restimator(&loc, &tol()).unwrap(), 3.0);
    }

    #[test]
    fn shortfall_both_forms() {
        let d = worked_instance();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        assert!((shortfall(&d, &f) + 5.0 / 6.0).abs() < 1e-10);
        assert!((shortfall_residual_form(&f) + 5.0 / 6.0).abs() < 1e-10);

        let loc = Dataset::location(vec![1.0, 3.0, 2.0]).unwrap();
        let g = fit_extreme_rq(&loc, &tol()).unwrap();
        assert!((shortfall(&loc, &g) + 1.0).abs() < 1e-12);
        assert!((shortfall_residual_form(&g) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn shortfall_vanishes_under_interpolation() {
        let d = Dataset::interpolating(vec![0.0, 1.0], &[vec![0.0], vec![1.0]]).unwrap();
        let f = fit_extreme_rq(&d, &tol()).unwrap();
        assert!(shortfall(&d, &f).abs() < 1e-12);
    }

    #[test]
    fn verify_passes_on_worked_instance() {
        let d = worked_instance();
        let r = verify_identities(&d, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "notes: {:?}", r.notes);
        assert!((r.b_primal - 17.0 / 6.0).abs() < 1e-10);
        assert!((r.b_weights.unwrap() - 17.0 / 6.0).abs() < 1e-10);
        assert!((r.b_restimator - 17.0 / 6.0).abs() < 1e-10);
        assert!((r.b_scores.unwrap() - 17.0 / 6.0).abs() < 1e-10);
        assert_eq!(r.base_indices.as_deref(), Some(&[2, 3][..]));
        assert!((r.shortfall + 5.0 / 6.0).abs() < 1e-10);
    }

    #[test]
    fn verify_passes_in_location_case() {
        let d = Dataset::location(vec![1.0, 3.0, 2.0]).unwrap();
        let r = verify_identities(&d, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "notes: {:?}", r.notes);
        assert_eq!(r.b_primal, 3.0);
        assert_eq!(r.b_restimator, 3.0);
    }

    #[test]
    fn verify_skips_constructed_degeneracy() {
        let d = Dataset::new(
            vec![1.0, 2.0, 1.0, 2.0],
            &[vec![0.0], vec![1.0], vec![0.0], vec![1.0]],
        )
        .unwrap();
        let r = verify_identities(&d, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::SkippedDegenerate);
        assert!(!r.notes.is_empty());
        assert!(r.b_weights.is_none());
    }

    #[test]
    fn report_json_schema_is_stable() {
        let d = worked_instance();
        let r = verify_identities(&d, &tol()).unwrap();
        let json = r.to_json();
        for key in [
            "b_primal",
            "b_weights",
            "b_restimator",
            "b_scores",
            "weights",
            "base_indices",
            "shortfall",
            "mean_y",
            "max_y",
            "discrepancies",
            "verdict",
            "notes",
        ] {
            assert!(json.contains(&format!("\"{}\"", key)), "missing key {key}");
        }
        assert!(json.contains("\"verdict\":\"pass\""));
    }
}
