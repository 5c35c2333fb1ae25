//! Regression quantiles, the extreme regression quantile, and the averaged
//! extreme regression quantile (AERQ), computed by three provably equivalent
//! routes and cross-checked against each other.
//!
//! For a linear model `Y_i = β0 + x_iᵀβ + e_i` the extreme regression
//! quantile is the lowest hyperplane lying weakly above every observation.
//! Averaging the fitted hyperplane over the observed regressors gives a
//! single scalar, `B_n(1)`, which this crate computes three ways:
//!
//! * **Primal route** — solve the linear program behind the extreme fit and
//!   average the fitted values ([`rq::fit_extreme_rq`], [`averaged::averaged_rq`]).
//! * **Weights route** — the optimal base of that program picks out `p + 1`
//!   observations whose responses carry explicit positive weights summing to
//!   one ([`averaged::aerq_via_weights`]).
//! * **Minimax route** — a rank-dispersion R-estimator of the slopes turns
//!   the same quantity into the smallest achievable maximal centered
//!   residual ([`restimator::fit_r_estimator`], [`averaged::aerq_via_restimator`]).
//!
//! The dual side of the theory (regression rank scores and their derivative
//! at the top quantile level) lives in [`rankscores`], and
//! [`averaged::verify_identities`] runs every route on one dataset and
//! reports the discrepancies. `mean(Y) - B_n(1)` is the expected conditional
//! shortfall of the responses under the extreme fit; it is non-positive by
//! construction.
//!
//! ```
//! use aerq::{Dataset, Tolerances};
//!
//! let data = Dataset::new(vec![1.0, 3.0, 2.0], &[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
//! let report = aerq::verify_identities(&data, &Tolerances::default()).unwrap();
//! assert!((report.b_primal - 17.0 / 6.0).abs() < 1e-10);
//! assert_eq!(report.verdict, aerq::Verdict::Pass);
//! ```

pub mod averaged;
pub mod data;
pub mod io;
pub mod linalg;
pub mod rankscores;
pub mod restimator;
pub mod rq;
pub mod sim;
pub mod simplex;
pub mod tol;

mod error;

pub use averaged::{
    aerq_via_restimator, aerq_via_weights, averaged_rq, shortfall, shortfall_residual_form,
    verify_identities, AerqReport, Discrepancies, Verdict,
};
pub use data::{validate_dataset, BaseWeights, Dataset, QuantileFit};
pub use error::{Error, Result};
pub use linalg::{solve_square_system, LinearSolveResult};
pub use rankscores::{
    averaged_rq_via_scores, derivative_at_one, hajek_scores, solve_rank_scores, RankScoreSolution,
    ScoreDerivativeAtOne,
};
pub use restimator::{dispersion, fit_r_estimator, RFit};
pub use rq::{fit_extreme_rq, fit_rq, ExtremeFit};
pub use simplex::{certify_solution, solve_lp, LpProblem, LpSolution, LpStatus};
pub use tol::Tolerances;
