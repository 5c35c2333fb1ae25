//! Domain data model: validated datasets and fitted-quantile records.

use crate::linalg;
use crate::tol::Tolerances;
use crate::{Error, Result};

/// A validated regression dataset: responses `y` and an `n × p` regressor
/// matrix. The intercept-augmented design `X* = [1 | x]` must have full
/// column rank `p + 1`. The location case `p = 0` is first-class.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    y: Vec<f64>,
    /// Row-major `n × p` regressors.
    x: Vec<f64>,
    n: usize,
    p: usize,
}

impl Dataset {
    /// Builds and validates a dataset; requires `n ≥ p + 2` so that the
    /// ordering `mean(y) ≤ B_n(1) < max(y)` is nontrivial.
    pub fn new(y: Vec<f64>, x_rows: &[Vec<f64>]) -> Result<Self> {
        Self::build(y, x_rows, false)
    }

    /// Location-case dataset (`p = 0`).
    pub fn location(y: Vec<f64>) -> Result<Self> {
        let rows: Vec<Vec<f64>> = y.iter().map(|_| Vec::new()).collect();
        Self::build(y, &rows, false)
    }

    /// Degenerate-mode constructor allowing `n = p + 1` (the exact
    /// interpolation case); everything else is validated as in [`Dataset::new`].
    pub fn interpolating(y: Vec<f64>, x_rows: &[Vec<f64>]) -> Result<Self> {
        Self::build(y, x_rows, true)
    }

    fn build(y: Vec<f64>, x_rows: &[Vec<f64>], allow_square: bool) -> Result<Self> {
        let n = y.len();
        if x_rows.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} responses but {} regressor rows",
                n,
                x_rows.len()
            )));
        }
        let p = x_rows.first().map_or(0, |r| r.len());
        for (i, row) in x_rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} regressors, expected {}",
                    i + 1,
                    row.len(),
                    p
                )));
            }
        }
        let min = if allow_square { p + 1 } else { p + 2 };
        if n < min {
            return Err(Error::TooFewObservations { n, min });
        }
        for (i, v) in y.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("y[{}] = {}", i + 1, v)));
            }
        }
        for (i, row) in x_rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("x[{},{}] = {}", i + 1, j + 1, v)));
                }
            }
        }
        let design: Vec<Vec<f64>> = x_rows
            .iter()
            .map(|row| {
                let mut r = Vec::with_capacity(p + 1);
                r.push(1.0);
                r.extend_from_slice(row);
                r
            })
            .collect();
        let rank = linalg::rank(&design, Tolerances::default().rank_pivot_ratio);
        if rank < p + 1 {
            return Err(Error::RankDeficient {
                rank,
                expected: p + 1,
            });
        }
        let mut x = Vec::with_capacity(n * p);
        for row in x_rows {
            x.extend_from_slice(row);
        }
        Ok(Dataset { y, x, n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Regressor row `i` (without the intercept).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    /// Regressor rows as owned vectors.
    pub fn x_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Intercept-augmented row `x*_i = (1, x_i)`.
    pub fn design_row(&self, i: usize) -> Vec<f64> {
        let mut r = Vec::with_capacity(self.p + 1);
        r.push(1.0);
        r.extend_from_slice(self.row(i));
        r
    }

    /// All intercept-augmented rows of `X*`.
    pub fn design_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.design_row(i)).collect()
    }

    pub fn mean_y(&self) -> f64 {
        self.y.iter().sum::<f64>() / self.n as f64
    }

    pub fn max_y(&self) -> f64 {
        self.y.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Column means of the regressors, `x̄`.
    pub fn x_means(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.p];
        for i in 0..self.n {
            for (j, v) in self.row(i).iter().enumerate() {
                m[j] += v;
            }
        }
        for v in &mut m {
            *v /= self.n as f64;
        }
        m
    }

    /// Column sums of the augmented design, `1ᵀX* = (n, Σx_i1, …, Σx_ip)`.
    pub fn design_col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.p + 1];
        s[0] = self.n as f64;
        for i in 0..self.n {
            for (j, v) in self.row(i).iter().enumerate() {
                s[j + 1] += v;
            }
        }
        s
    }

    /// Mean augmented row `x̄* = (1, x̄)`.
    pub fn design_mean(&self) -> Vec<f64> {
        let mut m = Vec::with_capacity(self.p + 1);
        m.push(1.0);
        m.extend(self.x_means());
        m
    }
}

/// Validates raw inputs into a [`Dataset`]; alias for [`Dataset::new`].
pub fn validate_dataset(y: Vec<f64>, x_rows: &[Vec<f64>]) -> Result<Dataset> {
    Dataset::new(y, x_rows)
}

/// A fitted regression quantile at level `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFit {
    pub alpha: f64,
    pub intercept: f64,
    pub slopes: Vec<f64>,
    /// Optimal objective of the underlying program. For `alpha = 1` this is
    /// the sum of fitted values `Σ x*ᵢᵀβ̂*`; for interior `alpha` it is the
    /// check-loss value.
    pub objective: f64,
    /// Observations with zero residual (0-based, sorted ascending).
    pub active_set: Vec<usize>,
    /// More than `p + 1` active constraints, or a singular base submatrix.
    pub degenerate: bool,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl QuantileFit {
    /// `(intercept, slopes…)` as one vector.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.slopes.len() + 1);
        c.push(self.intercept);
        c.extend_from_slice(&self.slopes);
        c
    }
}

/// The `p + 1` optimal-base observations with their response weights.
/// In a non-degenerate instance the weights are strictly positive and sum
/// to one, making the AERQ a convex combination of base responses.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseWeights {
    /// 0-based observation indices, sorted ascending.
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
    /// The `(p+1) × (p+1)` submatrix of `X*` with the base rows.
    pub base_matrix: Vec<Vec<f64>>,
}

impl BaseWeights {
    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// True when every weight exceeds `tol`.
    pub fn all_positive(&self, tol: f64) -> bool {
        self.weights.iter().all(|&w| w > tol)
    }
}
