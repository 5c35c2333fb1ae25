//! Small dense linear algebra: square solves and rank detection.
//!
//! Everything here works on `(p + 1)`-sized systems at desk scale, so plain
//! dense Gaussian elimination is the right tool. No iterative refinement, no
//! sparsity.

use crate::tol::Tolerances;

/// Outcome of a square solve: either the solution vector or a singularity
/// report carrying the pivot-ratio condition indicator.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolveResult {
    Solution(Vec<f64>),
    Singular {
        /// `|smallest pivot| / |largest pivot|` seen before elimination stopped.
        condition: f64,
    },
}

impl LinearSolveResult {
    /// The solution vector, if the system was regular.
    pub fn solution(&self) -> Option<&[f64]> {
        match self {
            LinearSolveResult::Solution(x) => Some(x),
            LinearSolveResult::Singular { .. } => None,
        }
    }
}

/// Solves `A x = b` for square `A` by Gaussian elimination with partial
/// pivoting. A pivot whose magnitude falls below the rank-pivot ratio times
/// the largest pivot produces a singularity report instead of a solution.
pub fn solve_square_system(a: &[Vec<f64>], b: &[f64]) -> LinearSolveResult {
    solve_square_system_with(a, b, Tolerances::default().rank_pivot_ratio)
}

/// [`solve_square_system`] with an explicit pivot-ratio threshold.
pub fn solve_square_system_with(a: &[Vec<f64>], b: &[f64], pivot_ratio: f64) -> LinearSolveResult {
    let n = a.len();
    assert_eq!(b.len(), n, "right-hand side length must match matrix order");
    for row in a {
        assert_eq!(row.len(), n, "matrix must be square");
    }

    // Augmented working copy.
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();

    let mut max_pivot: f64 = 0.0;
    let mut min_pivot = f64::INFINITY;

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        let pivot = m[pivot_row][col];
        max_pivot = max_pivot.max(pivot.abs());
        min_pivot = min_pivot.min(pivot.abs());
        if pivot.abs() <= pivot_ratio * max_pivot {
            return LinearSolveResult::Singular {
                condition: if max_pivot > 0.0 {
                    pivot.abs() / max_pivot
                } else {
                    0.0
                },
            };
        }
        m.swap(col, pivot_row);
        for i in col + 1..n {
            let f = m[i][col] / pivot;
            if f != 0.0 {
                for j in col..=n {
                    let v = m[col][j];
                    m[i][j] -= f * v;
                }
            }
        }
    }

    let _ = min_pivot;
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = m[i][n];
        for j in i + 1..n {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    LinearSolveResult::Solution(x)
}

/// Numerical rank of a rectangular matrix by Gaussian elimination with
/// complete pivoting. A remaining entry below `pivot_ratio` times the first
/// pivot counts as zero.
pub fn rank(rows: &[Vec<f64>], pivot_ratio: f64) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<f64>> = rows.to_vec();

    let mut r = 0;
    let mut first_pivot = 0.0_f64;
    while r < nrows.min(ncols) {
        // largest remaining entry
        let mut best = (r, r, 0.0_f64);
        for i in r..nrows {
            for j in r..ncols {
                if m[i][j].abs() > best.2 {
                    best = (i, j, m[i][j].abs());
                }
            }
        }
        if r == 0 {
            first_pivot = best.2;
        }
        if best.2 <= pivot_ratio * first_pivot || best.2 == 0.0 {
            break;
        }
        m.swap(r, best.0);
        for row in m.iter_mut() {
            row.swap(r, best.1);
        }
        let pivot = m[r][r];
        for i in r + 1..nrows {
            let f = m[i][r] / pivot;
            if f != 0.0 {
                for j in r..ncols {
                    let v = m[r][j];
                    m[i][j] -= f * v;
                }
            }
        }
        r += 1;
    }
    r
}

/// `A v` for dense rows.
pub fn mat_vec(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    rows.iter().map(|row| dot(row, v)).collect()
}

/// Plain dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Transpose of a dense row-major matrix.
pub fn transpose(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    (0..ncols)
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let r = solve_square_system(&a, &[3.0, 4.0]);
        assert_eq!(r, LinearSolveResult::Solution(vec![3.0, 4.0]));
    }

    #[test]
    fn two_by_two_solve() {
        // Base matrix of the worked instance; inverse is (1/2)[[3,-1],[-1,1]].
        let a = vec![vec![1.0, 1.0], vec![1.0, 3.0]];
        let r = solve_square_system(&a, &[1.0, 0.0]);
        let x = r.solution().unwrap();
        assert!((x[0] - 1.5).abs() < 1e-12);
        assert!((x[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn rank_one_matrix_is_singular() {
        let a = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        match solve_square_system(&a, &[1.0, 5.0]) {
            LinearSolveResult::Singular { condition } => assert!(condition < 1e-10),
            LinearSolveResult::Solution(_) => panic!("expected singularity report"),
        }
    }

    #[test]
    fn rank_detects_collinearity() {
        let rows = vec![vec![1.0, 5.0], vec![1.0, 5.0], vec![1.0, 5.0]];
        assert_eq!(rank(&rows, 1e-10), 1);
        let rows = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 3.0]];
        assert_eq!(rank(&rows, 1e-10), 2);
    }

    #[test]
    fn rank_of_empty_and_zero() {
        assert_eq!(rank(&[], 1e-10), 0);
        assert_eq!(rank(&[vec![0.0, 0.0]], 1e-10), 0);
    }
}
