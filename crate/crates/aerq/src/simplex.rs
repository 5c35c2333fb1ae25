//! Bounded-variable two-phase primal simplex on a dense tableau.
//!
//! Every linear program in this crate runs through [`solve_lp`]: the extreme
//! fit (free coefficients, one inequality per observation), the rank-score
//! dual (box-bounded variables with a handful of equality rows), and the
//! minimax slope program. Variable bounds are handled natively, so the dual
//! box constraints never get split into pairs of inequalities, and free
//! variables carry infinite bounds instead of being split into differences.
//!
//! The pivot rule is Dantzig (most negative reduced cost) with ties broken
//! by lowest index, switching to Bland's rule after a configurable streak of
//! degenerate pivots. Ratio-test ties break at the lowest row index, which
//! pins down the reported vertex when the optimum is a face.

use crate::linalg::dot;
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// A dense linear program with per-variable bounds (which may be infinite).
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub direction: Direction,
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// A minimization problem; all variables start free.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            direction: Direction::Minimize,
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    /// A maximization problem; all variables start free.
    pub fn maximize(objective: Vec<f64>) -> Self {
        LpProblem {
            direction: Direction::Maximize,
            ..Self::minimize(objective)
        }
    }

    /// Appends a constraint row.
    pub fn constraint(&mut self, row: Vec<f64>, sense: Sense, rhs: f64) -> &mut Self {
        self.rows.push(row);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self
    }

    /// Sets the bounds of one variable.
    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let m = self.num_constraints();
        if self.senses.len() != m || self.rhs.len() != m {
            return Err(Error::InvalidProblem(
                "senses/rhs length must match constraint count".into(),
            ));
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::InvalidProblem(
                "bounds length must match variable count".into(),
            ));
        }
        for (k, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidProblem(format!(
                    "constraint {} has {} coefficients, expected {}",
                    k,
                    row.len(),
                    n
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidProblem(format!(
                    "constraint {} has a non-finite coefficient",
                    k
                )));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("non-finite objective".into()));
        }
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("non-finite right-hand side".into()));
        }
        for j in 0..n {
            if self.lower[j].is_nan() || self.upper[j].is_nan() {
                return Err(Error::InvalidProblem(format!("NaN bound on variable {}", j)));
            }
            if self.lower[j] > self.upper[j] {
                return Err(Error::InvalidProblem(format!(
                    "variable {} has lower bound {} above upper bound {}",
                    j, self.lower[j], self.upper[j]
                )));
            }
        }
        Ok(())
    }
}

/// Solver status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve. Primal values, duals, and reduced costs are
/// meaningful only when `status == Optimal`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// One dual value per constraint, in the sign convention of the problem
    /// as posed (for maximization they are negated relative to the internal
    /// minimized form).
    pub duals: Vec<f64>,
    /// Reduced costs of the structural variables.
    pub reduced_costs: Vec<f64>,
    /// Basic variable per row; indices `>= num_vars` are slack or artificial
    /// columns.
    pub basis: Vec<usize>,
    /// A basic variable sat at a bound, or a ratio-test tie occurred.
    pub degenerate: bool,
    pub iterations: usize,
}

/// Pivot-rule configuration.
#[derive(Debug, Clone, Copy)]
pub struct PivotOptions {
    /// Iteration limit is `iteration_factor * (rows + columns)`.
    pub iteration_factor: usize,
    /// Consecutive degenerate pivots before Bland's rule engages.
    pub bland_streak: usize,
}

impl Default for PivotOptions {
    fn default() -> Self {
        PivotOptions {
            iteration_factor: 50,
            bland_streak: 10,
        }
    }
}

/// Solves the program with default pivot options.
pub fn solve_lp(problem: &LpProblem, tol: &Tolerances) -> Result<LpSolution> {
    solve_lp_with(problem, tol, PivotOptions::default())
}

/// Solves the program. Deterministic: identical inputs yield bit-identical
/// solutions.
pub fn solve_lp_with(
    problem: &LpProblem,
    tol: &Tolerances,
    opts: PivotOptions,
) -> Result<LpSolution> {
    problem.validate()?;
    let minimize = problem.direction == Direction::Minimize;
    let c_int: Vec<f64> = if minimize {
        problem.objective.clone()
    } else {
        problem.objective.iter().map(|v| -v).collect()
    };

    let mut tab = Tableau::build(problem, tol, opts);

    // Phase 1: minimize the artificial sum.
    if tab.run()? == LoopExit::Unbounded {
        return Err(Error::Internal("phase-1 program cannot be unbounded".into()));
    }
    let infeas = tab.artificial_sum();
    let rhs_scale = problem.rhs.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    if infeas > tol.feas(1.0 + rhs_scale) {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: vec![f64::NAN; problem.num_vars()],
            objective: f64::NAN,
            duals: vec![f64::NAN; problem.num_constraints()],
            reduced_costs: vec![f64::NAN; problem.num_vars()],
            basis: tab.basis.clone(),
            degenerate: false,
            iterations: tab.iterations,
        });
    }
    tab.enter_phase_two(&c_int);

    // Phase 2: the real objective.
    let status = match tab.run()? {
        LoopExit::Optimal => LpStatus::Optimal,
        LoopExit::Unbounded => LpStatus::Unbounded,
    };
    if status == LpStatus::Unbounded {
        return Ok(LpSolution {
            status,
            x: vec![f64::NAN; problem.num_vars()],
            objective: if minimize {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            },
            duals: vec![f64::NAN; problem.num_constraints()],
            reduced_costs: vec![f64::NAN; problem.num_vars()],
            basis: tab.basis.clone(),
            degenerate: false,
            iterations: tab.iterations,
        });
    }

    let x = tab.structural_values();
    let objective = dot(&problem.objective, &x);
    let sign = if minimize { 1.0 } else { -1.0 };
    let duals: Vec<f64> = (0..tab.m).map(|k| sign * tab.dual_of_row(k)).collect();
    let reduced_costs: Vec<f64> = (0..tab.nstruct).map(|j| sign * tab.dj[j]).collect();
    let degenerate = tab.ratio_ties || tab.basic_at_bound();

    Ok(LpSolution {
        status,
        x,
        objective,
        duals,
        reduced_costs,
        basis: tab.basis.clone(),
        degenerate,
        iterations: tab.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable, parked at zero.
    Free,
}

#[derive(Debug, PartialEq)]
enum LoopExit {
    Optimal,
    Unbounded,
}

const PIVOT_EPS: f64 = 1e-11;
const DEGENERATE_STEP: f64 = 1e-10;

struct Tableau {
    m: usize,
    total: usize,
    nstruct: usize,
    /// `B^{-1} [A | slacks | artificials]`, row-major.
    t: Vec<Vec<f64>>,
    dj: Vec<f64>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    xb: Vec<f64>,
    slack_col: Vec<Option<usize>>,
    slack_sign: Vec<f64>,
    art_col: Vec<usize>,
    art_sign: Vec<f64>,
    iterations: usize,
    limit: usize,
    bland: bool,
    streak: usize,
    bland_streak: usize,
    ratio_ties: bool,
    dj_tol: f64,
}

impl Tableau {
    fn build(problem: &LpProblem, tol: &Tolerances, opts: PivotOptions) -> Tableau {
        let m = problem.num_constraints();
        let n = problem.num_vars();
        let nslack = problem
            .senses
            .iter()
            .filter(|s| **s != Sense::Eq)
            .count();
        let total = n + nslack + m;

        let mut lower = vec![0.0; total];
        let mut upper = vec![f64::INFINITY; total];
        lower[..n].copy_from_slice(&problem.lower);
        upper[..n].copy_from_slice(&problem.upper);

        // Nonbasic starting point: finite lower bound, else finite upper,
        // else zero for free variables.
        let mut state = vec![VarState::Free; total];
        for j in 0..total {
            state[j] = if lower[j].is_finite() {
                VarState::AtLower
            } else if upper[j].is_finite() {
                VarState::AtUpper
            } else {
                VarState::Free
            };
        }
        let value_of = |j: usize, state: &[VarState], lower: &[f64], upper: &[f64]| match state[j] {
            VarState::AtLower => lower[j],
            VarState::AtUpper => upper[j],
            _ => 0.0,
        };

        let mut slack_col = vec![None; m];
        let mut slack_sign = vec![0.0; m];
        let mut next = n;
        for k in 0..m {
            match problem.senses[k] {
                Sense::Le => {
                    slack_col[k] = Some(next);
                    slack_sign[k] = 1.0;
                    next += 1;
                }
                Sense::Ge => {
                    slack_col[k] = Some(next);
                    slack_sign[k] = -1.0;
                    next += 1;
                }
                Sense::Eq => {}
            }
        }
        let art_col: Vec<usize> = (0..m).map(|k| n + nslack + k).collect();

        // Residuals at the starting point fix the artificial column signs.
        let mut art_sign = vec![1.0; m];
        let mut xb = vec![0.0; m];
        let mut t = vec![vec![0.0; total]; m];
        for k in 0..m {
            let mut r = problem.rhs[k];
            for j in 0..n {
                r -= problem.rows[k][j] * value_of(j, &state, &lower, &upper);
            }
            // slack starts at zero, no residual contribution
            art_sign[k] = if r < 0.0 { -1.0 } else { 1.0 };
            xb[k] = art_sign[k] * r;

            let row = &mut t[k];
            for j in 0..n {
                row[j] = art_sign[k] * problem.rows[k][j];
            }
            if let Some(sc) = slack_col[k] {
                row[sc] = art_sign[k] * slack_sign[k];
            }
            row[art_col[k]] = 1.0;
        }

        let mut basis = vec![0; m];
        for k in 0..m {
            basis[k] = art_col[k];
            state[art_col[k]] = VarState::Basic(k);
        }

        // Phase-1 objective: the artificial sum.
        let mut cost = vec![0.0; total];
        for &a in &art_col {
            cost[a] = 1.0;
        }
        let mut dj = vec![0.0; total];
        for j in 0..total {
            let mut d = cost[j];
            for k in 0..m {
                d -= cost[basis[k]] * t[k][j];
            }
            dj[j] = d;
        }
        for k in 0..m {
            dj[basis[k]] = 0.0;
        }

        let limit = opts.iteration_factor * (m + total).max(1);
        Tableau {
            m,
            total,
            nstruct: n,
            t,
            dj,
            cost,
            lower,
            upper,
            state,
            basis,
            xb,
            slack_col,
            slack_sign,
            art_col,
            art_sign,
            iterations: 0,
            limit,
            bland: false,
            streak: 0,
            bland_streak: opts.bland_streak,
            ratio_ties: false,
            dj_tol: tol.abs,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.total - self.m
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            VarState::Free => 0.0,
            VarState::Basic(r) => self.xb[r],
        }
    }

    fn artificial_sum(&self) -> f64 {
        (0..self.m)
            .filter(|&k| self.is_artificial(self.basis[k]))
            .map(|k| self.xb[k])
            .sum()
    }

    /// Entering column and travel direction, or `None` at optimality.
    fn entering(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.total {
            let dir = match self.state[j] {
                VarState::Basic(_) => continue,
                VarState::AtLower => {
                    if self.dj[j] < -self.dj_tol && self.upper[j] > self.lower[j] {
                        1.0
                    } else {
                        continue;
                    }
                }
                VarState::AtUpper => {
                    if self.dj[j] > self.dj_tol && self.upper[j] > self.lower[j] {
                        -1.0
                    } else {
                        continue;
                    }
                }
                VarState::Free => {
                    if self.dj[j] < -self.dj_tol {
                        1.0
                    } else if self.dj[j] > self.dj_tol {
                        -1.0
                    } else {
                        continue;
                    }
                }
            };
            if self.bland {
                return Some((j, dir));
            }
            let score = self.dj[j].abs();
            match best {
                Some((_, _, s)) if s >= score => {}
                _ => best = Some((j, dir, score)),
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn run(&mut self) -> Result<LoopExit> {
        loop {
            self.iterations += 1;
            if self.iterations > self.limit {
                return Err(Error::IterationLimit { limit: self.limit });
            }
            let Some((q, dir)) = self.entering() else {
                return Ok(LoopExit::Optimal);
            };

            // Ratio test: the entering variable's own width competes with
            // every basic variable's distance to the bound it moves toward.
            let width = self.upper[q] - self.lower[q];
            let mut best = width; // may be infinite
            let mut best_row: Option<usize> = None;
            for i in 0..self.m {
                let g = dir * self.t[i][q];
                let b = self.basis[i];
                let ratio = if g > PIVOT_EPS {
                    if self.lower[b].is_finite() {
                        ((self.xb[i] - self.lower[b]) / g).max(0.0)
                    } else {
                        continue;
                    }
                } else if g < -PIVOT_EPS {
                    if self.upper[b].is_finite() {
                        ((self.upper[b] - self.xb[i]) / (-g)).max(0.0)
                    } else {
                        continue;
                    }
                } else {
                    continue;
                };
                let tie_eps = 1e-9 * (1.0 + if best.is_finite() { best.abs() } else { 0.0 });
                if ratio < best - tie_eps {
                    best = ratio;
                    best_row = Some(i);
                } else if ratio <= best + tie_eps {
                    self.ratio_ties = true;
                    if let Some(r) = best_row {
                        // Default rule keeps the lowest row seen first; under
                        // Bland's rule the lowest variable index leaves.
                        if self.bland && self.basis[i] < self.basis[r] {
                            best_row = Some(i);
                        }
                    }
                }
            }

            if best.is_infinite() {
                return Ok(LoopExit::Unbounded);
            }
            let delta = best;

            match best_row {
                None => {
                    // Bound flip: the entering variable crosses to its other
                    // bound without a basis change.
                    for i in 0..self.m {
                        self.xb[i] -= dir * delta * self.t[i][q];
                    }
                    self.state[q] = match self.state[q] {
                        VarState::AtLower => VarState::AtUpper,
                        VarState::AtUpper => VarState::AtLower,
                        _ => unreachable!("free variables have no bound to flip to"),
                    };
                }
                Some(r) => self.pivot(r, q, dir, delta),
            }

            if delta <= DEGENERATE_STEP {
                self.streak += 1;
                if self.streak >= self.bland_streak {
                    self.bland = true;
                }
            } else {
                self.streak = 0;
                self.bland = false;
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize, dir: f64, delta: f64) {
        let leave = self.basis[r];
        let g = dir * self.t[r][q];
        let entering_value = self.nonbasic_value(q) + dir * delta;

        for i in 0..self.m {
            if i != r {
                self.xb[i] -= dir * delta * self.t[i][q];
            }
        }
        self.xb[r] = entering_value;

        // Snap the leaving variable to the bound it hit.
        self.state[leave] = if g > 0.0 {
            VarState::AtLower
        } else {
            VarState::AtUpper
        };
        // An artificial that leaves the basis is done for good.
        if self.is_artificial(leave) {
            self.lower[leave] = 0.0;
            self.upper[leave] = 0.0;
            self.state[leave] = VarState::AtLower;
        }

        let piv = self.t[r][q];
        let row_r: Vec<f64> = self.t[r].iter().map(|v| v / piv).collect();
        self.t[r] = row_r;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i][q];
            if f != 0.0 {
                for j in 0..self.total {
                    let v = self.t[r][j];
                    self.t[i][j] -= f * v;
                }
                self.t[i][q] = 0.0;
            }
        }
        let f = self.dj[q];
        if f != 0.0 {
            for j in 0..self.total {
                let v = self.t[r][j];
                self.dj[j] -= f * v;
            }
        }
        self.dj[q] = 0.0;
        self.t[r][q] = 1.0;

        self.basis[r] = q;
        self.state[q] = VarState::Basic(r);
    }

    /// Switches costs to the real objective, freezes artificials at zero,
    /// and drives basic artificials out where a pivot exists.
    fn enter_phase_two(&mut self, c_int: &[f64]) {
        // Remove basic artificials by zero-length pivots when possible.
        for r in 0..self.m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let mut pick: Option<(usize, f64)> = None;
            for j in 0..self.total - self.m {
                if matches!(self.state[j], VarState::Basic(_)) {
                    continue;
                }
                let a = self.t[r][j].abs();
                if a > 1e-7 && pick.map_or(true, |(_, best)| a > best) {
                    pick = Some((j, a));
                }
            }
            if let Some((j, _)) = pick {
                let dir = if self.t[r][j] > 0.0 { 1.0 } else { -1.0 };
                self.pivot(r, j, dir, 0.0);
            }
            // Otherwise the row is redundant; the artificial stays basic at
            // zero with zero bounds and never blocks a step.
        }
        for k in 0..self.m {
            let a = self.art_col[k];
            self.lower[a] = 0.0;
            self.upper[a] = 0.0;
        }

        self.cost = vec![0.0; self.total];
        self.cost[..self.nstruct].copy_from_slice(c_int);
        for j in 0..self.total {
            let mut d = self.cost[j];
            for k in 0..self.m {
                d -= self.cost[self.basis[k]] * self.t[k][j];
            }
            self.dj[j] = d;
        }
        for k in 0..self.m {
            self.dj[self.basis[k]] = 0.0;
        }
        let cmax = c_int.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        self.dj_tol = self.dj_tol.max(1e-12 * cmax);
        self.bland = false;
        self.streak = 0;
    }

    fn structural_values(&self) -> Vec<f64> {
        (0..self.nstruct).map(|j| self.nonbasic_value(j)).collect()
    }

    /// Dual of row `k` in the internal minimized form, read off the reduced
    /// cost of the row's unit column (slack when present, artificial for
    /// equality rows).
    fn dual_of_row(&self, k: usize) -> f64 {
        match self.slack_col[k] {
            Some(sc) => -self.slack_sign[k] * self.dj[sc],
            None => -self.art_sign[k] * self.dj[self.art_col[k]],
        }
    }

    fn basic_at_bound(&self) -> bool {
        (0..self.m).any(|i| {
            let b = self.basis[i];
            let near_lower =
                self.lower[b].is_finite() && (self.xb[i] - self.lower[b]).abs() <= 1e-9;
            let near_upper =
                self.upper[b].is_finite() && (self.upper[b] - self.xb[i]).abs() <= 1e-9;
            near_lower || near_upper
        })
    }
}

/// Independent optimality certificate for a claimed-optimal solution.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub primal_feasible: bool,
    pub dual_feasible: bool,
    pub complementary: bool,
    pub duality_gap: f64,
    pub gap_ok: bool,
    pub violations: Vec<String>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.primal_feasible && self.dual_feasible && self.complementary && self.gap_ok
    }
}

/// Re-checks feasibility, dual-sign correctness, complementary slackness,
/// and the duality gap from the problem data alone — none of the solver's
/// internal state is consulted.
pub fn certify_solution(problem: &LpProblem, solution: &LpSolution, tol: &Tolerances) -> Certificate {
    let mut violations = Vec::new();
    let minimize = problem.direction == Direction::Minimize;
    let n = problem.num_vars();
    let m = problem.num_constraints();

    if solution.status != LpStatus::Optimal {
        violations.push("solution does not claim optimality".to_string());
        return Certificate {
            primal_feasible: false,
            dual_feasible: false,
            complementary: false,
            duality_gap: f64::NAN,
            gap_ok: false,
            violations,
        };
    }

    let x = &solution.x;
    let sign = if minimize { 1.0 } else { -1.0 };
    let c_int: Vec<f64> = problem.objective.iter().map(|v| sign * v).collect();
    let y_int: Vec<f64> = solution.duals.iter().map(|v| sign * v).collect();

    let mut primal_feasible = true;
    let mut activities = vec![0.0; m];
    for k in 0..m {
        let v = dot(&problem.rows[k], x);
        activities[k] = v;
        let slack_tol = tol.feas(problem.rhs[k].abs().max(v.abs()));
        let ok = match problem.senses[k] {
            Sense::Le => v <= problem.rhs[k] + slack_tol,
            Sense::Ge => v >= problem.rhs[k] - slack_tol,
            Sense::Eq => (v - problem.rhs[k]).abs() <= slack_tol,
        };
        if !ok {
            primal_feasible = false;
            violations.push(format!(
                "constraint {} violated: activity {} vs rhs {}",
                k, v, problem.rhs[k]
            ));
        }
    }
    for j in 0..n {
        let bt = tol.feas(x[j].abs());
        if x[j] < problem.lower[j] - bt || x[j] > problem.upper[j] + bt {
            primal_feasible = false;
            violations.push(format!("variable {} out of bounds: {}", j, x[j]));
        }
    }

    // Reduced costs from scratch.
    let mut d = vec![0.0; n];
    for j in 0..n {
        let mut v = c_int[j];
        for k in 0..m {
            v -= y_int[k] * problem.rows[k][j];
        }
        d[j] = v;
    }

    let dual_scale = c_int.iter().fold(1.0_f64, |a, b| a.max(b.abs()));
    let dtol = tol.feas(dual_scale);
    let mut dual_feasible = true;
    for k in 0..m {
        let ok = match problem.senses[k] {
            Sense::Le => y_int[k] <= dtol,
            Sense::Ge => y_int[k] >= -dtol,
            Sense::Eq => true,
        };
        if !ok {
            dual_feasible = false;
            violations.push(format!("dual {} has wrong sign: {}", k, y_int[k]));
        }
    }
    for j in 0..n {
        let at_lower =
            problem.lower[j].is_finite() && (x[j] - problem.lower[j]).abs() <= tol.feas(x[j].abs());
        let at_upper =
            problem.upper[j].is_finite() && (problem.upper[j] - x[j]).abs() <= tol.feas(x[j].abs());
        let ok = if at_lower && at_upper {
            true // fixed variable, any reduced cost
        } else if at_lower {
            d[j] >= -dtol
        } else if at_upper {
            d[j] <= dtol
        } else {
            d[j].abs() <= dtol
        };
        if !ok {
            dual_feasible = false;
            violations.push(format!(
                "reduced cost {} inconsistent with position of variable {}",
                d[j], j
            ));
        }
    }

    let mut complementary = true;
    for k in 0..m {
        if problem.senses[k] == Sense::Eq {
            continue;
        }
        let slack = activities[k] - problem.rhs[k];
        let prod = y_int[k] * slack;
        if prod.abs() > tol.feas(dual_scale * (1.0 + slack.abs())) {
            complementary = false;
            violations.push(format!(
                "complementary slackness fails on constraint {}: y = {}, slack = {}",
                k, y_int[k], slack
            ));
        }
    }

    // Duality gap: dual objective adds each variable's bound contribution.
    let mut dual_obj = dot(&y_int, &problem.rhs);
    let mut gap_defined = true;
    for j in 0..n {
        if d[j] > dtol {
            if problem.lower[j].is_finite() {
                dual_obj += d[j] * problem.lower[j];
            } else {
                gap_defined = false;
            }
        } else if d[j] < -dtol {
            if problem.upper[j].is_finite() {
                dual_obj += d[j] * problem.upper[j];
            } else {
                gap_defined = false;
            }
        }
    }
    let primal_obj = dot(&c_int, x);
    let duality_gap = if gap_defined {
        (primal_obj - dual_obj).abs()
    } else {
        f64::INFINITY
    };
    let gap_ok = duality_gap <= tol.feas(1.0 + primal_obj.abs());
    if !gap_ok {
        violations.push(format!("duality gap {} exceeds tolerance", duality_gap));
    }

    Certificate {
        primal_feasible,
        dual_feasible,
        complementary,
        duality_gap,
        gap_ok,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn single_variable_between_constraints() {
        let mut lp = LpProblem::minimize(vec![1.0]);
        lp.constraint(vec![1.0], Sense::Ge, 2.0);
        lp.constraint(vec![1.0], Sense::Le, 10.0);
        let s = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 2.0).abs() < 1e-12);
        assert!((s.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn free_variable_vertex() {
        // Vertex enumeration over the three constraint pairs puts the optimum
        // at (3.5, -0.5) with objective 8.5.
        let mut lp = LpProblem::minimize(vec![3.0, 4.0]);
        lp.constraint(vec![1.0, 0.0], Sense::Ge, 1.0);
        lp.constraint(vec![1.0, 1.0], Sense::Ge, 3.0);
        lp.constraint(vec![1.0, 3.0], Sense::Ge, 2.0);
        let s = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 3.5).abs() < 1e-10);
        assert!((s.x[1] + 0.5).abs() < 1e-10);
        assert!((s.objective - 8.5).abs() < 1e-10);
        // Hand-derived duals from the two active constraints.
        assert!(s.duals[0].abs() < 1e-10);
        assert!((s.duals[1] - 2.5).abs() < 1e-10);
        assert!((s.duals[2] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn unbounded_maximization() {
        let mut lp = LpProblem::maximize(vec![1.0]);
        lp.constraint(vec![1.0], Sense::Ge, 0.0);
        let s = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LpProblem::minimize(vec![1.0]);
        lp.constraint(vec![1.0], Sense::Ge, 5.0);
        lp.constraint(vec![1.0], Sense::Le, 1.0);
        let s = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_row_with_box_bounds() {
        // max 3a + 2b + c, a + b + c = 1.2, all in [0,1]: greedy fill a then b.
        let mut lp = LpProblem::maximize(vec![3.0, 2.0, 1.0]);
        for j in 0..3 {
            lp.set_bounds(j, 0.0, 1.0);
        }
        lp.constraint(vec![1.0, 1.0, 1.0], Sense::Eq, 1.2);
        let s = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!((s.x[1] - 0.2).abs() < 1e-12);
        assert!(s.x[2].abs() < 1e-12);
    }

    #[test]
    fn strong_duality_on_the_vertex_instance() {
        let mut lp = LpProblem::minimize(vec![3.0, 4.0]);
        lp.constraint(vec![1.0, 0.0], Sense::Ge, 1.0);
        lp.constraint(vec![1.0, 1.0], Sense::Ge, 3.0);
        lp.constraint(vec![1.0, 3.0], Sense::Ge, 2.0);
        let s = solve_lp(&lp, &tol()).unwrap();
        let dual_obj = dot(&s.duals, &lp.rhs);
        assert!((dual_obj - s.objective).abs() < 1e-10);
        let cert = certify_solution(&lp, &s, &tol());
        assert!(cert.passed(), "{:?}", cert.violations);
        assert!(cert.duality_gap < 1e-10);
    }

    #[test]
    fn certificate_rejects_perturbed_point() {
        let mut lp = LpProblem::minimize(vec![3.0, 4.0]);
        lp.constraint(vec![1.0, 0.0], Sense::Ge, 1.0);
        lp.constraint(vec![1.0, 1.0], Sense::Ge, 3.0);
        lp.constraint(vec![1.0, 3.0], Sense::Ge, 2.0);
        let mut s = solve_lp(&lp, &tol()).unwrap();
        // Still feasible (objective 8.8 > 8.5), no longer optimal.
        s.x = vec![3.6, -0.5];
        s.objective = dot(&lp.objective, &s.x);
        let cert = certify_solution(&lp, &s, &tol());
        assert!(cert.primal_feasible);
        assert!(!cert.passed());
        assert!(cert.duality_gap > 0.29 && cert.duality_gap < 0.31);
    }

    #[test]
    fn certificate_accepts_empty_constraint_lp() {
        let mut lp = LpProblem::minimize(vec![1.0]);
        lp.set_bounds(0, 2.0, 10.0);
        let s = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 2.0).abs() < 1e-12);
        let cert = certify_solution(&lp, &s, &tol());
        assert!(cert.passed(), "{:?}", cert.violations);
    }

    #[test]
    fn deterministic_bitwise() {
        let mut lp = LpProblem::minimize(vec![1.0, 2.0, -1.0]);
        lp.constraint(vec![1.0, 1.0, 1.0], Sense::Le, 4.0);
        lp.constraint(vec![1.0, -1.0, 0.0], Sense::Ge, -2.0);
        lp.constraint(vec![0.0, 1.0, 2.0], Sense::Eq, 1.0);
        for j in 0..3 {
            lp.set_bounds(j, -3.0, 5.0);
        }
        let a = solve_lp(&lp, &tol()).unwrap();
        let b = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(a, b);
        assert!(a.x.iter().zip(&b.x).all(|(u, v)| u.to_bits() == v.to_bits()));
    }

    #[test]
    fn iteration_limit_reported() {
        let mut lp = LpProblem::minimize(vec![-1.0, -1.0]);
        lp.constraint(vec![1.0, 1.0], Sense::Le, 2.0);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        lp.set_bounds(1, 0.0, f64::INFINITY);
        let r = solve_lp_with(
            &lp,
            &tol(),
            PivotOptions {
                iteration_factor: 0,
                bland_streak: 10,
            },
        );
        assert!(matches!(r, Err(Error::IterationLimit { .. })));
    }

    #[test]
    fn bound_flip_path() {
        // Maximizing a single boxed variable with a loose constraint flips
        // it straight to the upper bound.
        let mut lp = LpProblem::maximize(vec![1.0]);
        lp.set_bounds(0, 0.0, 3.0);
        lp.constraint(vec![1.0], Sense::Le, 10.0);
        let s = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 3.0).abs() < 1e-12);
    }
}
