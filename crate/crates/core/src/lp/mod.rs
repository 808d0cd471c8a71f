//! Linear programs and a bundled bounded-variable revised simplex solver.
//!
//! Problems are stated as maximization of `c'x` subject to sparse rows
//! `a'x (<=|>=|=) b` and column bounds `l <= x <= u` (either bound may be
//! infinite).

mod export;
mod simplex;

pub use export::write_lp_format;
pub use simplex::{solve, SolverOptions};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub sense: Sense,
    pub rhs: f64,
}

/// A maximization LP with triplet-form constraints.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
    /// `(row, column, coefficient)`; duplicates are summed.
    pub entries: Vec<(usize, usize, f64)>,
}

impl LpProblem {
    pub fn new(n_cols: usize) -> Self {
        LpProblem {
            objective: vec![0.0; n_cols],
            lower: vec![0.0; n_cols],
            upper: vec![f64::INFINITY; n_cols],
            rows: Vec::new(),
            entries: Vec::new(),
        }
    }

    pub fn n_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Appends a row and returns its index.
    pub fn add_row(&mut self, coeffs: impl IntoIterator<Item = (usize, f64)>, sense: Sense, rhs: f64) -> usize {
        let r = self.rows.len();
        self.rows.push(Row { sense, rhs });
        self.entries
            .extend(coeffs.into_iter().filter(|(_, a)| *a != 0.0).map(|(c, a)| (r, c, a)));
        r
    }

    pub fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) {
        self.lower[col] = lower;
        self.upper[col] = upper;
    }

    pub fn fix(&mut self, col: usize, value: f64) {
        self.set_bounds(col, value, value);
    }

    /// Checks shapes, index ranges and finiteness.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_cols();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Dimension("bound vectors do not match column count".into()));
        }
        for (j, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::Validation(format!("column {j} has bounds [{l}, {u}]")));
            }
        }
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(Error::Validation(format!("objective coefficient {j} is not finite")));
        }
        if let Some(i) = self.rows.iter().position(|r| r.rhs.is_nan()) {
            return Err(Error::Validation(format!("row {i} has a NaN right-hand side")));
        }
        for &(r, c, a) in &self.entries {
            if r >= self.rows.len() || c >= n {
                return Err(Error::Dimension(format!("entry ({r}, {c}) out of range")));
            }
            if !a.is_finite() {
                return Err(Error::Validation(format!("entry ({r}, {c}) is not finite")));
            }
        }
        Ok(())
    }

    /// Objective value of a point.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Row activities `a_i'x`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.rows.len()];
        for &(r, c, a) in &self.entries {
            act[r] += a * x[c];
        }
        act
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, act) in self.rows.iter().zip(self.activities(x)) {
            let v = match row.sense {
                Sense::Le => act - row.rhs,
                Sense::Ge => row.rhs - act,
                Sense::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for ((&l, &u), &xj) in self.lower.iter().zip(&self.upper).zip(x) {
            worst = worst.max(l - xj).max(xj - u);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    /// The solver broke down (singular basis, iteration limit, failed final check).
    NumericalFailure,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::NumericalFailure => "numerical-failure",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: Status,
    pub objective: f64,
    pub x: Vec<f64>,
    /// Row duals for the maximization problem (`>= 0` on `<=` rows at optimality).
    pub duals: Option<Vec<f64>>,
    pub iterations: usize,
    pub diagnostics: String,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Lagrangian dual bound `b'y + sum_j max_{l_j <= x_j <= u_j} (c_j - a_j'y) x_j`.
    ///
    /// For any `y` with the right sign pattern this is an upper bound on the
    /// primal optimum; it is `+inf` when a reduced cost points along an
    /// unbounded column.
    pub fn dual_objective(&self, problem: &LpProblem) -> Option<f64> {
        let y = self.duals.as_ref()?;
        let mut reduced = problem.objective.clone();
        let mut magnitude: Vec<f64> = problem.objective.iter().map(|c| c.abs()).collect();
        for &(r, c, a) in &problem.entries {
            reduced[c] -= a * y[r];
            magnitude[c] += (a * y[r]).abs();
        }
        let mut total: f64 = problem.rows.iter().zip(y).map(|(row, yi)| row.rhs * yi).sum();
        for (j, d) in reduced.iter().enumerate() {
            // Reduced costs that are zero up to round-off do not count.
            if d.abs() <= 1e-9 * magnitude[j].max(1.0) {
                continue;
            }
            let bound = if *d > 0.0 {
                problem.upper[j]
            } else if *d < 0.0 {
                problem.lower[j]
            } else {
                continue;
            };
            total += d * bound;
        }
        Some(total)
    }
}
