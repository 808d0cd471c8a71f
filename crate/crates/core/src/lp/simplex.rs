//! Bounded-variable primal revised simplex.
//!
//! Pipeline: fixed columns are substituted out, rows and columns are
//! equilibrated with power-of-two factors (exact in floating point), every row
//! gets a slack so the system reads `A x + s = b`, and rows whose residual at
//! the starting point falls outside the slack bounds get an artificial column.
//! Phase one drives artificials to zero, phase two optimizes the real
//! objective. The basis inverse is kept dense and updated with a product-form
//! pivot, and rebuilt from scratch every `refactor_interval` pivots.
//!
//! Pricing is Dantzig's rule with a Harris two-pass ratio test. After a run of
//! degenerate pivots the solver switches to Bland's rule until it makes
//! progress again, which rules out cycling. All tie-breaks go to the lowest
//! index, so identical input gives identical output.

use super::{LpProblem, LpSolution, Sense, Status};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Primal feasibility tolerance on the scaled problem.
    pub feasibility_tol: f64,
    /// Reduced-cost tolerance on the scaled, normalized objective.
    pub optimality_tol: f64,
    /// Smallest pivot element accepted by the ratio test.
    pub pivot_tol: f64,
    /// Defaults to `10_000 + 50 * (rows + columns)` when unset.
    pub max_iterations: Option<usize>,
    pub refactor_interval: usize,
    /// Consecutive degenerate pivots before falling back to Bland's rule.
    pub bland_after: usize,
    pub scale: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feasibility_tol: 1e-7,
            optimality_tol: 1e-9,
            pivot_tol: 1e-9,
            max_iterations: None,
            refactor_interval: 100,
            bland_after: 50,
            scale: true,
        }
    }
}

/// Solves `problem` (maximization). Malformed input is an error; solver
/// breakdown is reported through [`Status::NumericalFailure`].
pub fn solve(problem: &LpProblem, opts: &SolverOptions) -> Result<LpSolution> {
    problem.validate()?;
    let reduced = match Reduced::build(problem, opts) {
        Ok(r) => r,
        Err(status) => return Ok(failed(problem, status, 0, "row is inconsistent after fixing columns")),
    };
    Ok(reduced.solve(problem, opts))
}

fn failed(problem: &LpProblem, status: Status, iterations: usize, why: &str) -> LpSolution {
    LpSolution {
        status,
        objective: f64::NAN,
        x: vec![f64::NAN; problem.n_cols()],
        duals: None,
        iterations,
        diagnostics: why.to_owned(),
    }
}

/// The problem after presolve and scaling, in `A x + s = b` form.
struct Reduced {
    /// Original index of each kept column.
    cols: Vec<usize>,
    /// Original index of each kept row.
    rows: Vec<usize>,
    /// Values of columns removed by presolve (NaN for kept ones).
    fixed: Vec<f64>,
    col_scale: Vec<f64>,
    row_scale: Vec<f64>,
    // Scaled structural data, CSC.
    col_start: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    cost_norm: f64,
    b: Vec<f64>,
    senses: Vec<Sense>,
}

impl Reduced {
    fn build(p: &LpProblem, opts: &SolverOptions) -> std::result::Result<Self, Status> {
        let n = p.n_cols();
        let mut fixed = vec![f64::NAN; n];
        for j in 0..n {
            if p.lower[j] == p.upper[j] {
                fixed[j] = p.lower[j];
            }
        }

        // Aggregate entries per column, summing duplicates, in (col, row) order.
        let mut entries: Vec<(usize, usize, f64)> = p.entries.iter().map(|&(r, c, a)| (c, r, a)).collect();
        entries.sort_by_key(|e| (e.0, e.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (c, r, a) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == c && last.1 == r => last.2 += a,
                _ => merged.push((c, r, a)),
            }
        }
        merged.retain(|e| e.2 != 0.0);

        let mut rhs: Vec<f64> = p.rows.iter().map(|r| r.rhs).collect();
        let mut row_count = vec![0usize; p.n_rows()];
        for &(c, r, a) in &merged {
            if fixed[c].is_nan() {
                row_count[r] += 1;
            } else {
                rhs[r] -= a * fixed[c];
            }
        }

        // Rows with nothing left must hold on their own; rows with an infinite
        // side are either vacuous or impossible.
        let mut keep_row = vec![true; p.n_rows()];
        for (i, row) in p.rows.iter().enumerate() {
            let b = rhs[i];
            let vacuous = match row.sense {
                Sense::Le => b == f64::INFINITY,
                Sense::Ge => b == f64::NEG_INFINITY,
                Sense::Eq => false,
            };
            let impossible_inf = match row.sense {
                Sense::Le => b == f64::NEG_INFINITY,
                Sense::Ge => b == f64::INFINITY,
                Sense::Eq => b.is_infinite(),
            };
            if impossible_inf {
                return Err(Status::Infeasible);
            }
            if vacuous {
                keep_row[i] = false;
                continue;
            }
            if row_count[i] == 0 {
                let tol = opts.feasibility_tol * (1.0 + p.rows[i].rhs.abs());
                let ok = match row.sense {
                    Sense::Le => 0.0 <= b + tol,
                    Sense::Ge => 0.0 >= b - tol,
                    Sense::Eq => b.abs() <= tol,
                };
                if !ok {
                    return Err(Status::Infeasible);
                }
                keep_row[i] = false;
            }
        }

        let cols: Vec<usize> = (0..n).filter(|&j| fixed[j].is_nan()).collect();
        let rows: Vec<usize> = (0..p.n_rows()).filter(|&i| keep_row[i]).collect();
        let mut col_pos = vec![usize::MAX; n];
        for (k, &j) in cols.iter().enumerate() {
            col_pos[j] = k;
        }
        let mut row_pos = vec![usize::MAX; p.n_rows()];
        for (k, &i) in rows.iter().enumerate() {
            row_pos[i] = k;
        }

        let mut col_start = vec![0usize; cols.len() + 1];
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        for &(c, r, a) in &merged {
            if col_pos[c] != usize::MAX && row_pos[r] != usize::MAX {
                col_start[col_pos[c] + 1] += 1;
                row_idx.push(row_pos[r]);
                vals.push(a);
            }
        }
        for k in 0..cols.len() {
            col_start[k + 1] += col_start[k];
        }

        let mut red = Reduced {
            lb: cols.iter().map(|&j| p.lower[j]).collect(),
            ub: cols.iter().map(|&j| p.upper[j]).collect(),
            cost: cols.iter().map(|&j| p.objective[j]).collect(),
            cost_norm: 1.0,
            b: rows.iter().map(|&i| rhs[i]).collect(),
            senses: rows.iter().map(|&i| p.rows[i].sense).collect(),
            col_scale: vec![1.0; cols.len()],
            row_scale: vec![1.0; rows.len()],
            cols,
            rows,
            fixed,
            col_start,
            row_idx,
            vals,
        };
        if opts.scale {
            red.equilibrate();
        }
        let cmax = red.cost.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if cmax > 0.0 {
            red.cost_norm = cmax;
            for c in &mut red.cost {
                *c /= cmax;
            }
        }
        Ok(red)
    }

    /// Geometric-mean scaling with power-of-two factors.
    fn equilibrate(&mut self) {
        let m = self.rows.len();
        let n = self.cols.len();
        let pow2 = |x: f64| 2f64.powi(x.log2().round() as i32);
        for _ in 0..4 {
            let mut rmin = vec![f64::INFINITY; m];
            let mut rmax = vec![0.0f64; m];
            for j in 0..n {
                for k in self.col_start[j]..self.col_start[j + 1] {
                    let a = self.vals[k].abs();
                    let r = self.row_idx[k];
                    rmin[r] = rmin[r].min(a);
                    rmax[r] = rmax[r].max(a);
                }
            }
            let rs: Vec<f64> = (0..m)
                .map(|i| if rmax[i] > 0.0 { pow2(1.0 / (rmin[i] * rmax[i]).sqrt()) } else { 1.0 })
                .collect();
            for k in 0..self.vals.len() {
                self.vals[k] *= rs[self.row_idx[k]];
            }
            for i in 0..m {
                self.row_scale[i] *= rs[i];
            }
            for j in 0..n {
                let (lo, hi) = (self.col_start[j], self.col_start[j + 1]);
                if lo == hi {
                    continue;
                }
                let (mut cmin, mut cmax) = (f64::INFINITY, 0.0f64);
                for k in lo..hi {
                    cmin = cmin.min(self.vals[k].abs());
                    cmax = cmax.max(self.vals[k].abs());
                }
                let s = pow2(1.0 / (cmin * cmax).sqrt());
                for k in lo..hi {
                    self.vals[k] *= s;
                }
                self.col_scale[j] *= s;
            }
        }
        for i in 0..m {
            self.b[i] *= self.row_scale[i];
        }
        for j in 0..n {
            let s = self.col_scale[j];
            self.lb[j] /= s;
            self.ub[j] /= s;
            self.cost[j] *= s;
        }
    }

    fn solve(self, p: &LpProblem, opts: &SolverOptions) -> LpSolution {
        let m = self.rows.len();
        let n = self.cols.len();
        let limit = opts.max_iterations.unwrap_or(10_000 + 50 * (m + n));

        let mut core = Core::new(&self, opts);
        let phase1_needed = core.n_artificial > 0;
        let mut status = Status::Optimal;
        let mut why = String::new();

        if phase1_needed {
            let cost1: Vec<f64> = (0..core.ncols)
                .map(|j| if j >= core.first_artificial { 1.0 } else { 0.0 })
                .collect();
            match core.run(&cost1, limit) {
                Ok(PhaseEnd::Optimal) => {}
                Ok(PhaseEnd::Unbounded) => {
                    status = Status::NumericalFailure;
                    why = "phase one reported an unbounded ray".into();
                }
                Err(e) => {
                    status = Status::NumericalFailure;
                    why = e;
                }
            }
            if status == Status::Optimal {
                let infeas: f64 = (core.first_artificial..core.ncols).map(|j| core.x[j].abs()).sum();
                if infeas > opts.feasibility_tol * (1.0 + m as f64).sqrt() {
                    return LpSolution {
                        diagnostics: format!("phase one ended with artificial mass {infeas:.3e}"),
                        ..failed(p, Status::Infeasible, core.iterations, "")
                    };
                }
                for j in core.first_artificial..core.ncols {
                    core.ub[j] = 0.0;
                    core.lb[j] = 0.0;
                    if !core.is_basic(j) {
                        core.x[j] = 0.0;
                    }
                }
            }
        }

        let mut cost2 = vec![0.0; core.ncols];
        for j in 0..n {
            cost2[j] = -self.cost[j];
        }
        if status == Status::Optimal {
            // A final refactorization can expose drift; re-enter the loop if so.
            for _attempt in 0..3 {
                match core.run(&cost2, limit) {
                    Ok(PhaseEnd::Optimal) => {}
                    Ok(PhaseEnd::Unbounded) => {
                        status = Status::Unbounded;
                        break;
                    }
                    Err(e) => {
                        status = Status::NumericalFailure;
                        why = e;
                        break;
                    }
                }
                if let Err(e) = core.refactor() {
                    status = Status::NumericalFailure;
                    why = e;
                    break;
                }
                if core.entering(&cost2, false).is_none() && core.max_basic_infeasibility() <= 10.0 * opts.feasibility_tol {
                    break;
                }
            }
        }

        if status != Status::Optimal {
            return failed(p, status, core.iterations, &why);
        }

        // Unscale.
        let mut x = self.fixed.clone();
        for (k, &j) in self.cols.iter().enumerate() {
            x[j] = core.x[k] * self.col_scale[k];
        }
        let y = core.duals(&cost2);
        let mut duals = vec![0.0; p.n_rows()];
        for (k, &i) in self.rows.iter().enumerate() {
            duals[i] = -y[k] * self.row_scale[k] * self.cost_norm;
        }

        // Final check on the scaled rows.
        let act = p.activities(&x);
        let mut worst = 0.0f64;
        for (k, &i) in self.rows.iter().enumerate() {
            let row = p.rows[i];
            let v = match row.sense {
                Sense::Le => act[i] - row.rhs,
                Sense::Ge => row.rhs - act[i],
                Sense::Eq => (act[i] - row.rhs).abs(),
            };
            let scaled = v * self.row_scale[k] / (1.0 + (row.rhs * self.row_scale[k]).abs());
            worst = worst.max(scaled);
        }
        if worst > 10.0 * opts.feasibility_tol {
            return failed(
                p,
                Status::NumericalFailure,
                core.iterations,
                &format!("final solution violates a scaled row by {worst:.3e}"),
            );
        }

        LpSolution {
            status: Status::Optimal,
            objective: p.evaluate(&x),
            x,
            duals: Some(duals),
            iterations: core.iterations,
            diagnostics: String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Place {
    Basic(usize),
    Lower,
    Upper,
    /// Free nonbasic column held at zero.
    Zero,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Core {
    m: usize,
    ncols: usize,
    first_artificial: usize,
    n_artificial: usize,
    col_start: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    b: Vec<f64>,
    x: Vec<f64>,
    place: Vec<Place>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
    degenerate_run: usize,
    opts: SolverOptions,
}

impl Core {
    fn new(red: &Reduced, opts: &SolverOptions) -> Self {
        let m = red.rows.len();
        let n = red.cols.len();
        let mut col_start = red.col_start.clone();
        let mut row_idx = red.row_idx.clone();
        let mut vals = red.vals.clone();
        let mut lb = red.lb.clone();
        let mut ub = red.ub.clone();

        // Slacks.
        for i in 0..m {
            row_idx.push(i);
            vals.push(1.0);
            col_start.push(row_idx.len());
            let (l, u) = match red.senses[i] {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lb.push(l);
            ub.push(u);
        }

        // Starting point for structurals.
        let mut x = vec![0.0; n + m];
        let mut place = vec![Place::Zero; n + m];
        for j in 0..n {
            (x[j], place[j]) = if lb[j].is_finite() {
                (lb[j], Place::Lower)
            } else if ub[j].is_finite() {
                (ub[j], Place::Upper)
            } else {
                (0.0, Place::Zero)
            };
        }
        let mut resid = red.b.clone();
        for j in 0..n {
            if x[j] != 0.0 {
                for k in col_start[j]..col_start[j + 1] {
                    resid[row_idx[k]] -= vals[k] * x[j];
                }
            }
        }

        let first_artificial = n + m;
        let mut basis = vec![0; m];
        let mut n_artificial = 0;
        for i in 0..m {
            let s = n + i;
            let r = resid[i];
            let tol = opts.feasibility_tol;
            if r >= lb[s] - tol && r <= ub[s] + tol {
                x[s] = r;
                place[s] = Place::Basic(i);
                basis[i] = s;
                continue;
            }
            let (at, pl) = if r < lb[s] { (lb[s], Place::Lower) } else { (ub[s], Place::Upper) };
            x[s] = at;
            place[s] = pl;
            let gap = r - at;
            row_idx.push(i);
            vals.push(gap.signum());
            col_start.push(row_idx.len());
            lb.push(0.0);
            ub.push(f64::INFINITY);
            x.push(gap.abs());
            let a = first_artificial + n_artificial;
            place.push(Place::Basic(i));
            basis[i] = a;
            n_artificial += 1;
        }

        let ncols = first_artificial + n_artificial;
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            // Initial basis columns are +-e_i.
            let j = basis[i];
            binv[i * m + i] = 1.0 / vals[col_start[j]];
        }

        Core {
            m,
            ncols,
            first_artificial,
            n_artificial,
            col_start,
            row_idx,
            vals,
            lb,
            ub,
            b: red.b.clone(),
            x,
            place,
            basis,
            binv,
            since_refactor: 0,
            iterations: 0,
            degenerate_run: 0,
            opts: opts.clone(),
        }
    }

    fn is_basic(&self, j: usize) -> bool {
        matches!(self.place[j], Place::Basic(_))
    }

    fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.col_start[j]..self.col_start[j + 1]).map(move |k| (self.row_idx[k], self.vals[k]))
    }

    /// `y' = c_B' B^{-1}`.
    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for i in 0..m {
            let c = cost[self.basis[i]];
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, bk) in y.iter_mut().zip(row) {
                    *yk += c * bk;
                }
            }
        }
        y
    }

    fn max_basic_infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .map(|&j| (self.lb[j] - self.x[j]).max(self.x[j] - self.ub[j]).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Picks the entering column and its direction (+1 increase, -1 decrease).
    fn entering(&self, cost: &[f64], bland: bool) -> Option<(usize, f64)> {
        let y = self.duals(cost);
        let tol = self.opts.optimality_tol;
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.ncols {
            let dir = match self.place[j] {
                Place::Basic(_) => continue,
                _ if self.lb[j] == self.ub[j] => continue,
                p => {
                    let d = cost[j] - self.column(j).map(|(r, a)| y[r] * a).sum::<f64>();
                    match p {
                        Place::Lower if d < -tol => -d,
                        Place::Upper if d > tol => -d,
                        Place::Zero if d.abs() > tol => -d,
                        _ => continue,
                    }
                }
            };
            if bland {
                return Some((j, dir.signum()));
            }
            if best.is_none_or(|(_, _, score)| dir.abs() > score) {
                best = Some((j, dir.signum(), dir.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// `B^{-1} a_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for (r, a) in self.column(j) {
            for i in 0..m {
                alpha[i] += self.binv[i * m + r] * a;
            }
        }
        alpha
    }

    fn run(&mut self, cost: &[f64], limit: usize) -> std::result::Result<PhaseEnd, String> {
        loop {
            if self.iterations >= limit {
                return Err(format!("iteration limit {limit} reached"));
            }
            if self.since_refactor >= self.opts.refactor_interval {
                self.refactor()?;
            }
            let bland = self.degenerate_run >= self.opts.bland_after;
            let Some((q, dir)) = self.entering(cost, bland) else {
                return Ok(PhaseEnd::Optimal);
            };
            let alpha = self.ftran(q);
            let step = self.ratio_test(q, dir, &alpha, bland);
            let Some((theta, leave)) = step else {
                return Ok(PhaseEnd::Unbounded);
            };
            self.iterations += 1;
            if theta <= 1e-12 {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }

            for i in 0..self.m {
                if alpha[i] != 0.0 {
                    let j = self.basis[i];
                    self.x[j] -= dir * theta * alpha[i];
                }
            }
            self.x[q] += dir * theta;

            match leave {
                None => {
                    // Bound flip.
                    (self.x[q], self.place[q]) = if dir > 0.0 {
                        (self.ub[q], Place::Upper)
                    } else {
                        (self.lb[q], Place::Lower)
                    };
                }
                Some((r, to_upper)) => {
                    let l = self.basis[r];
                    (self.x[l], self.place[l]) = if to_upper {
                        (self.ub[l], Place::Upper)
                    } else {
                        (self.lb[l], Place::Lower)
                    };
                    self.basis[r] = q;
                    self.place[q] = Place::Basic(r);
                    self.pivot(r, &alpha);
                    self.since_refactor += 1;
                }
            }
        }
    }

    /// Returns the step length and the leaving position (`None` for a bound
    /// flip of the entering column), or `None` if the ray is unbounded.
    #[allow(clippy::type_complexity)]
    fn ratio_test(&self, q: usize, dir: f64, alpha: &[f64], bland: bool) -> Option<(f64, Option<(usize, bool)>)> {
        let ftol = self.opts.feasibility_tol;
        let ptol = self.opts.pivot_tol;
        let range = self.ub[q] - self.lb[q];

        // Rate of change of each basic variable per unit step.
        let rate = |i: usize| -dir * alpha[i];
        let limit = |i: usize, relax: f64| -> Option<(f64, bool)> {
            let g = rate(i);
            let j = self.basis[i];
            if g < -ptol && self.lb[j].is_finite() {
                Some(((self.x[j] - self.lb[j] + relax) / -g, false))
            } else if g > ptol && self.ub[j].is_finite() {
                Some(((self.ub[j] - self.x[j] + relax) / g, true))
            } else {
                None
            }
        };

        if bland {
            let mut best: Option<(f64, usize, bool)> = None;
            for i in 0..self.m {
                if let Some((t, up)) = limit(i, 0.0) {
                    let t = t.max(0.0);
                    let better = match best {
                        None => true,
                        Some((bt, bi, _)) => t < bt - 1e-12 || (t <= bt + 1e-12 && self.basis[i] < self.basis[bi]),
                    };
                    if better {
                        best = Some((t, i, up));
                    }
                }
            }
            return match best {
                Some((t, _, _)) if range <= t => Some((range, None)),
                Some((t, i, up)) => Some((t, Some((i, up)))),
                None if range.is_finite() => Some((range, None)),
                None => None,
            };
        }

        let mut theta_max = f64::INFINITY;
        for i in 0..self.m {
            if let Some((t, _)) = limit(i, ftol) {
                theta_max = theta_max.min(t);
            }
        }
        if theta_max == f64::INFINITY {
            return if range.is_finite() { Some((range, None)) } else { None };
        }
        if range <= theta_max {
            return Some((range, None));
        }
        let mut best: Option<(usize, f64, f64, bool)> = None;
        for i in 0..self.m {
            if let Some((t, up)) = limit(i, 0.0) {
                if t <= theta_max {
                    let g = rate(i).abs();
                    if best.is_none_or(|(_, bg, _, _)| g > bg) {
                        best = Some((i, g, t, up));
                    }
                }
            }
        }
        let (i, _, t, up) = best?;
        Some((t.max(0.0), Some((i, up))))
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let p = alpha[r];
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (prow, after) = rest.split_at_mut(m);
        for v in prow.iter_mut() {
            *v /= p;
        }
        for (i, row) in before.chunks_mut(m).enumerate() {
            let f = alpha[i];
            if f != 0.0 {
                for (a, b) in row.iter_mut().zip(prow.iter()) {
                    *a -= f * b;
                }
            }
        }
        for (k, row) in after.chunks_mut(m).enumerate() {
            let f = alpha[r + 1 + k];
            if f != 0.0 {
                for (a, b) in row.iter_mut().zip(prow.iter()) {
                    *a -= f * b;
                }
            }
        }
    }

    /// Rebuilds `B^{-1}` by Gauss-Jordan elimination and recomputes basic values.
    fn refactor(&mut self) -> std::result::Result<(), String> {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        // [B | I] row-major, width 2m.
        let w = 2 * m;
        let mut aug = vec![0.0; m * w];
        for (pos, &j) in self.basis.iter().enumerate() {
            for (r, a) in self.column(j) {
                aug[r * w + pos] = a;
            }
        }
        for i in 0..m {
            aug[i * w + m + i] = 1.0;
        }
        for c in 0..m {
            let mut piv = c;
            let mut best = aug[c * w + c].abs();
            for r in c + 1..m {
                let v = aug[r * w + c].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-12 {
                return Err(format!("basis is singular at column {c}"));
            }
            if piv != c {
                for k in 0..w {
                    aug.swap(c * w + k, piv * w + k);
                }
            }
            let p = aug[c * w + c];
            for k in 0..w {
                aug[c * w + k] /= p;
            }
            let prow: Vec<f64> = aug[c * w..(c + 1) * w].to_vec();
            for r in 0..m {
                if r != c {
                    let f = aug[r * w + c];
                    if f != 0.0 {
                        let row = &mut aug[r * w..(r + 1) * w];
                        for k in c..w {
                            row[k] -= f * prow[k];
                        }
                    }
                }
            }
        }
        for i in 0..m {
            self.binv[i * m..(i + 1) * m].copy_from_slice(&aug[i * w + m..(i + 1) * w]);
        }

        let mut rhs = self.b.clone();
        for j in 0..self.ncols {
            if !self.is_basic(j) && self.x[j] != 0.0 {
                for (r, a) in self.column(j) {
                    rhs[r] -= a * self.x[j];
                }
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            let v: f64 = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
            self.x[self.basis[i]] = v;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Sense;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn single_variable() {
        let mut p = LpProblem::new(1);
        p.objective[0] = 1.0;
        p.add_row([(0, 1.0)], Sense::Le, 3.0);
        let s = solve(&p, &opts()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.x[0] - 3.0).abs() < 1e-12);
        assert!((s.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_two_variables() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
        let mut p = LpProblem::new(2);
        p.objective = vec![3.0, 5.0];
        p.add_row([(0, 1.0)], Sense::Le, 4.0);
        p.add_row([(1, 2.0)], Sense::Le, 12.0);
        p.add_row([(0, 3.0), (1, 2.0)], Sense::Le, 18.0);
        let s = solve(&p, &opts()).unwrap();
        assert!(s.is_optimal());
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        let dual = s.dual_objective(&p).unwrap();
        assert!((dual - 36.0).abs() < 1e-7);
    }

    #[test]
    fn equality_and_ge_rows_need_phase_one() {
        // max -x - y, x + y = 2, x - y >= 1 -> any point with x+y=2, x>=1.5: objective -2.
        let mut p = LpProblem::new(2);
        p.objective = vec![-1.0, -1.0];
        p.add_row([(0, 1.0), (1, 1.0)], Sense::Eq, 2.0);
        p.add_row([(0, 1.0), (1, -1.0)], Sense::Ge, 1.0);
        let s = solve(&p, &opts()).unwrap();
        assert!(s.is_optimal());
        assert!((s.objective + 2.0).abs() < 1e-9);
        assert!(p.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        let mut p = LpProblem::new(1);
        p.add_row([(0, 1.0)], Sense::Ge, 2.0);
        p.add_row([(0, 1.0)], Sense::Le, 1.0);
        assert_eq!(solve(&p, &opts()).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut p = LpProblem::new(2);
        p.objective = vec![1.0, 0.0];
        p.add_row([(0, 1.0), (1, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve(&p, &opts()).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn free_and_upper_bounded_columns() {
        // max x + y, x free, y <= 2, x - y <= 1, -x - y <= 10.
        let mut p = LpProblem::new(2);
        p.objective = vec![1.0, 1.0];
        p.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        p.set_bounds(1, f64::NEG_INFINITY, 2.0);
        p.add_row([(0, 1.0), (1, -1.0)], Sense::Le, 1.0);
        p.add_row([(0, -1.0), (1, -1.0)], Sense::Le, 10.0);
        let s = solve(&p, &opts()).unwrap();
        assert!(s.is_optimal());
        assert!((s.objective - 5.0).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn fixed_columns_are_substituted() {
        let mut p = LpProblem::new(3);
        p.objective = vec![1.0, 2.0, 0.5];
        p.fix(0, 4.0);
        p.fix(2, -1.0);
        p.add_row([(0, 1.0), (1, 1.0), (2, 1.0)], Sense::Le, 10.0);
        let s = solve(&p, &opts()).unwrap();
        assert!(s.is_optimal());
        assert_eq!(s.x[0], 4.0);
        assert_eq!(s.x[2], -1.0);
        assert!((s.x[1] - 7.0).abs() < 1e-9);
        assert!((s.objective - (4.0 + 14.0 - 0.5)).abs() < 1e-9);
    }

    #[test]
    fn inconsistent_fixed_row_is_infeasible() {
        let mut p = LpProblem::new(1);
        p.fix(0, 3.0);
        p.add_row([(0, 1.0)], Sense::Le, 2.0);
        assert_eq!(solve(&p, &opts()).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn infinite_rhs_rows_are_vacuous() {
        let mut p = LpProblem::new(1);
        p.objective[0] = 1.0;
        p.add_row([(0, 1.0)], Sense::Le, f64::INFINITY);
        p.add_row([(0, 1.0)], Sense::Le, 5.0);
        let s = solve(&p, &opts()).unwrap();
        assert!((s.objective - 5.0).abs() < 1e-12);
    }

    #[test]
    fn no_rows() {
        let mut p = LpProblem::new(2);
        p.objective = vec![1.0, -1.0];
        p.set_bounds(0, 0.0, 2.0);
        p.set_bounds(1, -3.0, 4.0);
        let s = solve(&p, &opts()).unwrap();
        assert!(s.is_optimal());
        assert!((s.objective - 5.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling LP (as maximization); optimum 1/20.
        let mut p = LpProblem::new(4);
        p.objective = vec![0.75, -150.0, 0.02, -6.0];
        p.add_row([(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Sense::Le, 0.0);
        p.add_row([(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Sense::Le, 0.0);
        p.add_row([(2, 1.0)], Sense::Le, 1.0);
        let s = solve(&p, &opts()).unwrap();
        assert!(s.is_optimal());
        assert!((s.objective - 0.05).abs() < 1e-9, "{}", s.objective);
    }

    #[test]
    fn deterministic() {
        let mut p = LpProblem::new(3);
        p.objective = vec![1.0, 1.0, 1.0];
        p.add_row([(0, 1.0), (1, 1.0)], Sense::Le, 1.0);
        p.add_row([(1, 1.0), (2, 1.0)], Sense::Le, 1.0);
        p.add_row([(0, 1.0), (2, 1.0)], Sense::Le, 1.0);
        let a = solve(&p, &opts()).unwrap();
        let b = solve(&p, &opts()).unwrap();
        assert_eq!(a, b);
        assert!((a.objective - 1.5).abs() < 1e-9);
    }
}
