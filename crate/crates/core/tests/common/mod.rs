//! Independent reference implementations shared by the integration tests:
//! a vertex-enumeration LP solver and a brute-force dispatch search over a
//! lattice of vehicle moves with its own one-step fleet simulator.

#![allow(dead_code)]

use aev_dispatch::grid::{FleetState, NodeId, SoeGrid};
use aev_dispatch::lp::{LpProblem, Sense};
use aev_dispatch::scenario::{DemandProfile, FareMode, OdTable, PriceTable, Quantization, ScenarioSpec, VehicleParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Vertex enumeration
// ---------------------------------------------------------------------------

/// Result of exhaustively enumerating the basic solutions of an LP.
#[derive(Debug, Clone, PartialEq)]
pub enum VertexResult {
    Optimal(f64),
    Infeasible,
}

/// Equality-form restatement `max c'y + c0, A y = b, y >= 0` of an [`LpProblem`].
struct EqualityForm {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    c0: f64,
}

fn equality_form(p: &LpProblem) -> EqualityForm {
    // Each original column becomes `shift + sign * y` (or `y+ - y-` if free).
    // `terms[j]` lists (new column, sign) and `shift[j]` the constant part.
    let mut terms: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut shift = Vec::new();
    let mut n_y = 0;
    let mut extra_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for j in 0..p.n_cols() {
        let (l, u) = (p.lower[j], p.upper[j]);
        if l.is_finite() {
            terms.push(vec![(n_y, 1.0)]);
            shift.push(l);
            if u.is_finite() {
                extra_rows.push((vec![(n_y, 1.0)], u - l));
            }
            n_y += 1;
        } else if u.is_finite() {
            terms.push(vec![(n_y, -1.0)]);
            shift.push(u);
            n_y += 1;
        } else {
            terms.push(vec![(n_y, 1.0), (n_y + 1, -1.0)]);
            shift.push(0.0);
            n_y += 2;
        }
    }

    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    let mut dense: Vec<Vec<f64>> = vec![vec![0.0; p.n_cols()]; p.n_rows()];
    for &(r, c, a) in &p.entries {
        dense[r][c] += a;
    }
    for (row, coeffs) in p.rows.iter().zip(&dense) {
        if row.rhs.is_infinite() {
            continue;
        }
        let mut y = vec![0.0; n_y];
        let mut rhs = row.rhs;
        for (j, &a) in coeffs.iter().enumerate() {
            rhs -= a * shift[j];
            for &(col, sign) in &terms[j] {
                y[col] += a * sign;
            }
        }
        rows.push((y, row.sense, rhs));
    }
    for (coeffs, rhs) in extra_rows {
        let mut y = vec![0.0; n_y];
        for (col, a) in coeffs {
            y[col] = a;
        }
        rows.push((y, Sense::Le, rhs));
    }

    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let width = n_y + n_slack;
    let mut a = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    let mut slack = n_y;
    for (mut y, sense, rhs) in rows {
        y.resize(width, 0.0);
        match sense {
            Sense::Le => {
                y[slack] = 1.0;
                slack += 1;
            }
            Sense::Ge => {
                y[slack] = -1.0;
                slack += 1;
            }
            Sense::Eq => {}
        }
        a.push(y);
        b.push(rhs);
    }
    let mut c = vec![0.0; width];
    let mut c0 = 0.0;
    for j in 0..p.n_cols() {
        c0 += p.objective[j] * shift[j];
        for &(col, sign) in &terms[j] {
            c[col] += p.objective[j] * sign;
        }
    }
    EqualityForm { a, b, c, c0 }
}

/// Number of bases the oracle would examine for `p`.
pub fn basis_count(p: &LpProblem) -> f64 {
    let f = equality_form(p);
    binomial(f.c.len(), f.b.len())
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
fn solve_dense(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for k in col..n {
                        m[r][k] -= f * m[col][k];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Removes linearly dependent rows of `A y = b`. Returns `false` if they
/// are inconsistent (no solution at all, let alone a nonnegative one).
fn drop_dependent_rows(f: &mut EqualityForm) -> bool {
    let width = f.c.len();
    let mut basis_rows: Vec<(Vec<f64>, f64, usize)> = Vec::new(); // reduced row, rhs, pivot column
    let mut keep = Vec::new();
    for (r, (row, &rhs)) in f.a.iter().zip(&f.b).enumerate() {
        let mut v = row.clone();
        let mut b = rhs;
        for (br, bb, pc) in &basis_rows {
            let factor = v[*pc] / br[*pc];
            if factor != 0.0 {
                for k in 0..width {
                    v[k] -= factor * br[k];
                }
                b -= factor * bb;
            }
        }
        let scale = row.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        match (0..width).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())) {
            Some(pc) if v[pc].abs() > 1e-9 * scale => {
                basis_rows.push((v, b, pc));
                keep.push(r);
            }
            _ => {
                if b.abs() > 1e-9 * rhs.abs().max(1.0) {
                    return false;
                }
            }
        }
    }
    f.a = keep.iter().map(|&r| f.a[r].clone()).collect();
    f.b = keep.iter().map(|&r| f.b[r]).collect();
    true
}

/// Maximizes `p` by trying every basis of its equality form.
///
/// Only valid for bounded problems; callers guarantee boundedness by
/// construction (box bounds or an explicit bounding row).
pub fn vertex_enumeration(p: &LpProblem) -> VertexResult {
    let mut f = equality_form(p);
    if !drop_dependent_rows(&mut f) {
        return VertexResult::Infeasible;
    }
    let m = f.b.len();
    let width = f.c.len();
    if m == 0 {
        // Every column sits at zero in the equality form (bounded problem).
        return VertexResult::Optimal(f.c0);
    }
    let mut best: Option<f64> = None;
    let mut basis: Vec<usize> = (0..m).collect();
    loop {
        let mat: Vec<Vec<f64>> = (0..m).map(|r| basis.iter().map(|&c| f.a[r][c]).collect()).collect();
        if let Some(xb) = solve_dense(mat, f.b.clone()) {
            if xb.iter().all(|&v| v >= -1e-9) {
                let obj = f.c0 + basis.iter().zip(&xb).map(|(&c, &v)| f.c[c] * v).sum::<f64>();
                best = Some(best.map_or(obj, |b: f64| b.max(obj)));
            }
        }
        // Next combination in lexicographic order.
        let mut i = m;
        loop {
            if i == 0 {
                return best.map_or(VertexResult::Infeasible, VertexResult::Optimal);
            }
            i -= 1;
            if basis[i] < width - m + i {
                basis[i] += 1;
                for k in i + 1..m {
                    basis[k] = basis[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Families of random LPs, all bounded by construction.
#[derive(Debug, Clone, Copy)]
pub enum LpFamily {
    /// `x >= 0`, `<=` rows with nonnegative rhs, plus a bounding row.
    Packing,
    /// Box bounds (some negative), mixed row senses; may be infeasible.
    Mixed,
    /// Free columns boxed in by explicit rows, plus fixed columns.
    FreeColumns,
    /// Many zero right-hand sides and duplicated rows.
    Degenerate,
}

pub const LP_FAMILIES: [LpFamily; 4] = [LpFamily::Packing, LpFamily::Mixed, LpFamily::FreeColumns, LpFamily::Degenerate];

fn small_int(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> f64 {
    rng.random_range(lo..=hi) as f64
}

/// Draws a random LP of the given family with at most `max_cols` columns,
/// keeping the number of bases small enough to enumerate.
pub fn random_lp(seed: u64, family: LpFamily, max_cols: usize) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(2..=max_cols);
        let max_rows = match n {
            0..=6 => 6,
            7..=10 => 4,
            11..=15 => 3,
            _ => 2,
        };
        let m = rng.random_range(1..=max_rows);
        let p = match family {
            LpFamily::Packing => {
                let mut p = LpProblem::new(n);
                p.objective = (0..n).map(|_| small_int(&mut rng, -3, 9)).collect();
                for _ in 0..m {
                    let coeffs: Vec<(usize, f64)> = (0..n)
                        .filter_map(|j| rng.random_bool(0.7).then(|| (j, small_int(&mut rng, 0, 6))))
                        .collect();
                    p.add_row(coeffs, Sense::Le, small_int(&mut rng, 1, 20));
                }
                p.add_row((0..n).map(|j| (j, 1.0)), Sense::Le, 25.0);
                p
            }
            LpFamily::Mixed => {
                let mut p = LpProblem::new(n);
                p.objective = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
                for j in 0..n {
                    let lo = small_int(&mut rng, -4, 1);
                    let hi = lo + small_int(&mut rng, 0, 6);
                    p.set_bounds(j, lo, hi);
                }
                for _ in 0..m {
                    let coeffs: Vec<(usize, f64)> = (0..n)
                        .filter_map(|j| rng.random_bool(0.6).then(|| (j, rng.random_range(-4.0..4.0))))
                        .collect();
                    let sense = match rng.random_range(0..3) {
                        0 => Sense::Le,
                        1 => Sense::Ge,
                        _ => Sense::Eq,
                    };
                    p.add_row(coeffs, sense, rng.random_range(-6.0..6.0));
                }
                p
            }
            LpFamily::FreeColumns => {
                let n = n.min(8);
                let mut p = LpProblem::new(n);
                p.objective = (0..n).map(|_| small_int(&mut rng, -5, 5)).collect();
                let mut free = 0;
                for j in 0..n {
                    match rng.random_range(0..3) {
                        0 if free < 2 => {
                            p.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
                            p.add_row([(j, 1.0)], Sense::Le, 5.0);
                            p.add_row([(j, 1.0)], Sense::Ge, -5.0);
                            free += 1;
                        }
                        1 => p.fix(j, small_int(&mut rng, -2, 2)),
                        _ => p.set_bounds(j, 0.0, small_int(&mut rng, 1, 5)),
                    }
                }
                let coeffs: Vec<(usize, f64)> = (0..n).map(|j| (j, small_int(&mut rng, -2, 2))).collect();
                p.add_row(coeffs, Sense::Le, small_int(&mut rng, 0, 6));
                p
            }
            LpFamily::Degenerate => {
                let mut p = LpProblem::new(n);
                p.objective = (0..n).map(|_| small_int(&mut rng, -2, 4)).collect();
                let mut rows: Vec<(Vec<(usize, f64)>, Sense, f64)> = Vec::new();
                for _ in 0..m {
                    let coeffs: Vec<(usize, f64)> = (0..n)
                        .filter_map(|j| rng.random_bool(0.6).then(|| (j, small_int(&mut rng, -2, 3))))
                        .collect();
                    let rhs = if rng.random_bool(0.6) { 0.0 } else { small_int(&mut rng, 1, 4) };
                    let sense = if rng.random_bool(0.3) { Sense::Eq } else { Sense::Le };
                    rows.push((coeffs, sense, rhs));
                }
                if rng.random_bool(0.5) {
                    // A redundant copy (scaled) of the first row.
                    let (c, s, r) = rows[0].clone();
                    rows.push((c.into_iter().map(|(j, a)| (j, 2.0 * a)).collect(), s, 2.0 * r));
                }
                for (c, s, r) in rows {
                    p.add_row(c, s, r);
                }
                for j in 0..n {
                    p.set_bounds(j, 0.0, 3.0);
                }
                p
            }
        };
        if basis_count(&p) <= 150_000.0 {
            return p;
        }
    }
}

// ---------------------------------------------------------------------------
// Dispatch lattice oracle
// ---------------------------------------------------------------------------

pub const TINY_DX: f64 = 0.5;
pub const TINY_HORIZON: usize = 2;

/// A tiny dispatch instance: every vehicle starts idle, with whole numbers of
/// vehicles per (node, SOE point).
#[derive(Debug, Clone)]
pub struct TinyInstance {
    pub scenario: ScenarioSpec,
    /// Idle vehicles per node per SOE point at step 0.
    pub idle: Vec<Vec<f64>>,
}

impl TinyInstance {
    pub fn initial_state(&self) -> FleetState {
        let g = &self.scenario.grid;
        let mut s = FleetState::zeros(self.idle.len(), g);
        for (i, row) in self.idle.iter().enumerate() {
            for (k, &count) in row.iter().enumerate() {
                s.v[i][k] = count / g.dx;
            }
        }
        s
    }
}

/// Energy one vehicle moves in one step at rated power, kWh.
pub fn kwh_per_vehicle_step(s: &ScenarioSpec) -> f64 {
    s.vehicle.power_kw * s.grid.dt_minutes / 60.0
}

/// Random tiny instance with 1 or 2 nodes, 3 SOE points and a 2-step horizon.
///
/// Demands are whole trips and whole multiples of one vehicle-step of energy.
pub fn random_tiny_instance(seed: u64) -> TinyInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = if rng.random_bool(0.5) { 1 } else { 2 };
    let steps = 2;
    let grid = SoeGrid::with_dx(TINY_DX, 10.0, TINY_HORIZON, steps).expect("tiny grid");
    let vehicle = VehicleParams::default();
    let nb = grid.n_bins;

    // Durations either fit within one step or overrun the window; energies
    // cost one or two SOE intervals.
    let raw: Vec<(f64, f64)> = (0..n * n)
        .map(|_| {
            let kwh = if rng.random_bool(0.7) { rng.random_range(0.3..4.9) } else { rng.random_range(5.1..9.9) };
            let secs = if rng.random_bool(0.75) { rng.random_range(200.0..600.0) } else { rng.random_range(601.0..1100.0) };
            (kwh, secs)
        })
        .collect();
    let od = OdTable::new(n, &raw, &grid, vehicle.battery_kwh, Quantization::Ceiling).expect("tiny trips");

    let fares: Vec<f64> = (0..n * n).map(|_| small_int(&mut rng, 1, 15)).collect();
    let outage: Vec<f64> = (0..n).map(|_| small_int(&mut rng, 1, 30)).collect();
    let prices = PriceTable {
        outage_per_kwh: outage.clone(),
        outage_per_step: outage.iter().map(|p| p * 7.0 / 6.0).collect(),
        fare_per_kwh: fares.clone(),
        fare_per_step: fares,
        grid_price: 0.25,
    };

    let e = kwh_per_vehicle_step(&ScenarioSpec {
        label: String::new(),
        nodes: Vec::new(),
        grid,
        vehicle,
        quantization: Quantization::Ceiling,
        fare_mode: FareMode::PerTrip,
        od: od.clone(),
        prices: prices.clone(),
        demand: DemandProfile::zeros(0, 0),
        fleet_size: 0.0,
        initial_weights: Vec::new(),
    });
    let len = steps + TINY_HORIZON;
    let power_kwh: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..len).map(|_| small_int(&mut rng, 0, 3) * e).collect())
        .collect();
    let mobility_raw: Vec<Vec<f64>> = (0..n * n).map(|_| (0..len).map(|_| small_int(&mut rng, 0, 2)).collect()).collect();

    // Vehicle placement: one node gets 0-2 vehicles per point; two nodes get
    // a single vehicle at three random (node, point) cells.
    let mut idle = vec![vec![0.0; nb]; n];
    if n == 1 {
        for k in 0..nb {
            idle[0][k] = small_int(&mut rng, 0, 2);
        }
    } else {
        for _ in 0..3 {
            let i = rng.random_range(0..n);
            let k = rng.random_range(0..nb);
            idle[i][k] += 1.0;
        }
    }
    let fleet: f64 = idle.iter().flatten().sum();

    let scenario = ScenarioSpec {
        label: format!("tiny-{seed}"),
        nodes: (0..n).map(|i| NodeId::new(format!("N{i}"))).collect(),
        grid,
        vehicle,
        quantization: Quantization::Ceiling,
        fare_mode: FareMode::PerTrip,
        od,
        prices,
        demand: DemandProfile {
            power_kwh,
            mobility_raw,
            mobility_scale: 1.0,
        },
        fleet_size: fleet,
        initial_weights: vec![1.0 / n as f64; n],
    };
    TinyInstance { scenario, idle }
}

/// What a parked vehicle can be told to do in the first step.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Move {
    Charge,
    Discharge,
    Carry(usize),
    Reposition(usize),
}

/// Vehicle counts per category for one node after a step.
#[derive(Debug, Clone, Default)]
struct NodeState {
    charging: Vec<f64>,
    idle: Vec<f64>,
    discharging: Vec<f64>,
}

/// Plain-counts simulator for one step starting from an all-idle fleet.
///
/// Charging and discharging vehicles move up or down one SOE interval with
/// probability given by the Courant number; a vehicle on a trip lands at the
/// destination `delta_bins` lower, `delta_steps` later.
fn simulate_first_step(inst: &TinyInstance, moves: &[(usize, usize, Move, f64)]) -> Vec<NodeState> {
    let s = &inst.scenario;
    let n = s.n_nodes();
    let nb = s.grid.n_bins;
    let mut next: Vec<NodeState> = (0..n)
        .map(|_| NodeState {
            charging: vec![0.0; nb],
            idle: vec![0.0; nb],
            discharging: vec![0.0; nb],
        })
        .collect();
    for i in 0..n {
        next[i].idle.clone_from(&inst.idle[i]);
    }
    for &(i, k, mv, count) in moves {
        next[i].idle[k] -= count;
        match mv {
            Move::Charge => next[i].charging[k] += count,
            Move::Discharge => next[i].discharging[k] += count,
            Move::Carry(j) | Move::Reposition(j) => {
                let e = s.od.get(i, j);
                if e.delta_steps == 1 {
                    next[j].idle[k - e.delta_bins] += count;
                }
            }
        }
    }
    next
}

/// Realized two-step revenue of a first-step plan, per the realized-revenue
/// rules: served = min(offered, demanded) for trips and outage energy, and
/// every charging vehicle draws rated power from the grid.
fn realized_revenue(inst: &TinyInstance, moves: &[(usize, usize, Move, f64)]) -> f64 {
    let s = &inst.scenario;
    let n = s.n_nodes();
    let e = kwh_per_vehicle_step(s);
    let mut total = 0.0;

    // Step 0: nobody is charging or discharging yet; trips depart.
    let mut carried = vec![0.0; n * n];
    for &(i, _, mv, count) in moves {
        if let Move::Carry(j) = mv {
            carried[i * n + j] += count;
        }
    }
    for pair in 0..n * n {
        let served = carried[pair].min(s.demand.mobility(pair, 0));
        total += s.fare_mode.trip_revenue(s.prices.fare_per_step[pair], served, s.grid.dt_minutes);
    }

    // Step 1: energy flows of the vehicles placed in the first step. No trip
    // departing now could land before the run ends.
    let next = simulate_first_step(inst, moves);
    for (i, ns) in next.iter().enumerate() {
        let offered = e * ns.discharging.iter().sum::<f64>();
        total += s.prices.outage_per_kwh[i] * offered.min(s.demand.power(i, 1));
        total -= s.prices.grid_price * e * ns.charging.iter().sum::<f64>();
    }
    total
}

/// Moves available to a vehicle parked at `(i, k)` in the first step.
fn moves_at(s: &ScenarioSpec, i: usize, k: usize) -> Vec<Move> {
    let n = s.n_nodes();
    let top = s.grid.n_bins - 1;
    let mut out = Vec::new();
    if k < top {
        out.push(Move::Charge);
    }
    if k > 0 {
        out.push(Move::Discharge);
    }
    for j in 0..n {
        let e = s.od.get(i, j);
        // The trip must leave from a high enough SOE and land inside the window.
        if k >= e.delta_bins && e.delta_steps < TINY_HORIZON {
            out.push(Move::Carry(j));
            out.push(Move::Reposition(j));
        }
    }
    out
}

/// Best realized revenue over all first-step plans whose vehicle counts are
/// multiples of `unit`. Returns the value and the number of plans examined.
///
/// Controls in the final step of the run only shape the state after it ends
/// and earn nothing, so they are held at zero.
pub fn lattice_optimum(inst: &TinyInstance, unit: f64) -> (f64, usize) {
    let s = &inst.scenario;
    let cells: Vec<(usize, usize, Vec<Move>, usize)> = inst
        .idle
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(k, &c)| (i, k, c)))
        .filter(|&(_, _, c)| c > 0.0)
        .map(|(i, k, c)| (i, k, moves_at(s, i, k), (c / unit).round() as usize))
        .collect();

    let mut best = f64::NEG_INFINITY;
    let mut count = 0;
    let mut plan: Vec<(usize, usize, Move, f64)> = Vec::new();
    search(inst, &cells, 0, 0, unit, &mut plan, &mut best, &mut count);
    (best, count)
}

#[allow(clippy::too_many_arguments)]
fn search(
    inst: &TinyInstance,
    cells: &[(usize, usize, Vec<Move>, usize)],
    cell: usize,
    mv: usize,
    unit: f64,
    plan: &mut Vec<(usize, usize, Move, f64)>,
    best: &mut f64,
    count: &mut usize,
) {
    if cell == cells.len() {
        *count += 1;
        *best = best.max(realized_revenue(inst, plan));
        return;
    }
    let (i, k, ref moves, units) = cells[cell];
    if mv == moves.len() {
        // Remaining vehicles of this cell stay idle.
        search(inst, cells, cell + 1, 0, unit, plan, best, count);
        return;
    }
    let used: usize = plan
        .iter()
        .filter(|p| p.0 == i && p.1 == k)
        .map(|p| (p.3 / unit).round() as usize)
        .sum();
    for take in 0..=units - used {
        if take > 0 {
            plan.push((i, k, moves[mv], take as f64 * unit));
        }
        search(inst, cells, cell, mv + 1, unit, plan, best, count);
        if take > 0 {
            plan.pop();
        }
    }
}

/// Refines the lattice (1, 1/2, 1/4, ... vehicles) until two successive
/// optima agree, or the search would exceed `max_plans`.
/// Returns `(optimum, finest unit, stable)`.
pub fn refined_lattice_optimum(inst: &TinyInstance, max_plans: usize) -> (f64, f64, bool) {
    let mut unit = 1.0;
    let (mut prev, mut plans) = lattice_optimum(inst, unit);
    loop {
        // Each halving multiplies the plan count by roughly 2^(moves).
        if plans.saturating_mul(64) > max_plans && unit < 1.0 {
            return (prev, unit, false);
        }
        unit /= 2.0;
        let (v, c) = lattice_optimum(inst, unit);
        plans = c;
        if (v - prev).abs() <= 1e-9 * v.abs().max(1.0) {
            return (v, unit, true);
        }
        prev = v;
        if unit < 1.0 / 16.0 {
            return (prev, unit, false);
        }
    }
}
