//! Receding-horizon simulation: build the window LP from the current state,
//! solve it, apply its first-step controls through the forward simulator,
//! advance, and log what was served.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

pub use crate::dispatch::{ArrivalMode, BuildOptions, DemandVisibility};
use crate::dispatch::{build_lp, extract_controls};
use crate::dynamics::{state_census, step, Census, ChargeRates, ControlVector};
use crate::error::{Error, Result};
use crate::grid::{init_uniform_idle, total_vehicles, FleetState, SoeGrid};
use crate::lp::{solve, SolverOptions};
use crate::scenario::ScenarioSpec;

/// How often the window LP is re-solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    /// Re-solve every step and apply only the first step of each window.
    #[default]
    RollByOne,
    /// Solve once per window and apply all of its steps.
    Block,
}

impl std::str::FromStr for SolveMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "roll" | "roll-by-one" => Ok(SolveMode::RollByOne),
            "block" => Ok(SolveMode::Block),
            other => Err(format!("unknown solve mode {other:?} (roll-by-one | block)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOptions {
    pub solve_mode: SolveMode,
    /// Window LP construction (demand visibility, arrival encoding, tie-break).
    pub build: BuildOptions,
    pub solver: SolverOptions,
}

/// What happened during one simulated step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// Vehicle counts at the start of the step.
    pub census: Census,
    /// Per node, kWh.
    pub power_demanded_kwh: Vec<f64>,
    pub power_served_kwh: Vec<f64>,
    pub power_unserved_kwh: Vec<f64>,
    /// Per ordered pair (`origin * n + destination`), trips.
    pub trips_demanded: Vec<f64>,
    pub trips_served: Vec<f64>,
    pub trips_unserved: Vec<f64>,
    /// Grid energy drawn by charging vehicles, kWh.
    pub charged_kwh: f64,
    pub v2b_revenue: f64,
    pub trips_revenue: f64,
    pub g2v_cost: f64,
    pub total: f64,
    /// Optimal objective of the window solved at this step, if one was.
    pub window_objective: Option<f64>,
    pub lp_iterations: usize,
    /// Vehicles moved by the round-off repair of the applied controls.
    pub control_repair: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTotals {
    pub v2b_revenue: f64,
    pub trips_revenue: f64,
    pub g2v_cost: f64,
    pub total: f64,
    pub power_served_kwh: f64,
    pub power_demanded_kwh: f64,
    pub trips_served: f64,
    pub trips_demanded: f64,
    pub charged_kwh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub label: String,
    pub fleet_size: f64,
    pub nodes: Vec<String>,
    pub grid: SoeGrid,
    pub steps: Vec<StepRecord>,
    pub totals: RunTotals,
    /// Census after the last step.
    pub final_census: Census,
    pub initial_vehicles: f64,
    pub final_vehicles: f64,
    /// Largest relative deviation of the vehicle count from its initial value.
    pub max_relative_drift: f64,
}

impl RunLog {
    /// Sums the per-step entries.
    pub fn recompute_totals(steps: &[StepRecord]) -> RunTotals {
        let mut t = RunTotals::default();
        for s in steps {
            t.v2b_revenue += s.v2b_revenue;
            t.trips_revenue += s.trips_revenue;
            t.g2v_cost += s.g2v_cost;
            t.total += s.total;
            t.power_served_kwh += s.power_served_kwh.iter().sum::<f64>();
            t.power_demanded_kwh += s.power_demanded_kwh.iter().sum::<f64>();
            t.trips_served += s.trips_served.iter().sum::<f64>();
            t.trips_demanded += s.trips_demanded.iter().sum::<f64>();
            t.charged_kwh += s.charged_kwh;
        }
        t
    }
}

/// Simulates `scenario` from an all-idle fleet spread by its initial weights.
pub fn run(scenario: &ScenarioSpec, opts: &RunOptions) -> Result<RunLog> {
    scenario.validate()?;
    let state = init_uniform_idle(
        scenario.fleet_size,
        &scenario.grid,
        scenario.n_nodes(),
        &scenario.initial_weights,
    )?;
    run_from(scenario, state, opts)
}

/// Simulates `scenario` from an arbitrary starting state.
pub fn run_from(scenario: &ScenarioSpec, mut state: FleetState, opts: &RunOptions) -> Result<RunLog> {
    scenario.validate()?;
    let grid = scenario.grid;
    let rates = scenario.charge_rates()?;
    let n = scenario.n_nodes();
    let nb = grid.n_bins;
    let h = grid.horizon_steps;
    let build = opts.build;
    let kwh_per_density = scenario.vehicle.power_kw * grid.dx * grid.dt_minutes / 60.0;
    let initial = total_vehicles(&state, &grid)?;
    let mut max_drift: f64 = 0.0;
    let mut steps = Vec::with_capacity(grid.n_sim_steps);
    let mut plan: Option<(crate::dispatch::DispatchLp, Vec<f64>)> = None;

    for t in 0..grid.n_sim_steps {
        let offset = match opts.solve_mode {
            SolveMode::RollByOne => 0,
            SolveMode::Block => t % h,
        };
        let mut window_objective = None;
        let mut lp_iterations = 0;
        if offset == 0 {
            state.step = t;
            let lp = build_lp(&state, scenario, t, &rates, &build)?;
            let sol = solve(&lp.problem, &opts.solver)?;
            if !sol.is_optimal() {
                return Err(Error::Solver {
                    step: t,
                    status: sol.status.to_string(),
                    diagnostics: format!(
                        "{} ({} columns, {} rows, {} iterations)",
                        sol.diagnostics,
                        lp.problem.n_cols(),
                        lp.problem.n_rows(),
                        sol.iterations
                    ),
                });
            }
            log::debug!(
                "step {t}: window objective {:.3} after {} iterations",
                sol.objective,
                sol.iterations
            );
            window_objective = Some(sol.objective);
            lp_iterations = sol.iterations;
            plan = Some((lp, sol.x));
        }
        let (lp, x) = plan.as_ref().expect("a window has been solved");
        let mut ctrl = extract_controls(x, &lp.index, offset)?;
        let control_repair = repair_controls(&state, &mut ctrl, &rates, scenario);
        if control_repair > 1e-6 * scenario.fleet_size.max(1.0) {
            log::warn!("step {t}: repaired {control_repair:.3e} vehicles of solver round-off");
        }

        // Realized quantities for this step.
        let census = state_census(&state, &grid)?;
        let mut rec = StepRecord {
            step: t,
            census,
            power_demanded_kwh: vec![0.0; n],
            power_served_kwh: vec![0.0; n],
            power_unserved_kwh: vec![0.0; n],
            trips_demanded: vec![0.0; n * n],
            trips_served: vec![0.0; n * n],
            trips_unserved: vec![0.0; n * n],
            charged_kwh: 0.0,
            v2b_revenue: 0.0,
            trips_revenue: 0.0,
            g2v_cost: 0.0,
            total: 0.0,
            window_objective,
            lp_iterations,
            control_repair,
        };
        for i in 0..n {
            let offered = kwh_per_density * state.w[i].iter().sum::<f64>();
            let demand = scenario.demand.power(i, t);
            let served = offered.min(demand);
            rec.power_demanded_kwh[i] = demand;
            rec.power_served_kwh[i] = served;
            rec.power_unserved_kwh[i] = demand - served;
            rec.v2b_revenue += scenario.prices.outage_per_kwh[i] * served;
            rec.charged_kwh += kwh_per_density * state.u[i].iter().sum::<f64>();
        }
        rec.g2v_cost = scenario.prices.grid_price * rec.charged_kwh;
        for pair in 0..n * n {
            let offered = ctrl.sigma_trip_pax[pair].iter().sum::<f64>() * grid.dt_minutes * grid.dx;
            let demand = scenario.demand.mobility(pair, t);
            let served = offered.min(demand);
            rec.trips_demanded[pair] = demand;
            rec.trips_served[pair] = served;
            rec.trips_unserved[pair] = demand - served;
            rec.trips_revenue += scenario
                .fare_mode
                .trip_revenue(scenario.prices.fare_per_step[pair], served, grid.dt_minutes);
        }
        rec.total = rec.trips_revenue + rec.v2b_revenue - rec.g2v_cost;
        steps.push(rec);

        state.step = t;
        state = step(&state, &ctrl, &rates, &grid, &scenario.od)?;
        let now = total_vehicles(&state, &grid)?;
        max_drift = max_drift.max((now - initial).abs() / initial.max(1.0));
        debug_assert_eq!(state.u[0].len(), nb);
    }

    let totals = RunLog::recompute_totals(&steps);
    log::info!(
        "{} fleet {}: total ${:.2} (trips {:.2}, V2B {:.2}, G2V {:.2})",
        scenario.label,
        scenario.fleet_size,
        totals.total,
        totals.trips_revenue,
        totals.v2b_revenue,
        totals.g2v_cost
    );
    Ok(RunLog {
        label: scenario.label.clone(),
        fleet_size: scenario.fleet_size,
        nodes: scenario.nodes.iter().map(|x| x.to_string()).collect(),
        grid,
        steps,
        totals,
        final_census: state_census(&state, &grid)?,
        initial_vehicles: initial,
        final_vehicles: total_vehicles(&state, &grid)?,
        max_relative_drift: max_drift,
    })
}

/// Nudges controls so that no density goes negative through solver round-off.
/// Returns the number of vehicles whose flow was changed.
fn repair_controls(state: &FleetState, ctrl: &mut ControlVector, rates: &ChargeRates, scenario: &ScenarioSpec) -> f64 {
    let grid = &scenario.grid;
    let n = state.n_nodes();
    let nb = grid.n_bins;
    let top = nb - 1;
    let dt = grid.dt_minutes;
    let dx = grid.dx;
    let nu_c = rates.courant_charge(grid);
    let nu_d = rates.courant_discharge(grid);
    let mut moved = 0.0;

    for i in 0..n {
        for k in 0..top {
            let keep = 1.0 - nu_c;
            let from_below = if k > 0 { nu_c * state.u[i][k - 1] } else { 0.0 };
            let next = keep * state.u[i][k] + from_below + dt * ctrl.sigma_ic[i][k];
            if next < 0.0 {
                ctrl.sigma_ic[i][k] -= next / dt;
                moved -= next * dx;
            }
        }
        for k in 1..nb {
            let from_above = if k < top { nu_d * state.w[i][k + 1] } else { 0.0 };
            let next = (1.0 - nu_d) * state.w[i][k] + from_above + dt * ctrl.sigma_id[i][k];
            if next < 0.0 {
                ctrl.sigma_id[i][k] -= next / dt;
                moved -= next * dx;
            }
        }
    }

    // Idle outflow is limited to the current idle stock.
    for i in 0..n {
        for k in 0..nb {
            let s_ic = if k == top { -state.u[i][top] / dt } else { ctrl.sigma_ic[i][k] };
            let s_id = if k == 0 { -state.w[i][0] / dt } else { ctrl.sigma_id[i][k] };
            let deps: f64 = (0..n)
                .map(|j| ctrl.sigma_trip_pax[i * n + j][k] + ctrl.sigma_trip_empty[i * n + j][k])
                .sum();
            let remaining = state.v[i][k] - dt * (s_ic + s_id + deps);
            if remaining >= 0.0 {
                continue;
            }
            // Scale the voluntary outflows (positive flows and departures) down.
            let voluntary = dt
                * (if k != top { ctrl.sigma_ic[i][k].max(0.0) } else { 0.0 }
                    + if k != 0 { ctrl.sigma_id[i][k].max(0.0) } else { 0.0 }
                    + deps);
            if voluntary <= 0.0 {
                continue;
            }
            let f = (1.0 + remaining / voluntary).max(0.0);
            if k != top && ctrl.sigma_ic[i][k] > 0.0 {
                ctrl.sigma_ic[i][k] *= f;
            }
            if k != 0 && ctrl.sigma_id[i][k] > 0.0 {
                ctrl.sigma_id[i][k] *= f;
            }
            for j in 0..n {
                ctrl.sigma_trip_pax[i * n + j][k] *= f;
                ctrl.sigma_trip_empty[i * n + j][k] *= f;
            }
            moved += voluntary * (1.0 - f) * dx;
        }
    }
    moved
}

/// Runs `scenario` once per fleet size, on up to `jobs` threads. Results are
/// returned in the order of `fleet_sizes`.
pub fn sweep(scenario: &ScenarioSpec, fleet_sizes: &[f64], opts: &RunOptions, jobs: usize) -> Result<Vec<RunLog>> {
    if fleet_sizes.is_empty() {
        return Err(Error::Validation("fleet size list is empty".into()));
    }
    let jobs = jobs.clamp(1, fleet_sizes.len());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunLog>>>> = Mutex::new((0..fleet_sizes.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= fleet_sizes.len() {
                    break;
                }
                let out = run(&scenario.with_fleet_size(fleet_sizes[k]), opts);
                results.lock().expect("no panics while holding the lock")[k] = Some(out);
            });
        }
    });
    results
        .into_inner()
        .expect("worker threads finished")
        .into_iter()
        .map(|r| r.expect("every size was run"))
        .collect()
}
