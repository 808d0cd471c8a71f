mod common;

use aev_dispatch::controller::{run_from, ArrivalMode, BuildOptions, RunOptions, SolveMode};
use aev_dispatch::dispatch::{build_lp, extract_controls, Family, VarTag};
use aev_dispatch::dynamics::step;
use aev_dispatch::grid::init_uniform_idle;
use aev_dispatch::lp::{solve, SolverOptions};
use aev_dispatch::reporting::revenue_report;
use aev_dispatch::scenario::builtin;
use common::{random_tiny_instance, refined_lattice_optimum};
use proptest::prelude::*;

fn block_options() -> RunOptions {
    RunOptions {
        solve_mode: SolveMode::Block,
        ..RunOptions::default()
    }
}

#[test]
fn block_controller_matches_lattice_search() {
    for seed in 0..30 {
        let inst = random_tiny_instance(seed);
        let (best, unit, stable) = refined_lattice_optimum(&inst, 2_000_000);
        assert!(stable, "seed {seed}: lattice did not settle (finest unit {unit})");
        let log = run_from(&inst.scenario, inst.initial_state(), &block_options()).unwrap();
        let got = log.totals.total;
        assert!(
            (got - best).abs() <= 1e-6 * best.abs().max(1.0),
            "seed {seed}: controller {got} vs lattice {best}"
        );
    }
}

#[test]
fn report_ledger_matches_oracle_totals() {
    let inst = random_tiny_instance(7);
    let (best, _, _) = refined_lattice_optimum(&inst, 2_000_000);
    let log = run_from(&inst.scenario, inst.initial_state(), &block_options()).unwrap();
    let report = revenue_report(&log, &inst.scenario);
    assert!((report.total - best).abs() <= 1e-6 * best.abs().max(1.0));
    assert!((report.total - (report.trips_revenue + report.v2b_revenue - report.g2v_cost)).abs() < 1e-9);
    assert!(report.total <= report.max_possible + 1e-9);
}

/// Replaying the LP's first-step controls through the simulator reproduces
/// the LP's own next-step densities.
#[test]
fn lp_states_agree_with_simulator() {
    let scenario = builtin::load("extreme-day").unwrap();
    let rates = scenario.charge_rates().unwrap();
    let mut state =
        init_uniform_idle(scenario.fleet_size, &scenario.grid, scenario.n_nodes(), &scenario.initial_weights).unwrap();
    // Consecutive steps through the outage peak, starting from an all-idle fleet.
    for t in 80..88 {
        state.step = t;
        let lp = build_lp(&state, &scenario, t, &rates, &BuildOptions::default()).unwrap();
        let sol = solve(&lp.problem, &SolverOptions::default()).unwrap();
        assert!(sol.is_optimal());
        let ctrl = extract_controls(&sol.x, &lp.index, 0).unwrap();
        let next = step(&state, &ctrl, &rates, &scenario.grid, &scenario.od).unwrap();
        for i in 0..scenario.n_nodes() {
            for k in 0..scenario.grid.n_bins {
                for (family, got) in [(Family::U, next.u[i][k]), (Family::V, next.v[i][k]), (Family::W, next.w[i][k])] {
                    let col = lp
                        .index
                        .col(VarTag {
                            family,
                            index: i,
                            bin: k,
                            step: 1,
                        })
                        .unwrap();
                    assert!(
                        (sol.x[col] - got).abs() <= 1e-6 * got.abs().max(1.0),
                        "step {t} {} node {i} bin {k}: LP {} vs simulator {got}",
                        family.name(),
                        sol.x[col]
                    );
                }
            }
        }
        state = next;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Eliminating arrival variables does not change the window optimum.
    #[test]
    fn substituted_arrivals_match_explicit(seed in 0u64..10_000, start in 0usize..140) {
        let inst = random_tiny_instance(seed);
        let scenario = builtin::load("extreme-day").unwrap();
        let rates = scenario.charge_rates().unwrap();
        let mut state = init_uniform_idle(scenario.fleet_size, &scenario.grid, 3, &scenario.initial_weights).unwrap();
        state.step = start;
        let solve_with = |arrivals| {
            let opts = BuildOptions { arrivals, ..BuildOptions::default() };
            let lp = build_lp(&state, &scenario, start, &rates, &opts).unwrap();
            solve(&lp.problem, &SolverOptions::default()).unwrap().objective
        };
        let a = solve_with(ArrivalMode::Substituted);
        let b = solve_with(ArrivalMode::Explicit);
        prop_assert!((a - b).abs() <= 1e-7 * a.abs().max(1.0), "{a} vs {b}");

        // Same for a tiny instance.
        let trates = inst.scenario.charge_rates().unwrap();
        let tstate = inst.initial_state();
        let tiny = |arrivals| {
            let opts = BuildOptions { arrivals, ..BuildOptions::default() };
            let lp = build_lp(&tstate, &inst.scenario, 0, &trates, &opts).unwrap();
            solve(&lp.problem, &SolverOptions::default()).unwrap().objective
        };
        let (a, b) = (tiny(ArrivalMode::Substituted), tiny(ArrivalMode::Explicit));
        prop_assert!((a - b).abs() <= 1e-7 * a.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn audit_reproduces_objective() {
    let scenario = builtin::load("moderate-day").unwrap();
    let rates = scenario.charge_rates().unwrap();
    let mut state =
        init_uniform_idle(scenario.fleet_size, &scenario.grid, scenario.n_nodes(), &scenario.initial_weights).unwrap();
    state.step = 60;
    let lp = build_lp(&state, &scenario, 60, &rates, &BuildOptions::default()).unwrap();
    let sol = solve(&lp.problem, &SolverOptions::default()).unwrap();
    let audit = lp.audit(&sol.x, &scenario);
    assert!((audit.total() - sol.objective).abs() <= 1e-7 * sol.objective.abs().max(1.0));
    assert!(audit.trips > 0.0);
}
