//! Acceptance checks, one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use aev_dispatch::controller::{run, run_from, RunLog, RunOptions, SolveMode};
use aev_dispatch::dynamics::{step, ControlVector};
use aev_dispatch::grid::FleetState;
use aev_dispatch::lp::{solve, SolverOptions, Status};
use aev_dispatch::reporting::{annualize, revenue_report, RevenueReport};
use aev_dispatch::scenario::tables::{fare_table, outage_price_table, quantization_table, trip_table};
use aev_dispatch::scenario::{builtin, serialize_scenario, ScenarioSpec};
use common::{random_lp, random_tiny_instance, refined_lattice_optimum, vertex_enumeration, VertexResult, LP_FAMILIES};

const FLEETS: [f64; 3] = [7500.0, 15000.0, 40000.0];

/// Reference trip table: pair, energy (kWh), duration (s).
const TRIP_TABLE: &str = "\
Node Flows (i -> j) | Derived dx (kWh) | Derived dt (s)
I->I | 0.42 | 476
I->II | 0.82 | 792
I->IV | 0.93 | 1000
II->I | 0.84 | 760
II->II | 0.38 | 489
II->IV | 0.77 | 698
IV->I | 0.93 | 956
IV->II | 0.77 | 725
IV->IV | 0.37 | 403
";

/// Reference outage prices per node for the extreme and moderate days.
const OUTAGE_TABLE: &str = "\
Node (i) | Extreme ($/kWh) | Extreme ($/dt) | Moderate ($/kWh) | Moderate ($/dt)
I | 20 | 23 | 14 | 16
II | 9 | 11 | 32 | 37
IV | 15 | 18 | 46 | 54
";

/// Reference trip fares per ordered pair.
const FARE_TABLE: &str = "\
Origin | Destination | Cost ($/kWh) | Cost ($/dt)
I | I | 25 | 11
I | II | 19 | 8
I | IV | 20 | 9
II | I | 18 | 8
II | II | 26 | 10
II | IV | 19 | 7
IV | I | 20 | 9
IV | II | 19 | 7
IV | IV | 24 | 9
";

/// Reference annual new revenue per vehicle at 10, 12, ..., 20 extreme days
/// for fleets of 7,500 and 15,000 (shown for structure only).
const REFERENCE_ANNUAL: [(f64, [f64; 6]); 2] = [
    (7500.0, [1400.0, 1700.0, 2000.0, 2300.0, 2500.0, 2800.0]),
    (15000.0, [2000.0, 2300.0, 2600.0, 2900.0, 3100.0, 3400.0]),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn report(id: u32, name: &str, started: Instant, o: &Outcome) {
    println!(
        "{} [{id}] {name}: {} ({:.1} s)",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        started.elapsed().as_secs_f64()
    );
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Runs at every fleet size for one scenario, reusing an existing run where given.
fn fleet_runs(scenario: &ScenarioSpec, first: Option<RunLog>) -> aev_dispatch::Result<Vec<RunLog>> {
    let mut out = Vec::new();
    for &f in &FLEETS {
        match &first {
            Some(log) if log.fleet_size == f => out.push(log.clone()),
            _ => out.push(run(&scenario.with_fleet_size(f), &RunOptions::default())?),
        }
    }
    Ok(out)
}

fn conservation(extreme: &ScenarioSpec) -> (Outcome, Option<RunLog>) {
    let t0 = Instant::now();
    match run(&extreme.with_fleet_size(7500.0), &RunOptions::default()) {
        Ok(log) => {
            let secs = t0.elapsed().as_secs_f64();
            let ok = log.steps.len() == 144 && log.max_relative_drift < 1e-6 && secs < 300.0;
            let o = outcome(
                ok,
                format!(
                    "{} steps, max relative drift {:.2e}, {:.1} s simulated",
                    log.steps.len(),
                    log.max_relative_drift,
                    secs
                ),
            );
            (o, Some(log))
        }
        Err(e) => (outcome(false, format!("run failed: {e}")), None),
    }
}

fn oracle_equivalence(logs: &mut Vec<RunLog>) -> Outcome {
    let opts = RunOptions {
        solve_mode: SolveMode::Block,
        ..RunOptions::default()
    };
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut nodes = [0; 2];
    let instances = 30;
    for seed in 0..instances {
        let inst = random_tiny_instance(seed);
        nodes[inst.scenario.n_nodes() - 1] += 1;
        let (best, unit, stable) = refined_lattice_optimum(&inst, 2_000_000);
        if !stable {
            failures.push(format!("seed {seed}: lattice unstable at unit {unit}"));
            continue;
        }
        match run_from(&inst.scenario, inst.initial_state(), &opts) {
            Ok(log) => {
                let rel = (log.totals.total - best).abs() / best.abs().max(1.0);
                worst = worst.max(rel);
                if rel > 1e-6 {
                    failures.push(format!("seed {seed}: controller {} vs lattice {best}", log.totals.total));
                }
                logs.push(log);
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    if failures.is_empty() {
        outcome(
            true,
            format!(
                "{instances} instances ({} one-node, {} two-node), worst relative gap {worst:.1e}",
                nodes[0], nodes[1]
            ),
        )
    } else {
        outcome(false, failures.join("; "))
    }
}

fn solver_correctness() -> Outcome {
    let mut failures = Vec::new();
    let (mut optimal, mut infeasible) = (0, 0);
    let mut worst: f64 = 0.0;
    let count = 160u64;
    for seed in 0..count {
        let family = LP_FAMILIES[(seed % 4) as usize];
        let p = random_lp(seed, family, 20);
        let (a, b) = match (solve(&p, &SolverOptions::default()), solve(&p, &SolverOptions::default())) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        if format!("{a:?}") != format!("{b:?}") {
            failures.push(format!("seed {seed}: repeated solves differ"));
        }
        match vertex_enumeration(&p) {
            VertexResult::Optimal(best) => {
                optimal += 1;
                let gap = (a.objective - best).abs();
                if a.status != Status::Optimal || gap > 1e-7 * best.abs().max(1.0) {
                    failures.push(format!("seed {seed} {family:?}: {} {} vs {best}", a.status, a.objective));
                } else {
                    worst = worst.max(gap);
                }
            }
            VertexResult::Infeasible => {
                infeasible += 1;
                if a.status != Status::Infeasible {
                    failures.push(format!("seed {seed} {family:?}: oracle infeasible, solver {}", a.status));
                }
            }
        }
    }
    if failures.is_empty() {
        outcome(
            true,
            format!("{count} LPs ({optimal} optimal, {infeasible} infeasible), worst gap {worst:.1e}, repeat solves identical"),
        )
    } else {
        outcome(false, failures.join("; "))
    }
}

fn table_fidelity() -> Outcome {
    let check = || -> aev_dispatch::Result<Vec<String>> {
        let mut problems = Vec::new();
        let bundled = builtin::files("network-tables").expect("bundled scenario");
        let loaded = bundled.parse()?;
        let reserialized = serialize_scenario(&loaded);
        if reserialized != bundled {
            problems.push("load -> serialize does not reproduce the bundled files".to_owned());
        }
        let extreme = reserialized.parse()?;
        let moderate = serialize_scenario(&builtin::load("moderate-day")?).parse()?;
        for (name, got, want) in [
            ("trip", trip_table(&extreme), TRIP_TABLE),
            ("outage price", outage_price_table(&extreme, &moderate)?, OUTAGE_TABLE),
            ("fare", fare_table(&extreme), FARE_TABLE),
        ] {
            if got != want {
                problems.push(format!("{name} table differs:\n{got}"));
            }
        }
        // Quantization: whole steps of 600 s (rounded up) and whole SOE bins
        // of 0.2 x 10 kWh (rounded up, at least one).
        let n = extreme.n_nodes();
        for (pair, e) in extreme.od.entries().iter().enumerate() {
            let steps = (e.delta_t_seconds / 600.0).ceil().max(1.0) as usize;
            let bins = (e.delta_x_kwh / 2.0).ceil().max(1.0) as usize;
            if (e.delta_bins, e.delta_steps) != (bins, steps) {
                problems.push(format!(
                    "pair {}->{}: got ({}, {}), expected ({bins}, {steps})",
                    extreme.nodes[pair / n],
                    extreme.nodes[pair % n],
                    e.delta_bins,
                    e.delta_steps
                ));
            }
        }
        let i_iv = extreme.od.get(0, 2);
        if (i_iv.delta_bins, i_iv.delta_steps) != (1, 2) {
            problems.push("I->IV must take 1 bin and 2 steps".to_owned());
        }
        if !quantization_table(&extreme).contains("I->IV | 1 | 2\n") {
            problems.push("quantization table misses I->IV | 1 | 2".to_owned());
        }
        Ok(problems)
    };
    match check() {
        Ok(p) if p.is_empty() => outcome(true, "three tables byte-exact after load/serialize/load; 9 pairs quantized as expected"),
        Ok(p) => outcome(false, p.join("; ")),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn charging_rate(extreme: &ScenarioSpec) -> Outcome {
    let check = || -> aev_dispatch::Result<(f64, f64)> {
        let grid = extreme.grid;
        let rates = extreme.charge_rates()?;
        let formula = rates.charge_per_step(&grid);
        // Simulate: ten vehicles charging at SOE 0, one step, no controls.
        let mut state = FleetState::zeros(extreme.n_nodes(), &grid);
        state.u[0][0] = 10.0 / grid.dx;
        let next = step(
            &state,
            &ControlVector::zeros(extreme.n_nodes(), grid.n_bins),
            &rates,
            &grid,
            &extreme.od,
        )?;
        let mass: f64 = next.u[0].iter().sum();
        let mean_soe = next.u[0].iter().enumerate().map(|(k, u)| u * grid.soe(k)).sum::<f64>() / mass;
        Ok((formula, mean_soe))
    };
    match check() {
        Ok((formula, simulated)) => outcome(
            (formula - 0.1003).abs() <= 1e-4 && (simulated - formula).abs() <= 1e-12,
            format!("formula {formula:.6} SOE/step, simulated mean gain {simulated:.6}"),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn monotonicity(ext: &[RunLog], modr: &[RunLog]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, logs) in [("extreme", ext), ("moderate", modr)] {
        let totals: Vec<f64> = logs.iter().map(|l| l.totals.total).collect();
        ok &= totals.windows(2).all(|w| w[1] >= w[0] - 1e-6);
        parts.push(format!(
            "{name} {}",
            totals.iter().map(|t| format!("${t:.0}")).collect::<Vec<_>>().join(" <= ")
        ));
    }
    outcome(ok, parts.join("; "))
}

fn decomposition(logs: &[RunLog], reports: &[RevenueReport]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    for log in logs {
        for s in &log.steps {
            steps += 1;
            worst = worst.max((s.total - (s.trips_revenue + s.v2b_revenue - s.g2v_cost)).abs());
            for i in 0..s.power_demanded_kwh.len() {
                worst = worst.max((s.power_served_kwh[i] + s.power_unserved_kwh[i] - s.power_demanded_kwh[i]).abs());
            }
            for p in 0..s.trips_demanded.len() {
                worst = worst.max((s.trips_served[p] + s.trips_unserved[p] - s.trips_demanded[p]).abs());
            }
        }
    }
    let reports_ok = reports
        .iter()
        .all(|r| close(r.total, r.trips_revenue + r.v2b_revenue - r.g2v_cost, 1e-12) && r.total <= r.max_possible + 1e-6);
    outcome(
        worst <= 1e-9 && reports_ok,
        format!(
            "{} runs, {steps} steps, worst step residual {worst:.1e}; {} reports consistent",
            logs.len(),
            reports.len()
        ),
    )
}

fn idle_structure(ext: &[RunLog], extreme: &ScenarioSpec) -> Outcome {
    let small = &ext[0];
    let large = &ext[2];
    // Share of the day spent in each state by the 40,000-vehicle fleet.
    let mut sums = [0.0; 5];
    for s in &large.steps {
        for (acc, x) in sums.iter_mut().zip(s.census.as_array()) {
            *acc += x;
        }
    }
    let idle_modal = (0..5).all(|c| c == 1 || sums[1] > sums[c]);
    let share = |log: &RunLog, t: usize| log.steps[t].census.idle / log.steps[t].census.total();

    // Peak steps: outage demand at least half of the day's maximum.
    let n = extreme.n_nodes();
    let power: Vec<f64> = (0..extreme.grid.n_sim_steps)
        .map(|t| (0..n).map(|i| extreme.demand.power(i, t)).sum())
        .collect();
    let max = power.iter().cloned().fold(0.0, f64::max);
    let peaks: Vec<usize> = (0..power.len()).filter(|&t| power[t] >= 0.5 * max).collect();
    let lower_everywhere = !peaks.is_empty() && peaks.iter().all(|&t| share(small, t) < share(large, t));
    let day_total: f64 = sums.iter().sum();
    let worst_margin = peaks
        .iter()
        .map(|&t| share(large, t) - share(small, t))
        .fold(f64::INFINITY, f64::min);
    outcome(
        idle_modal && lower_everywhere,
        format!(
            "40,000 fleet day shares (charging/idle/discharging/carrying/repositioning) {}; {} peak steps ({}..={}), smallest idle-share margin {:.3}",
            sums.iter().map(|s| format!("{:.2}", s / day_total)).collect::<Vec<_>>().join("/"),
            peaks.len(),
            peaks.first().copied().unwrap_or(0),
            peaks.last().copied().unwrap_or(0),
            worst_margin
        ),
    )
}

fn annualization(ext: &[RevenueReport], modr: &[RevenueReport]) -> Outcome {
    let days = [10u32, 12, 14, 16, 18, 20];
    let mut ok = true;
    let mut parts = Vec::new();
    for (e, m) in ext.iter().zip(modr) {
        let table = match annualize(e, m, &days, e.fleet_size) {
            Ok(t) => t,
            Err(err) => return outcome(false, err.to_string()),
        };
        let slope = (e.total - m.total) / e.fleet_size;
        for r in &table.rows {
            ok &= close(r.new_revenue_per_vehicle, r.extreme_days as f64 * slope, 1e-9);
        }
        for w in table.rows.windows(2) {
            let step = w[1].new_revenue_per_vehicle - w[0].new_revenue_per_vehicle;
            ok &= close(step, 2.0 * slope, 1e-9);
        }
        parts.push(format!(
            "fleet {}: {} $/vehicle (step {:.0} per 2 days)",
            e.fleet_size,
            table.rows.iter().map(|r| format!("{:.0}", r.new_revenue_per_vehicle)).collect::<Vec<_>>().join(","),
            2.0 * slope
        ));
    }
    // The reference rows also step by a near-constant amount.
    for (fleet, row) in REFERENCE_ANNUAL {
        let steps: Vec<f64> = row.windows(2).map(|w| w[1] - w[0]).collect();
        parts.push(format!("reference {fleet}: steps {steps:?}"));
    }
    outcome(ok, parts.join("; "))
}

fn main() -> ExitCode {
    let extreme = builtin::load("extreme-day").expect("bundled extreme scenario");
    let moderate = builtin::load("moderate-day").expect("bundled moderate scenario");
    let mut all_pass = true;
    let mut record = |id: u32, name: &str, t0: Instant, o: Outcome| {
        report(id, name, t0, &o);
        all_pass &= o.pass;
    };

    let t0 = Instant::now();
    let (o, extreme_7500) = conservation(&extreme);
    record(1, "conservation over a full day", t0, o);

    let mut tiny_logs = Vec::new();
    let t0 = Instant::now();
    record(2, "oracle equivalence on tiny instances", t0, oracle_equivalence(&mut tiny_logs));

    let t0 = Instant::now();
    record(3, "solver correctness", t0, solver_correctness());

    let t0 = Instant::now();
    record(4, "table fidelity", t0, table_fidelity());

    let t0 = Instant::now();
    record(5, "charging rate", t0, charging_rate(&extreme));

    let t0 = Instant::now();
    let runs = fleet_runs(&extreme, extreme_7500).and_then(|e| Ok((e, fleet_runs(&moderate, None)?)));
    let (ext, modr) = match runs {
        Ok(r) => r,
        Err(e) => {
            for (id, name) in [
                (6, "monotonicity in fleet size"),
                (7, "decomposition identities"),
                (8, "idle-state structure"),
                (9, "annualization structure"),
            ] {
                record(id, name, t0, outcome(false, format!("fleet runs failed: {e}")));
            }
            return ExitCode::FAILURE;
        }
    };
    record(6, "monotonicity in fleet size", t0, monotonicity(&ext, &modr));

    let ext_reports: Vec<RevenueReport> =
        ext.iter().map(|l| revenue_report(l, &extreme.with_fleet_size(l.fleet_size))).collect();
    let mod_reports: Vec<RevenueReport> =
        modr.iter().map(|l| revenue_report(l, &moderate.with_fleet_size(l.fleet_size))).collect();

    let t0 = Instant::now();
    let mut every_log: Vec<RunLog> = ext.iter().chain(&modr).cloned().collect();
    every_log.extend(tiny_logs);
    let all_reports: Vec<RevenueReport> = ext_reports.iter().chain(&mod_reports).cloned().collect();
    record(7, "decomposition identities", t0, decomposition(&every_log, &all_reports));

    let t0 = Instant::now();
    record(8, "idle-state structure", t0, idle_structure(&ext, &extreme));

    let t0 = Instant::now();
    record(9, "annualization structure", t0, annualization(&ext_reports, &mod_reports));

    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
