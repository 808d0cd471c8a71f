//! Builds the dispatch LP for the first window, writes it in CPLEX LP format,
//! solves it with the built-in simplex and breaks down the optimal objective.
//!
//! Usage: `cargo run --example export_lp -- [OUT_FILE]`

use std::fs::File;
use std::io::BufWriter;

use aev_dispatch::dispatch::{build_lp, BuildOptions};
use aev_dispatch::grid::init_uniform_idle;
use aev_dispatch::lp::{solve, SolverOptions};
use aev_dispatch::scenario::builtin;

fn main() -> aev_dispatch::Result<()> {
    env_logger::init();
    let out = std::env::args().nth(1).unwrap_or_else(|| "window0.lp".into());
    let scenario = builtin::load("extreme-day")?;
    let state = init_uniform_idle(scenario.fleet_size, &scenario.grid, scenario.n_nodes(), &scenario.initial_weights)?;
    let lp = build_lp(&state, &scenario, 0, &scenario.charge_rates()?, &BuildOptions::default())?;

    let mut file = BufWriter::new(File::create(&out).expect("cannot create output file"));
    lp.write_lp(&mut file).expect("cannot write LP");
    println!("wrote {out}: {} columns, {} rows", lp.problem.n_cols(), lp.problem.n_rows());

    let sol = solve(&lp.problem, &SolverOptions::default())?;
    let audit = lp.audit(&sol.x, &scenario);
    println!("status {} after {} iterations, objective {:.2}", sol.status, sol.iterations, sol.objective);
    println!(
        "  trips ${:.2} + V2B ${:.2} - G2V ${:.2} - tie-break ${:.6} = ${:.2}",
        audit.trips_revenue,
        audit.v2b_revenue,
        audit.g2v_cost,
        audit.empty_trip_penalty,
        audit.total()
    );
    println!("  {:.0} kWh discharged, {:.0} kWh charged, {:.0} trips", audit.discharged_kwh, audit.charged_kwh, audit.trips);
    Ok(())
}
