//! Simulates the bundled extreme-outage day and writes the CSV outputs.
//!
//! Usage: `cargo run --release --example run_extreme -- [FLEET_SIZE] [OUT_DIR]`

use aev_dispatch::controller::{run, RunOptions};
use aev_dispatch::reporting::{emit_outputs, revenue_report};
use aev_dispatch::scenario::builtin;

fn main() -> aev_dispatch::Result<()> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let fleet: f64 = args.next().map(|s| s.parse().expect("fleet size must be a number")).unwrap_or(7500.0);
    let out = args.next().unwrap_or_else(|| "out/run_extreme".into());

    let scenario = builtin::load("extreme-day")?.with_fleet_size(fleet);
    let log = run(&scenario, &RunOptions::default())?;
    let report = revenue_report(&log, &scenario);

    println!("{} with {fleet} vehicles", scenario.label);
    println!("  trips revenue  ${:>14.2}", report.trips_revenue);
    println!("  V2B revenue    ${:>14.2}", report.v2b_revenue);
    println!("  G2V cost       ${:>14.2}", report.g2v_cost);
    println!("  total          ${:>14.2}  (${:.2} per vehicle)", report.total, report.per_vehicle.total);
    println!("  demand-limited maximum ${:.2}", report.max_possible);
    println!("  vehicle-count drift {:.2e}", log.max_relative_drift);

    let peak = log
        .steps
        .iter()
        .max_by(|a, b| a.power_demanded_kwh.iter().sum::<f64>().total_cmp(&b.power_demanded_kwh.iter().sum::<f64>()))
        .expect("non-empty run");
    let c = peak.census;
    println!(
        "  at peak step {}: charging {:.0}, idle {:.0}, discharging {:.0}, carrying {:.0}, repositioning {:.0}",
        peak.step, c.charging, c.idle, c.discharging, c.transit_pax, c.transit_empty
    );

    for path in emit_outputs(&report, &log, None, std::path::Path::new(&out), "")? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
