//! Runs both bundled outage days across several fleet sizes in parallel.
//!
//! Usage: `cargo run --release --example sweep_fleet_sizes -- [JOBS]`

use aev_dispatch::controller::{sweep, RunOptions};
use aev_dispatch::reporting::revenue_report;
use aev_dispatch::scenario::builtin;

fn main() -> aev_dispatch::Result<()> {
    env_logger::init();
    let jobs: usize = std::env::args().nth(1).map(|s| s.parse().expect("jobs must be an integer")).unwrap_or(2);
    let sizes = [7500.0, 15000.0, 40000.0];

    println!("{:<26} {:>8} {:>14} {:>14} {:>14} {:>10}", "scenario", "fleet", "total $", "V2B $", "trips $", "$/vehicle");
    for name in ["extreme-day", "moderate-day"] {
        let scenario = builtin::load(name)?;
        for log in sweep(&scenario, &sizes, &RunOptions::default(), jobs)? {
            let report = revenue_report(&log, &scenario.with_fleet_size(log.fleet_size));
            println!(
                "{:<26} {:>8} {:>14.0} {:>14.0} {:>14.0} {:>10.2}",
                report.label, log.fleet_size, report.total, report.v2b_revenue, report.trips_revenue, report.per_vehicle.total
            );
        }
    }
    Ok(())
}
