//! Combines an extreme-outage day and a moderate day into annual revenue per vehicle.
//!
//! Usage: `cargo run --release --example annualize -- [FLEET_SIZE]`

use aev_dispatch::controller::{run, RunOptions};
use aev_dispatch::reporting::{annualize, revenue_report, round_sig};
use aev_dispatch::scenario::builtin;

fn main() -> aev_dispatch::Result<()> {
    env_logger::init();
    let fleet: f64 = std::env::args().nth(1).map(|s| s.parse().expect("fleet size must be a number")).unwrap_or(7500.0);
    let opts = RunOptions::default();

    let extreme = builtin::load("extreme-day")?.with_fleet_size(fleet);
    let moderate = builtin::load("moderate-day")?.with_fleet_size(fleet);
    let ext = revenue_report(&run(&extreme, &opts)?, &extreme);
    let modr = revenue_report(&run(&moderate, &opts)?, &moderate);

    println!("daily profit: extreme ${:.0}, moderate ${:.0}", ext.total, modr.total);
    println!("V2B uplift per event: extreme {:.1}%, moderate {:.1}%", ext.v2b_uplift_percent, modr.v2b_uplift_percent);

    let table = annualize(&ext, &modr, &[10, 12, 14, 16, 18, 20], fleet)?;
    println!("\nextreme days | new $/vehicle/yr | increase %");
    for row in &table.rows {
        println!(
            "{:>12} | {:>16} | {:>9.2}",
            row.extreme_days,
            round_sig(row.new_revenue_per_vehicle, 2),
            row.percent_increase
        );
    }
    Ok(())
}
