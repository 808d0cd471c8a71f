//! Writes a small two-node scenario to disk, loads it back and simulates it.
//!
//! Usage: `cargo run --example custom_scenario -- [DIR]`

use std::fmt::Write as _;
use std::path::PathBuf;

use aev_dispatch::controller::{run, RunOptions};
use aev_dispatch::reporting::revenue_report;
use aev_dispatch::scenario::load_scenario;

// Demand must cover the simulated steps plus one look-ahead window.
const STEPS: usize = 28;

const SCENARIO: &str = r#"label = "two-campus-demo"
nodes = ["North", "South"]
fleet_size = 200.0
initial_weights = [0.5, 0.5]

[grid]
dx = 0.2
dt_minutes = 10.0
horizon_steps = 4
sim_steps = 24
quantization = "ceiling"

[vehicle]
power_kw = 7.0
battery_kwh = 10.0
charge_efficiency = 0.86

[prices]
grid_usd_per_kwh = 0.25
fare_mode = "per-trip"

[demand]
power = "power.csv"
mobility = "mobility.csv"
mobility_scale = 1.0

[[outage_price]]
node = "North"
usd_per_kwh = 12.0
usd_per_step = 14.0

[[outage_price]]
node = "South"
usd_per_kwh = 6.0
usd_per_step = 7.0

[[trip]]
origin = "North"
destination = "North"
energy_kwh = 0.4
duration_s = 450.0

[[trip]]
origin = "North"
destination = "South"
energy_kwh = 0.8
duration_s = 900.0

[[trip]]
origin = "South"
destination = "North"
energy_kwh = 0.8
duration_s = 900.0

[[trip]]
origin = "South"
destination = "South"
energy_kwh = 0.4
duration_s = 450.0

[[fare]]
origin = "North"
destination = "North"
usd_per_kwh = 20.0
usd_per_step = 8.0

[[fare]]
origin = "North"
destination = "South"
usd_per_kwh = 15.0
usd_per_step = 12.0

[[fare]]
origin = "South"
destination = "North"
usd_per_kwh = 15.0
usd_per_step = 12.0

[[fare]]
origin = "South"
destination = "South"
usd_per_kwh = 20.0
usd_per_step = 8.0
"#;

fn main() -> aev_dispatch::Result<()> {
    env_logger::init();
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("aev-dispatch-custom"));
    std::fs::create_dir_all(&dir).expect("cannot create scenario directory");

    // An outage at North during steps 8..16, and a steady trickle of trips.
    let mut power = String::from("node,step,value\n");
    let mut mobility = String::from("node,dest,step,value\n");
    for t in 0..STEPS {
        let north = if (8..16).contains(&t) { 60.0 } else { 0.0 };
        let _ = writeln!(power, "North,{t},{north}");
        let _ = writeln!(power, "South,{t},0");
        for (o, d, trips) in [("North", "North", 2), ("North", "South", 3), ("South", "North", 3), ("South", "South", 2)] {
            let _ = writeln!(mobility, "{o},{d},{t},{trips}");
        }
    }
    std::fs::write(dir.join("scenario.toml"), SCENARIO).expect("write scenario");
    std::fs::write(dir.join("power.csv"), power).expect("write power");
    std::fs::write(dir.join("mobility.csv"), mobility).expect("write mobility");

    let scenario = load_scenario(dir.join("scenario.toml"))?;
    let log = run(&scenario, &RunOptions::default())?;
    let report = revenue_report(&log, &scenario);
    println!("{} ({} vehicles, {} steps)", report.label, report.fleet_size, log.steps.len());
    println!(
        "  total ${:.2}: trips ${:.2}, V2B ${:.2}, G2V -${:.2}",
        report.total, report.trips_revenue, report.v2b_revenue, report.g2v_cost
    );
    println!(
        "  outage energy served {:.1} of {:.1} kWh, trips served {:.1} of {:.1}",
        log.totals.power_served_kwh, log.totals.power_demanded_kwh, log.totals.trips_served, log.totals.trips_demanded
    );
    Ok(())
}
