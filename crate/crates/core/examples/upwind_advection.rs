//! Steps the fleet dynamics by hand: one node charges, then discharges,
//! and the SOE histogram drifts up and back down while the vehicle count
//! stays constant.
//!
//! Usage: `cargo run --example upwind_advection`

use aev_dispatch::dynamics::{state_census, step, ChargeRates, ControlVector};
use aev_dispatch::grid::{init_uniform_idle, total_vehicles, SoeGrid};
use aev_dispatch::scenario::{OdTable, Quantization, VehicleParams};

fn histogram(row: &[f64], dx: f64) -> String {
    row.iter().map(|d| format!("{:>7.1}", d * dx)).collect::<Vec<_>>().join(" ")
}

fn main() -> aev_dispatch::Result<()> {
    let grid = SoeGrid::with_dx(0.2, 10.0, 5, 12)?;
    let vehicle = VehicleParams::default();
    let rates = ChargeRates::new(vehicle, &grid)?;
    let od = OdTable::new(1, &[(0.5, 600.0)], &grid, vehicle.battery_kwh, Quantization::Ceiling)?;
    println!(
        "Courant numbers: charging {:.4}, discharging {:.4}",
        rates.courant_charge(&grid),
        rates.courant_discharge(&grid)
    );

    let mut state = init_uniform_idle(600.0, &grid, 1, &[1.0])?;
    let nb = grid.n_bins;
    println!("{:>4} {:>10} | vehicles per SOE bin (charging / idle / discharging)", "step", "total");
    for t in 0..grid.n_sim_steps {
        let mut ctrl = ControlVector::zeros(1, nb);
        let dt = grid.dt_minutes;
        if t == 0 {
            // Plug in every idle vehicle below the top bin.
            for k in 0..nb - 1 {
                ctrl.sigma_ic[0][k] = state.v[0][k] / dt;
            }
        } else if t == 6 {
            // Move everyone that is idle and not empty onto discharge.
            for k in 1..nb {
                ctrl.sigma_id[0][k] = state.v[0][k] / dt;
            }
        }
        state = step(&state, &ctrl, &rates, &grid, &od)?;
        let c = state_census(&state, &grid)?;
        println!(
            "{:>4} {:>10.6} | u {} | v {} | w {}   (charging {:.0}, idle {:.0}, discharging {:.0})",
            t + 1,
            total_vehicles(&state, &grid)?,
            histogram(&state.u[0], grid.dx),
            histogram(&state.v[0], grid.dx),
            histogram(&state.w[0], grid.dx),
            c.charging,
            c.idle,
            c.discharging
        );
    }
    Ok(())
}
