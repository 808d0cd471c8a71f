//! Forward simulator for the charging / idle / discharging densities.
//!
//! One call to [`step`] advances the fleet by `dt` using a first-order upwind
//! scheme on the SOE axis. The stencil is written so that mass is rearranged,
//! never created: the flux leaving the top bin while charging (or the bottom
//! bin while discharging) is zero, and vehicles that reach those bins are
//! returned to idle on the following step by the forced boundary flows.
//! [`crate::dispatch`] encodes the same stencil as LP equality rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{total_vehicles, FleetState, SoeGrid, TransitEntry, DENSITY_FLOOR};
use crate::scenario::{OdTable, VehicleParams};

/// SOE advection speeds for charging and discharging vehicles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargeRates {
    /// SOE per minute while charging (positive).
    pub q_c: f64,
    /// SOE per minute while discharging (negative).
    pub q_d: f64,
    pub power_kw: f64,
    pub e_max_kwh: f64,
    pub eta: f64,
}

impl ChargeRates {
    /// Derives the advection speeds from charger power, capacity and efficiency,
    /// and checks the CFL condition against `grid`.
    pub fn new(vehicle: VehicleParams, grid: &SoeGrid) -> Result<Self> {
        let VehicleParams {
            power_kw,
            battery_kwh,
            charge_efficiency,
        } = vehicle;
        if !(power_kw > 0.0 && battery_kwh > 0.0 && charge_efficiency > 0.0 && charge_efficiency <= 1.0) {
            return Err(Error::Configuration(format!(
                "vehicle parameters out of range: {vehicle:?}"
            )));
        }
        let rates = ChargeRates {
            q_c: power_kw / battery_kwh * charge_efficiency / 60.0,
            q_d: -power_kw / battery_kwh / 60.0,
            power_kw,
            e_max_kwh: battery_kwh,
            eta: charge_efficiency,
        };
        rates.check_cfl(grid)?;
        Ok(rates)
    }

    pub fn check_cfl(&self, grid: &SoeGrid) -> Result<()> {
        let worst = self.q_c.abs().max(self.q_d.abs()) * grid.dt_minutes;
        if worst > grid.dx * (1.0 + 1e-12) {
            return Err(Error::Configuration(format!(
                "CFL violated: |q| * dt = {worst:.6} exceeds dx = {}",
                grid.dx
            )));
        }
        Ok(())
    }

    /// SOE gained in one step of charging.
    pub fn charge_per_step(&self, grid: &SoeGrid) -> f64 {
        self.q_c * grid.dt_minutes
    }

    /// Courant number of the charging advection, `q_c dt / dx`.
    pub fn courant_charge(&self, grid: &SoeGrid) -> f64 {
        self.q_c * grid.dt_minutes / grid.dx
    }

    /// Courant number of the discharging advection, `|q_d| dt / dx`.
    pub fn courant_discharge(&self, grid: &SoeGrid) -> f64 {
        -self.q_d * grid.dt_minutes / grid.dx
    }
}

/// Flow decisions for one step, in vehicles per unit SOE per minute.
///
/// `sigma_ic` / `sigma_id` are indexed `[node][bin]`; trip flows are indexed
/// `[origin * n + destination][bin]` by departure bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlVector {
    pub sigma_ic: Vec<Vec<f64>>,
    pub sigma_id: Vec<Vec<f64>>,
    pub sigma_trip_pax: Vec<Vec<f64>>,
    pub sigma_trip_empty: Vec<Vec<f64>>,
}

impl ControlVector {
    pub fn zeros(n_nodes: usize, n_bins: usize) -> Self {
        let per_node = vec![vec![0.0; n_bins]; n_nodes];
        let per_pair = vec![vec![0.0; n_bins]; n_nodes * n_nodes];
        ControlVector {
            sigma_ic: per_node.clone(),
            sigma_id: per_node,
            sigma_trip_pax: per_pair.clone(),
            sigma_trip_empty: per_pair,
        }
    }

    fn check_shape(&self, n_nodes: usize, n_bins: usize) -> Result<()> {
        let ok = |b: &Vec<Vec<f64>>, rows: usize| b.len() == rows && b.iter().all(|r| r.len() == n_bins);
        if ok(&self.sigma_ic, n_nodes)
            && ok(&self.sigma_id, n_nodes)
            && ok(&self.sigma_trip_pax, n_nodes * n_nodes)
            && ok(&self.sigma_trip_empty, n_nodes * n_nodes)
        {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "control vector does not match {n_nodes} nodes x {n_bins} bins"
            )))
        }
    }
}

/// Vehicle counts per category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub charging: f64,
    pub idle: f64,
    pub discharging: f64,
    pub transit_pax: f64,
    pub transit_empty: f64,
}

impl Census {
    pub fn total(&self) -> f64 {
        self.charging + self.idle + self.discharging + self.transit_pax + self.transit_empty
    }

    pub fn as_array(&self) -> [f64; 5] {
        [
            self.charging,
            self.idle,
            self.discharging,
            self.transit_pax,
            self.transit_empty,
        ]
    }

    pub const LABELS: [&'static str; 5] = [
        "charging",
        "idle",
        "discharging",
        "transit_passengers",
        "transit_empty",
    ];
}

pub fn state_census(state: &FleetState, grid: &SoeGrid) -> Result<Census> {
    state.check_shape(grid)?;
    let mass = |block: &Vec<Vec<f64>>| block.iter().flatten().sum::<f64>() * grid.dx;
    let (pax, empty) = state.in_transit.iter().fold((0.0, 0.0), |(p, e), x| {
        if x.with_passengers {
            (p + x.vehicle_count, e)
        } else {
            (p, e + x.vehicle_count)
        }
    });
    Ok(Census {
        charging: mass(&state.u),
        idle: mass(&state.v),
        discharging: mass(&state.w),
        transit_pax: pax,
        transit_empty: empty,
    })
}

/// Flow that empties the top charging bin into idle.
pub(crate) fn forced_charge_return(state: &FleetState, node: usize, dt: f64) -> f64 {
    -state.u[node][state.u[node].len() - 1] / dt
}

/// Flow that empties the bottom discharging bin into idle.
pub(crate) fn forced_discharge_return(state: &FleetState, node: usize, dt: f64) -> f64 {
    -state.w[node][0] / dt
}

/// Advances the fleet one step under `ctrl`.
///
/// Controls at the top charging bin and the bottom discharging bin are
/// ignored: those bins always return their vehicles to idle.
pub fn step(
    state: &FleetState,
    ctrl: &ControlVector,
    rates: &ChargeRates,
    grid: &SoeGrid,
    od: &OdTable,
) -> Result<FleetState> {
    rates.check_cfl(grid)?;
    state.check_shape(grid)?;
    let n = state.n_nodes();
    let nb = grid.n_bins;
    let top = nb - 1;
    ctrl.check_shape(n, nb)?;
    if od.n_nodes() != n {
        return Err(Error::Dimension(format!(
            "trip table covers {} nodes, state has {n}",
            od.n_nodes()
        )));
    }
    let dt = grid.dt_minutes;
    let dx = grid.dx;
    let nu_c = rates.courant_charge(grid);
    let nu_d = rates.courant_discharge(grid);
    let t = state.step;
    let infeasible = |detail: String| Error::InfeasibleControl { step: t, detail };

    let mut next = FleetState::zeros(n, grid);
    next.step = t + 1;

    for i in 0..n {
        let (u, v, w) = (&state.u[i], &state.v[i], &state.w[i]);
        let mut s_ic = ctrl.sigma_ic[i].clone();
        let mut s_id = ctrl.sigma_id[i].clone();
        s_ic[top] = forced_charge_return(state, i, dt);
        s_id[0] = forced_discharge_return(state, i, dt);

        for k in 0..nb {
            let keep_c = if k == top { 1.0 } else { 1.0 - nu_c };
            let from_below = if k > 0 { nu_c * u[k - 1] } else { 0.0 };
            next.u[i][k] = keep_c * u[k] + from_below + dt * s_ic[k];

            let keep_d = if k == 0 { 1.0 } else { 1.0 - nu_d };
            let from_above = if k < top { nu_d * w[k + 1] } else { 0.0 };
            next.w[i][k] = keep_d * w[k] + from_above + dt * s_id[k];

            let departures: f64 = (0..n)
                .map(|j| ctrl.sigma_trip_pax[i * n + j][k] + ctrl.sigma_trip_empty[i * n + j][k])
                .sum();
            // Vehicles leave idle from the current stock; arrivals landing
            // during this step cannot be sent anywhere until the next one.
            next.v[i][k] = v[k] - dt * (s_ic[k] + s_id[k] + departures);
            if next.v[i][k] < -DENSITY_FLOOR {
                return Err(infeasible(format!(
                    "idle outflow at node {i} bin {k} exceeds the stock by {} vehicles",
                    -next.v[i][k] * dx
                )));
            }
        }
    }

    let mut ledger = state.in_transit.clone();
    for o in 0..n {
        for d in 0..n {
            let pair = od.get(o, d);
            for (flows, with_passengers) in [
                (&ctrl.sigma_trip_pax[o * n + d], true),
                (&ctrl.sigma_trip_empty[o * n + d], false),
            ] {
                for (k, &sigma) in flows.iter().enumerate() {
                    let count = sigma * dt * dx;
                    if count < -DENSITY_FLOOR {
                        return Err(infeasible(format!(
                            "negative departure {count} from node {o} to {d} at bin {k}"
                        )));
                    }
                    if count <= 0.0 {
                        continue;
                    }
                    if k < pair.delta_bins {
                        return Err(infeasible(format!(
                            "{count} vehicles at bin {k} lack the energy for trip {o} -> {d}"
                        )));
                    }
                    add_to_ledger(
                        &mut ledger,
                        TransitEntry {
                            origin: o,
                            destination: d,
                            arrival_step: t + pair.delta_steps,
                            arrival_bin: k - pair.delta_bins,
                            vehicle_count: count,
                            with_passengers,
                        },
                    );
                }
            }
        }
    }

    for e in ledger {
        if e.arrival_step <= t {
            return Err(infeasible(format!("stale transit entry {e:?}")));
        }
        if e.arrival_step == t + 1 {
            next.v[e.destination][e.arrival_bin] += e.vehicle_count / dx;
        } else {
            next.in_transit.push(e);
        }
    }

    next.clamp_floor().map_err(|d| infeasible(format!("negative density {d}")))?;

    debug_assert!({
        let before = total_vehicles(state, grid)?;
        let after = total_vehicles(&next, grid)?;
        (before - after).abs() <= 1e-9 * before.max(1.0) + 1e-9
    });
    Ok(next)
}

fn add_to_ledger(ledger: &mut Vec<TransitEntry>, entry: TransitEntry) {
    let same = ledger.iter_mut().find(|e| {
        e.origin == entry.origin
            && e.destination == entry.destination
            && e.arrival_step == entry.arrival_step
            && e.arrival_bin == entry.arrival_bin
            && e.with_passengers == entry.with_passengers
    });
    match same {
        Some(e) => e.vehicle_count += entry.vehicle_count,
        None => ledger.push(entry),
    }
}
