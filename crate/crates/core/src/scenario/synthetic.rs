//! Synthetic demand profiles for the bundled three-node scenarios.
//!
//! Measured outage and taxi series are generally not
//! redistributable, so the bundled scenarios use seeded synthetic profiles of
//! the same shape: outage load concentrated in a single mid-day peak (the
//! extreme day is about two orders of magnitude above the moderate one) and a
//! two-peak daily mobility curve. Profiles are rounded to whole kWh and whole
//! trips so the CSV files are stable across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DemandProfile, FareMode, OdTable, PriceTable, Quantization, ScenarioSpec, VehicleParams};
use crate::error::Result;
use crate::grid::{NodeId, SoeGrid};

/// Seed used for the bundled scenario files.
pub const DEFAULT_SEED: u64 = 2014;

pub const NODES: [&str; 3] = ["I", "II", "IV"];

/// Trip energy (kWh) and duration (s) per ordered pair, row-major over [`NODES`].
pub const TRIPS: [(f64, f64); 9] = [
    (0.42, 476.0),
    (0.82, 792.0),
    (0.93, 1000.0),
    (0.84, 760.0),
    (0.38, 489.0),
    (0.77, 698.0),
    (0.93, 956.0),
    (0.77, 725.0),
    (0.37, 403.0),
];

/// Trip fares per ordered pair: ($/kWh, $/step).
pub const FARES: [(f64, f64); 9] = [
    (25.0, 11.0),
    (19.0, 8.0),
    (20.0, 9.0),
    (18.0, 8.0),
    (26.0, 10.0),
    (19.0, 7.0),
    (20.0, 9.0),
    (19.0, 7.0),
    (24.0, 9.0),
];

/// Outage prices per node on the extreme day: ($/kWh, $/step).
pub const EXTREME_OUTAGE_PRICES: [(f64, f64); 3] = [(20.0, 23.0), (9.0, 11.0), (15.0, 18.0)];
/// Outage prices per node on the moderate day: ($/kWh, $/step).
pub const MODERATE_OUTAGE_PRICES: [(f64, f64); 3] = [(14.0, 16.0), (32.0, 37.0), (46.0, 54.0)];

pub const GRID_PRICE: f64 = 0.25;
pub const MOBILITY_SCALE: f64 = 10.0;
pub const DEFAULT_FLEET: f64 = 7500.0;

/// Share of outage load per node.
const POWER_SHARE: [f64; 3] = [0.45, 0.20, 0.35];
/// Share of trips per ordered pair (sums to 1).
const OD_SHARE: [f64; 9] = [0.20, 0.08, 0.07, 0.08, 0.15, 0.05, 0.07, 0.05, 0.25];

/// Which outage day to synthesize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageDay {
    Extreme,
    Moderate,
    /// No outage load and no trips.
    None,
}

impl OutageDay {
    pub fn label(self) -> &'static str {
        match self {
            OutageDay::Extreme => "extreme-2014-12-31",
            OutageDay::Moderate => "moderate-2014-09-29",
            OutageDay::None => "zero-demand",
        }
    }

    /// (peak total kWh per step, baseline total kWh per step).
    fn magnitude(self) -> (f64, f64) {
        match self {
            OutageDay::Extreme => (25_000.0, 500.0),
            OutageDay::Moderate => (250.0, 5.0),
            OutageDay::None => (0.0, 0.0),
        }
    }
}

fn bump(t: f64, centre: f64, width: f64) -> f64 {
    (-0.5 * ((t - centre) / width).powi(2)).exp()
}

/// Multiplicative noise in `[0.9, 1.1)`.
fn noise(rng: &mut ChaCha8Rng) -> f64 {
    1.0 + rng.random_range(-0.1..0.1)
}

/// Outage load in kWh per step, indexed `[node][step]`.
pub fn power_profile(day: OutageDay, n_steps: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (peak, base) = day.magnitude();
    POWER_SHARE
        .iter()
        .map(|share| {
            (0..n_steps)
                .map(|t| {
                    let shape = base + peak * bump(t as f64, 85.0, 3.0);
                    (share * shape * noise(&mut rng)).round()
                })
                .collect()
        })
        .collect()
}

/// Unscaled trips per step, indexed `[origin * 3 + destination][step]`.
pub fn mobility_profile(day: OutageDay, n_steps: usize, seed: u64) -> Vec<Vec<f64>> {
    // Separate stream so power and mobility do not share draws.
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let active = if day == OutageDay::None { 0.0 } else { 1.0 };
    OD_SHARE
        .iter()
        .map(|share| {
            (0..n_steps)
                .map(|t| {
                    let t = t as f64;
                    // Quiet nights, a morning and an evening rush (10-minute steps).
                    let shape = 40.0 + 200.0 * bump(t, 51.0, 9.0) + 310.0 * bump(t, 108.0, 11.0) + 80.0 * bump(t, 78.0, 20.0);
                    (active * share * shape * noise(&mut rng)).round()
                })
                .collect()
        })
        .collect()
}

/// The three-node scenario for `day`, with default grid and synthetic demand.
pub fn synthetic_day(day: OutageDay, seed: u64) -> Result<ScenarioSpec> {
    let grid = SoeGrid::default();
    let vehicle = VehicleParams::default();
    let n_steps = grid.n_sim_steps + grid.horizon_steps;
    let outage = match day {
        OutageDay::Moderate => MODERATE_OUTAGE_PRICES,
        _ => EXTREME_OUTAGE_PRICES,
    };
    let spec = ScenarioSpec {
        label: day.label().to_owned(),
        nodes: NODES.iter().map(|&s| NodeId::from(s)).collect(),
        grid,
        vehicle,
        quantization: Quantization::Ceiling,
        fare_mode: FareMode::PerTrip,
        od: OdTable::new(3, &TRIPS, &grid, vehicle.battery_kwh, Quantization::Ceiling)?,
        prices: PriceTable {
            outage_per_kwh: outage.iter().map(|p| p.0).collect(),
            outage_per_step: outage.iter().map(|p| p.1).collect(),
            fare_per_step: FARES.iter().map(|f| f.1).collect(),
            fare_per_kwh: FARES.iter().map(|f| f.0).collect(),
            grid_price: GRID_PRICE,
        },
        demand: DemandProfile {
            power_kwh: power_profile(day, n_steps, seed),
            mobility_raw: mobility_profile(day, n_steps, seed),
            mobility_scale: MOBILITY_SCALE,
        },
        fleet_size: DEFAULT_FLEET,
        initial_weights: vec![1.0 / 3.0; 3],
    };
    spec.validate()?;
    Ok(spec)
}
