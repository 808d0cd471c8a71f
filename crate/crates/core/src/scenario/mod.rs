//! Scenario inputs: node set, trip parameters, prices and demand profiles.
//!
//! A scenario is a TOML document that references two long-format CSV files
//! (outage power demand and mobility demand). See [`io`] for the schema and
//! [`builtin`] for the bundled scenarios built from the reference network tables.

pub mod builtin;
mod demand;
mod io;
pub mod synthetic;
pub mod tables;

use serde::{Deserialize, Serialize};

pub use demand::{validate_demand, DemandProfile, ValidationReport};
pub use io::{load_scenario, parse_scenario, save_scenario, serialize_scenario, SerializedScenario};

use crate::dynamics::ChargeRates;
use crate::error::{Error, Result};
use crate::grid::{NodeId, SoeGrid};

/// How trip energy and duration are rounded onto the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantization {
    /// Round up; never lets a trip arrive early or cost less energy than measured.
    #[default]
    Ceiling,
    /// Round to nearest.
    Nearest,
}

impl std::str::FromStr for Quantization {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ceiling" | "ceil" => Ok(Quantization::Ceiling),
            "nearest" => Ok(Quantization::Nearest),
            other => Err(format!("unknown quantization mode {other:?} (ceiling | nearest)")),
        }
    }
}

/// Interpretation of the per-step trip fare column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FareMode {
    /// The fare is a lump sum earned once per served trip.
    #[default]
    PerTrip,
    /// The fare is a rate per trip per minute of the step; revenue is divided by `dt`.
    PerMinute,
}

impl FareMode {
    /// Revenue earned by serving `trips` trips in one step.
    pub fn trip_revenue(self, fare_per_step: f64, trips: f64, dt_minutes: f64) -> f64 {
        match self {
            FareMode::PerTrip => fare_per_step * trips,
            FareMode::PerMinute => fare_per_step * trips / dt_minutes,
        }
    }
}

/// Trip parameters of one ordered node pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdEntry {
    pub delta_x_kwh: f64,
    pub delta_t_seconds: f64,
    /// Trip energy in whole SOE bins (at least one).
    pub delta_bins: usize,
    /// Trip duration in whole steps (at least one).
    pub delta_steps: usize,
}

/// Per ordered node pair trip energy and duration, stored row-major (`origin * n + destination`).
#[derive(Debug, Clone, PartialEq)]
pub struct OdTable {
    n_nodes: usize,
    entries: Vec<OdEntry>,
}

impl OdTable {
    /// Builds the table from raw `(kWh, seconds)` pairs and quantizes it.
    pub fn new(
        n_nodes: usize,
        raw: &[(f64, f64)],
        grid: &SoeGrid,
        battery_kwh: f64,
        mode: Quantization,
    ) -> Result<Self> {
        if raw.len() != n_nodes * n_nodes {
            return Err(Error::Dimension(format!(
                "{} trip entries for {n_nodes} nodes",
                raw.len()
            )));
        }
        let mut table = OdTable {
            n_nodes,
            entries: raw
                .iter()
                .map(|&(kwh, s)| OdEntry {
                    delta_x_kwh: kwh,
                    delta_t_seconds: s,
                    delta_bins: 1,
                    delta_steps: 1,
                })
                .collect(),
        };
        table.quantize(grid, battery_kwh, mode)?;
        Ok(table)
    }

    pub fn quantize(&mut self, grid: &SoeGrid, battery_kwh: f64, mode: Quantization) -> Result<()> {
        for (idx, e) in self.entries.iter_mut().enumerate() {
            if !(e.delta_x_kwh > 0.0 && e.delta_t_seconds > 0.0) {
                return Err(Error::Scenario(format!(
                    "trip {} -> {} must have positive energy and duration, got ({} kWh, {} s)",
                    idx / self.n_nodes,
                    idx % self.n_nodes,
                    e.delta_x_kwh,
                    e.delta_t_seconds
                )));
            }
            let bins = e.delta_x_kwh / battery_kwh / grid.dx;
            let steps = e.delta_t_seconds / grid.dt_seconds();
            e.delta_bins = quantize_count(bins, mode);
            e.delta_steps = quantize_count(steps, mode);
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn get(&self, origin: usize, destination: usize) -> &OdEntry {
        &self.entries[origin * self.n_nodes + destination]
    }

    pub fn entries(&self) -> &[OdEntry] {
        &self.entries
    }

    pub fn max_delta_steps(&self) -> usize {
        self.entries.iter().map(|e| e.delta_steps).max().unwrap_or(1)
    }
}

fn quantize_count(ratio: f64, mode: Quantization) -> usize {
    let q = match mode {
        // Tolerance keeps exact multiples (0.4 / 0.2) from rounding up a whole bin.
        Quantization::Ceiling => (ratio - 1e-9).ceil(),
        Quantization::Nearest => ratio.round(),
    };
    q.max(1.0) as usize
}

/// Outage prices per node and trip fares per ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    /// Value of served outage load, $/kWh.
    pub outage_per_kwh: Vec<f64>,
    /// Same value expressed per 10-minute step (informational).
    pub outage_per_step: Vec<f64>,
    /// Fare per trip, $/step, row-major over ordered pairs.
    pub fare_per_step: Vec<f64>,
    /// Fare per unit trip energy, $/kWh (informational).
    pub fare_per_kwh: Vec<f64>,
    /// Grid electricity price, $/kWh.
    pub grid_price: f64,
}

impl PriceTable {
    pub fn validate(&self, n_nodes: usize) -> Result<()> {
        let n_od = n_nodes * n_nodes;
        if self.outage_per_kwh.len() != n_nodes
            || self.outage_per_step.len() != n_nodes
            || self.fare_per_step.len() != n_od
            || self.fare_per_kwh.len() != n_od
        {
            return Err(Error::Dimension("price table shape does not match node set".into()));
        }
        let all = self
            .outage_per_kwh
            .iter()
            .chain(&self.outage_per_step)
            .chain(&self.fare_per_step)
            .chain(&self.fare_per_kwh)
            .chain(std::iter::once(&self.grid_price));
        if let Some(p) = all.into_iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::Scenario(format!("prices must be finite and nonnegative, got {p}")));
        }
        Ok(())
    }
}

/// Per-vehicle battery and charger parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    pub power_kw: f64,
    pub battery_kwh: f64,
    pub charge_efficiency: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParams {
            power_kw: 7.0,
            battery_kwh: 10.0,
            charge_efficiency: 0.86,
        }
    }
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub label: String,
    pub nodes: Vec<NodeId>,
    pub grid: SoeGrid,
    pub vehicle: VehicleParams,
    pub quantization: Quantization,
    pub fare_mode: FareMode,
    pub od: OdTable,
    pub prices: PriceTable,
    pub demand: DemandProfile,
    pub fleet_size: f64,
    pub initial_weights: Vec<f64>,
}

impl ScenarioSpec {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.as_str() == label)
    }

    pub fn charge_rates(&self) -> Result<ChargeRates> {
        ChargeRates::new(self.vehicle, &self.grid)
    }

    /// Checks cross-table consistency, the grid, the CFL condition and demand coverage.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_nodes();
        if n == 0 {
            return Err(Error::Scenario("scenario has no nodes".into()));
        }
        for (i, a) in self.nodes.iter().enumerate() {
            if self.nodes[..i].contains(a) {
                return Err(Error::Scenario(format!("node {a} listed twice")));
            }
        }
        self.grid.validate()?;
        self.charge_rates()?;
        if self.od.n_nodes() != n {
            return Err(Error::Dimension("trip table does not match node set".into()));
        }
        self.prices.validate(n)?;
        if !(self.fleet_size >= 0.0 && self.fleet_size.is_finite()) {
            return Err(Error::Scenario(format!("fleet size must be nonnegative, got {}", self.fleet_size)));
        }
        if self.initial_weights.len() != n {
            return Err(Error::Scenario(format!(
                "{} initial weights for {n} nodes",
                self.initial_weights.len()
            )));
        }
        let wsum: f64 = self.initial_weights.iter().sum();
        if (wsum - 1.0).abs() > 1e-9 || self.initial_weights.iter().any(|w| *w < 0.0) {
            return Err(Error::Scenario(format!(
                "initial weights must be nonnegative and sum to 1, got {:?}",
                self.initial_weights
            )));
        }
        let report = validate_demand(&self.demand, &self.grid);
        if !report.is_valid() {
            return Err(Error::Scenario(report.violations.join("; ")));
        }
        if self.demand.n_nodes() != n {
            return Err(Error::Dimension("demand profile does not match node set".into()));
        }
        Ok(())
    }

    pub fn with_fleet_size(&self, fleet_size: f64) -> Self {
        ScenarioSpec {
            fleet_size,
            ..self.clone()
        }
    }

    /// Replaces the grid (and quantization mode), re-quantizing trips and re-validating.
    pub fn with_grid(&self, grid: SoeGrid, quantization: Quantization) -> Result<Self> {
        let mut out = self.clone();
        out.grid = grid;
        out.quantization = quantization;
        out.od.quantize(&grid, out.vehicle.battery_kwh, quantization)?;
        out.validate()?;
        Ok(out)
    }
}
