//! State-of-energy grid and the aggregate density representation of the fleet.
//!
//! Densities live on the grid points `x_k = k * dx`, `k = 0..n_bins`, in
//! vehicles per unit SOE. The number of vehicles represented by a bin is
//! `density * dx` (rectangle rule), which keeps every transfer between
//! states an exact rearrangement of mass.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Densities in `[-DENSITY_FLOOR, 0)` are treated as solver round-off and clamped to zero.
pub const DENSITY_FLOOR: f64 = 1e-9;

/// Discretization of the SOE axis and of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoeGrid {
    pub n_bins: usize,
    pub dx: f64,
    pub dt_minutes: f64,
    pub horizon_steps: usize,
    pub n_sim_steps: usize,
}

impl Default for SoeGrid {
    fn default() -> Self {
        SoeGrid {
            n_bins: 6,
            dx: 0.2,
            dt_minutes: 10.0,
            horizon_steps: 5,
            n_sim_steps: 144,
        }
    }
}

impl SoeGrid {
    /// Builds a grid whose `n_bins` points span `[0, 1]` exactly.
    pub fn new(
        n_bins: usize,
        dt_minutes: f64,
        horizon_steps: usize,
        n_sim_steps: usize,
    ) -> Result<Self> {
        if n_bins < 2 {
            return Err(Error::Configuration(format!(
                "SOE grid needs at least 2 points, got {n_bins}"
            )));
        }
        let grid = SoeGrid {
            n_bins,
            dx: 1.0 / (n_bins - 1) as f64,
            dt_minutes,
            horizon_steps,
            n_sim_steps,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Builds a grid from a bin width; `1 / dx` must be (numerically) an integer.
    pub fn with_dx(dx: f64, dt_minutes: f64, horizon_steps: usize, n_sim_steps: usize) -> Result<Self> {
        if !(dx > 0.0 && dx <= 1.0) {
            return Err(Error::Configuration(format!("dx must lie in (0, 1], got {dx}")));
        }
        let intervals = (1.0 / dx).round();
        let grid = SoeGrid {
            n_bins: intervals as usize + 1,
            dx,
            dt_minutes,
            horizon_steps,
            n_sim_steps,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bins < 2 {
            return Err(Error::Configuration(format!(
                "SOE grid needs at least 2 points, got {}",
                self.n_bins
            )));
        }
        let span = self.dx * (self.n_bins - 1) as f64;
        if (span - 1.0).abs() > 1e-12 {
            return Err(Error::Configuration(format!(
                "dx = {} with {} points spans {span}, not [0, 1]",
                self.dx, self.n_bins
            )));
        }
        if !(self.dt_minutes > 0.0 && self.dt_minutes.is_finite()) {
            return Err(Error::Configuration(format!(
                "dt must be positive, got {} min",
                self.dt_minutes
            )));
        }
        if self.horizon_steps < 1 {
            return Err(Error::Configuration("horizon must be at least one step".into()));
        }
        Ok(())
    }

    /// SOE of grid point `k`.
    pub fn soe(&self, k: usize) -> f64 {
        k as f64 * self.dx
    }

    pub fn dt_seconds(&self) -> f64 {
        self.dt_minutes * 60.0
    }
}

/// Label of a transportation network node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(label: impl Into<String>) -> Self {
        NodeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

/// A batch of vehicles travelling between nodes, keyed by when and where it lands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitEntry {
    pub origin: usize,
    pub destination: usize,
    pub arrival_step: usize,
    pub arrival_bin: usize,
    pub vehicle_count: f64,
    pub with_passengers: bool,
}

/// Fleet densities at one time step, indexed `[node][bin]`, plus vehicles in transit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetState {
    /// Absolute simulation step this state describes.
    pub step: usize,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    pub in_transit: Vec<TransitEntry>,
}

impl FleetState {
    pub fn zeros(n_nodes: usize, grid: &SoeGrid) -> Self {
        let z = vec![vec![0.0; grid.n_bins]; n_nodes];
        FleetState {
            step: 0,
            u: z.clone(),
            v: z.clone(),
            w: z,
            in_transit: Vec::new(),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.v.len()
    }

    /// Checks that every density block is `n_nodes x n_bins`.
    pub fn check_shape(&self, grid: &SoeGrid) -> Result<()> {
        let n = self.v.len();
        for (name, block) in [("u", &self.u), ("v", &self.v), ("w", &self.w)] {
            if block.len() != n {
                return Err(Error::Dimension(format!(
                    "{name} has {} nodes, expected {n}",
                    block.len()
                )));
            }
            if let Some((i, row)) = block.iter().enumerate().find(|(_, r)| r.len() != grid.n_bins) {
                return Err(Error::Dimension(format!(
                    "{name}[{i}] has {} bins, grid has {}",
                    row.len(),
                    grid.n_bins
                )));
            }
        }
        for e in &self.in_transit {
            if e.origin >= n || e.destination >= n || e.arrival_bin >= grid.n_bins {
                return Err(Error::Dimension(format!("transit entry out of range: {e:?}")));
            }
        }
        Ok(())
    }

    /// Clamps round-off negatives to zero; fails on anything below the floor.
    pub fn clamp_floor(&mut self) -> std::result::Result<(), String> {
        for (name, block) in [("u", &mut self.u), ("v", &mut self.v), ("w", &mut self.w)] {
            for (i, row) in block.iter_mut().enumerate() {
                for (k, x) in row.iter_mut().enumerate() {
                    if *x < -DENSITY_FLOOR || !x.is_finite() {
                        return Err(format!("{name}[node {i}][bin {k}] = {x}"));
                    }
                    if *x < 0.0 {
                        *x = 0.0;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Number of vehicles represented by the state, including those in transit.
pub fn total_vehicles(state: &FleetState, grid: &SoeGrid) -> Result<f64> {
    state.check_shape(grid)?;
    let parked: f64 = [&state.u, &state.v, &state.w]
        .iter()
        .flat_map(|block| block.iter())
        .flat_map(|row| row.iter())
        .sum::<f64>()
        * grid.dx;
    let moving: f64 = state.in_transit.iter().map(|e| e.vehicle_count).sum();
    Ok(parked + moving)
}

/// All vehicles idle, spread uniformly over SOE, split across nodes by `weights`.
pub fn init_uniform_idle(fleet_size: f64, grid: &SoeGrid, n_nodes: usize, weights: &[f64]) -> Result<FleetState> {
    if weights.len() != n_nodes {
        return Err(Error::Dimension(format!(
            "{} weights for {n_nodes} nodes",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::Validation(format!("negative node weight in {weights:?}")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!("node weights sum to {sum}, not 1")));
    }
    if !(fleet_size >= 0.0 && fleet_size.is_finite()) {
        return Err(Error::Validation(format!("fleet size must be nonnegative, got {fleet_size}")));
    }
    let mut state = FleetState::zeros(n_nodes, grid);
    let span = grid.n_bins as f64 * grid.dx;
    for (row, w) in state.v.iter_mut().zip(weights) {
        row.fill(fleet_size * w / span);
    }
    Ok(state)
}
