use crate::grid::SoeGrid;

/// Exogenous demand per step: outage energy per node and trips per ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile {
    /// Outage load, kWh per step, indexed `[node][step]`.
    pub power_kwh: Vec<Vec<f64>>,
    /// Trips per step before scaling, indexed `[origin * n + destination][step]`.
    pub mobility_raw: Vec<Vec<f64>>,
    /// Multiplier applied to `mobility_raw`.
    pub mobility_scale: f64,
}

impl DemandProfile {
    pub fn zeros(n_nodes: usize, n_steps: usize) -> Self {
        DemandProfile {
            power_kwh: vec![vec![0.0; n_steps]; n_nodes],
            mobility_raw: vec![vec![0.0; n_steps]; n_nodes * n_nodes],
            mobility_scale: 1.0,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.power_kwh.len()
    }

    /// Number of steps covered by every series (the shortest one).
    pub fn n_steps(&self) -> usize {
        self.power_kwh
            .iter()
            .chain(&self.mobility_raw)
            .map(Vec::len)
            .min()
            .unwrap_or(0)
    }

    /// Outage energy demanded at `node` during `step`, kWh.
    pub fn power(&self, node: usize, step: usize) -> f64 {
        self.power_kwh[node][step]
    }

    /// Scaled trips demanded from `origin` to `destination` during `step`.
    pub fn mobility(&self, od: usize, step: usize) -> f64 {
        self.mobility_raw[od][step] * self.mobility_scale
    }
}

/// Outcome of [`validate_demand`]: empty iff the profile is usable for the run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that demand is nonnegative and covers the run plus one full horizon.
pub fn validate_demand(profile: &DemandProfile, grid: &SoeGrid) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = profile.n_nodes();
    if profile.mobility_raw.len() != n * n {
        report.violations.push(format!(
            "mobility demand has {} pairs, expected {} for {n} nodes",
            profile.mobility_raw.len(),
            n * n
        ));
    }
    if !(profile.mobility_scale >= 0.0 && profile.mobility_scale.is_finite()) {
        report
            .violations
            .push(format!("mobility scale must be nonnegative, got {}", profile.mobility_scale));
    }
    let required = grid.n_sim_steps + grid.horizon_steps;
    if profile.n_steps() < required {
        report.violations.push(format!(
            "demand covers {} steps but the run needs {required} ({} simulated + {} horizon)",
            profile.n_steps(),
            grid.n_sim_steps,
            grid.horizon_steps
        ));
    }
    for (i, series) in profile.power_kwh.iter().enumerate() {
        for (t, x) in series.iter().enumerate() {
            if !(*x >= 0.0) {
                report
                    .violations
                    .push(format!("negative outage demand {x} at node {i}, step {t}"));
            }
        }
    }
    for (od, series) in profile.mobility_raw.iter().enumerate() {
        for (t, x) in series.iter().enumerate() {
            if !(*x >= 0.0) {
                let (o, d) = if n > 0 { (od / n, od % n) } else { (od, 0) };
                report
                    .violations
                    .push(format!("negative trip demand {x} from node {o} to node {d}, step {t}"));
            }
        }
    }
    report
}
