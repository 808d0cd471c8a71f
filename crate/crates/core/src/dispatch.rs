//! Horizon-window dispatch LP.
//!
//! [`build_lp`] encodes `H` steps of the fleet dynamics starting from a known
//! state as a linear program over densities and flows:
//!
//! * state equations link the densities of consecutive window steps through
//!   the same upwind stencil that [`crate::dynamics::step`] applies;
//! * at the last window step the would-be next densities are constrained to be
//!   nonnegative, which bounds the flows that step may use;
//! * boundary rows return the top charging bin and the bottom discharging bin
//!   to idle;
//! * trip departures feed the idle density of the destination `delta_steps`
//!   later and `delta_bins` lower; departures that cannot arrive inside the
//!   window, or that start below the trip energy, are fixed to zero;
//! * outage energy and passenger trips are capped by demand.
//!
//! The objective is the window's operating profit: outage energy served times
//! its price, plus trip fares, minus the grid cost of charging.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{ChargeRates, ControlVector};
use crate::error::{Error, Result};
use crate::grid::FleetState;
use crate::lp::{self, LpProblem, Sense};
use crate::scenario::{FareMode, ScenarioSpec};

/// Variable families of the window LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Charging density.
    U,
    /// Idle density.
    V,
    /// Discharging density.
    W,
    /// Idle to charging flow.
    SigmaIc,
    /// Idle to discharging flow.
    SigmaId,
    /// Departures with passengers, per ordered pair.
    Pax,
    /// Departures without passengers, per ordered pair.
    Empty,
    /// Arrivals with passengers (explicit-arrival mode only).
    ArrPax,
    /// Arrivals without passengers (explicit-arrival mode only).
    ArrEmpty,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::U => "u",
            Family::V => "v",
            Family::W => "w",
            Family::SigmaIc => "sic",
            Family::SigmaId => "sid",
            Family::Pax => "pax",
            Family::Empty => "emp",
            Family::ArrPax => "apax",
            Family::ArrEmpty => "aemp",
        }
    }

    fn per_pair(self) -> bool {
        matches!(self, Family::Pax | Family::Empty | Family::ArrPax | Family::ArrEmpty)
    }
}

const SUBSTITUTED: [Family; 7] = [
    Family::U,
    Family::V,
    Family::W,
    Family::SigmaIc,
    Family::SigmaId,
    Family::Pax,
    Family::Empty,
];
const EXPLICIT: [Family; 9] = [
    Family::U,
    Family::V,
    Family::W,
    Family::SigmaIc,
    Family::SigmaId,
    Family::Pax,
    Family::Empty,
    Family::ArrPax,
    Family::ArrEmpty,
];

/// A tagged LP column. `index` is a node for per-node families and
/// `origin * n + destination` for per-pair families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarTag {
    pub family: Family,
    pub index: usize,
    pub bin: usize,
    pub step: usize,
}

/// Bijection between LP columns and [`VarTag`]s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableIndex {
    n_nodes: usize,
    n_bins: usize,
    horizon: usize,
    families: &'static [Family],
    offsets: Vec<usize>,
}

impl VariableIndex {
    pub fn new(n_nodes: usize, n_bins: usize, horizon: usize, explicit_arrivals: bool) -> Self {
        let families: &'static [Family] = if explicit_arrivals { &EXPLICIT } else { &SUBSTITUTED };
        let mut offsets = Vec::with_capacity(families.len() + 1);
        let mut at = 0;
        for f in families {
            offsets.push(at);
            let width = if f.per_pair() { n_nodes * n_nodes } else { n_nodes };
            at += width * n_bins * horizon;
        }
        offsets.push(at);
        VariableIndex {
            n_nodes,
            n_bins,
            horizon,
            families,
            offsets,
        }
    }

    pub fn n_cols(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    fn family_slot(&self, family: Family) -> Option<usize> {
        self.families.iter().position(|f| *f == family)
    }

    /// Column of `tag`, or `None` if the tag is out of range or its family is absent.
    pub fn col(&self, tag: VarTag) -> Option<usize> {
        let slot = self.family_slot(tag.family)?;
        let width = if tag.family.per_pair() { self.n_nodes * self.n_nodes } else { self.n_nodes };
        if tag.index >= width || tag.bin >= self.n_bins || tag.step >= self.horizon {
            return None;
        }
        Some(self.offsets[slot] + (tag.index * self.horizon + tag.step) * self.n_bins + tag.bin)
    }

    fn c(&self, family: Family, index: usize, bin: usize, step: usize) -> usize {
        self.col(VarTag {
            family,
            index,
            bin,
            step,
        })
        .expect("column tag in range")
    }

    pub fn tag(&self, col: usize) -> Option<VarTag> {
        if col >= self.n_cols() {
            return None;
        }
        let slot = self.offsets.partition_point(|&o| o <= col) - 1;
        let rel = col - self.offsets[slot];
        Some(VarTag {
            family: self.families[slot],
            index: rel / (self.horizon * self.n_bins),
            step: rel / self.n_bins % self.horizon,
            bin: rel % self.n_bins,
        })
    }
}

/// What each LP row encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowTag {
    /// Stencil equality defining `family` at `step + 1`.
    State { family: Family, node: usize, bin: usize, step: usize },
    /// Nonnegativity of the density one step past the window.
    NextNonneg { family: Family, node: usize, bin: usize },
    /// Forced return of the top charging bin.
    ChargeBoundary { node: usize, step: usize },
    /// Forced return of the bottom discharging bin.
    DischargeBoundary { node: usize, step: usize },
    PowerCap { node: usize, step: usize },
    MobilityCap { pair: usize, step: usize },
    /// Explicit arrival definition (explicit-arrival mode only).
    Arrival { family: Family, pair: usize, bin: usize, step: usize },
    /// Charging, discharging and trip departures from idle within the idle stock.
    IdleOutflow { node: usize, bin: usize, step: usize },
}

/// How trip arrivals enter the idle equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrivalMode {
    /// Arrivals are written directly in terms of earlier departures.
    #[default]
    Substituted,
    /// Arrivals get their own columns tied to departures by equality rows.
    Explicit,
}

/// Which outage demand the window LP sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemandVisibility {
    /// Perfect foresight over the window.
    #[default]
    Window,
    /// Only the current step's outage demand is known; it is assumed to persist.
    Persistence,
}

impl std::str::FromStr for DemandVisibility {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "window" => Ok(DemandVisibility::Window),
            "persistence" => Ok(DemandVisibility::Persistence),
            other => Err(format!("unknown demand visibility {other:?} (window | persistence)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub arrivals: ArrivalMode,
    pub visibility: DemandVisibility,
    /// Cost charged per empty trip, $. Repositioning is otherwise free inside
    /// a window, so without it the LP may move empty vehicles between
    /// equally good solutions; the default is far below any real price.
    pub empty_trip_penalty: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            arrivals: ArrivalMode::default(),
            visibility: DemandVisibility::default(),
            empty_trip_penalty: 1e-6,
        }
    }
}

/// One window LP together with its column and row bookkeeping.
#[derive(Debug, Clone)]
pub struct DispatchLp {
    pub problem: LpProblem,
    pub index: VariableIndex,
    pub row_tags: Vec<RowTag>,
    pub window_start: usize,
    node_labels: Vec<String>,
    empty_trip_penalty: f64,
}

/// Kilowatt-hours per unit density per step for charging or discharging.
fn energy_per_density(scenario: &ScenarioSpec) -> f64 {
    let g = &scenario.grid;
    scenario.vehicle.power_kw * g.dx * g.dt_minutes / 60.0
}

/// Builds the LP for the window `[window_start, window_start + H)` starting from `state0`.
pub fn build_lp(
    state0: &FleetState,
    scenario: &ScenarioSpec,
    window_start: usize,
    rates: &ChargeRates,
    opts: &BuildOptions,
) -> Result<DispatchLp> {
    let grid = &scenario.grid;
    rates.check_cfl(grid)?;
    state0.check_shape(grid)?;
    let n = scenario.n_nodes();
    let nb = grid.n_bins;
    let h = grid.horizon_steps;
    let top = nb - 1;
    if state0.n_nodes() != n {
        return Err(Error::Dimension(format!(
            "state has {} nodes, scenario has {n}",
            state0.n_nodes()
        )));
    }
    if window_start + h > scenario.demand.n_steps() {
        return Err(Error::Scenario(format!(
            "demand covers {} steps, window [{window_start}, {}) needs more",
            scenario.demand.n_steps(),
            window_start + h
        )));
    }
    if let Some(e) = state0.in_transit.iter().find(|e| e.arrival_step <= window_start) {
        return Err(Error::Validation(format!(
            "transit entry arrives at step {} but the window starts at {window_start}",
            e.arrival_step
        )));
    }

    let explicit = opts.arrivals == ArrivalMode::Explicit;
    let idx = VariableIndex::new(n, nb, h, explicit);
    let mut p = LpProblem::new(idx.n_cols());
    let mut tags = Vec::new();
    let dt = grid.dt_minutes;
    let dx = grid.dx;
    let nu_c = rates.courant_charge(grid);
    let nu_d = rates.courant_discharge(grid);
    let kwh = energy_per_density(scenario);
    use Family::*;

    // Bounds.
    for i in 0..n {
        for k in 0..nb {
            for s in 0..h {
                for f in [SigmaIc, SigmaId] {
                    p.set_bounds(idx.c(f, i, k, s), f64::NEG_INFINITY, f64::INFINITY);
                }
            }
            p.fix(idx.c(U, i, k, 0), state0.u[i][k]);
            p.fix(idx.c(V, i, k, 0), state0.v[i][k]);
            p.fix(idx.c(W, i, k, 0), state0.w[i][k]);
        }
    }
    for pair in 0..n * n {
        let od = scenario.od.entries()[pair];
        for k in 0..nb {
            for s in 0..h {
                if k < od.delta_bins || s + od.delta_steps > h - 1 {
                    p.fix(idx.c(Pax, pair, k, s), 0.0);
                    p.fix(idx.c(Empty, pair, k, s), 0.0);
                }
            }
        }
    }

    // Objective.
    for i in 0..n {
        let v2b = scenario.prices.outage_per_kwh[i] * kwh;
        let g2v = scenario.prices.grid_price * kwh;
        for k in 0..nb {
            for s in 0..h {
                p.objective[idx.c(W, i, k, s)] = v2b;
                p.objective[idx.c(U, i, k, s)] = -g2v;
            }
        }
    }
    for pair in 0..n * n {
        let fare = scenario.prices.fare_per_step[pair];
        let per_density = match scenario.fare_mode {
            FareMode::PerTrip => fare * dx * dt,
            FareMode::PerMinute => fare * dx,
        };
        for k in 0..nb {
            for s in 0..h {
                p.objective[idx.c(Pax, pair, k, s)] = per_density;
                p.objective[idx.c(Empty, pair, k, s)] = -opts.empty_trip_penalty * dx * dt;
            }
        }
    }

    // Pending arrivals (density) into v at absolute step `t`.
    let pending = |node: usize, bin: usize, t: usize| -> f64 {
        state0
            .in_transit
            .iter()
            .filter(|e| e.destination == node && e.arrival_bin == bin && e.arrival_step == t)
            .map(|e| e.vehicle_count / dx)
            .sum()
    };

    // Stencil rows: for s < H-1 define the next step's density, at s = H-1
    // require it to be nonnegative.
    for s in 0..h {
        let last = s == h - 1;
        for i in 0..n {
            for k in 0..nb {
                // Charging.
                let keep = if k == top { 1.0 } else { 1.0 - nu_c };
                let mut row = vec![(idx.c(U, i, k, s), keep), (idx.c(SigmaIc, i, k, s), dt)];
                if k > 0 {
                    row.push((idx.c(U, i, k - 1, s), nu_c));
                }
                push_stencil(&mut p, &mut tags, &idx, row, U, i, k, s, last, 0.0);

                // Discharging.
                let keep = if k == 0 { 1.0 } else { 1.0 - nu_d };
                let mut row = vec![(idx.c(W, i, k, s), keep), (idx.c(SigmaId, i, k, s), dt)];
                if k < top {
                    row.push((idx.c(W, i, k + 1, s), nu_d));
                }
                push_stencil(&mut p, &mut tags, &idx, row, W, i, k, s, last, 0.0);

                // Idle.
                let mut row = vec![
                    (idx.c(V, i, k, s), 1.0),
                    (idx.c(SigmaIc, i, k, s), -dt),
                    (idx.c(SigmaId, i, k, s), -dt),
                ];
                for j in 0..n {
                    row.push((idx.c(Pax, i * n + j, k, s), -dt));
                    row.push((idx.c(Empty, i * n + j, k, s), -dt));
                }
                for o in 0..n {
                    let pair = o * n + i;
                    if explicit {
                        row.push((idx.c(ArrPax, pair, k, s), 1.0));
                        row.push((idx.c(ArrEmpty, pair, k, s), 1.0));
                    } else if let Some((kd, sd)) = departure_of(&scenario.od.entries()[pair], k, s, nb) {
                        row.push((idx.c(Pax, pair, kd, sd), dt));
                        row.push((idx.c(Empty, pair, kd, sd), dt));
                    }
                }
                // Outflow from the current idle stock, before any arrivals.
                let outflow: Vec<(usize, f64)> = row[1..2 * n + 3]
                    .iter()
                    .map(|&(c, a)| (c, -a))
                    .chain(std::iter::once((idx.c(V, i, k, s), -1.0)))
                    .collect();
                p.add_row(outflow, Sense::Le, 0.0);
                tags.push(RowTag::IdleOutflow { node: i, bin: k, step: s });
                // At the last step the outflow row already keeps idle nonnegative.
                if !last {
                    let inflow = pending(i, k, window_start + s + 1);
                    push_stencil(&mut p, &mut tags, &idx, row, V, i, k, s, last, inflow);
                }
            }
        }
    }

    // Explicit arrivals: arrival density into v at step s + 1.
    if explicit {
        for pair in 0..n * n {
            let od = scenario.od.entries()[pair];
            for k in 0..nb {
                for s in 0..h {
                    for (af, df) in [(ArrPax, Pax), (ArrEmpty, Empty)] {
                        let mut row = vec![(idx.c(af, pair, k, s), 1.0)];
                        if let Some((kd, sd)) = departure_of(&od, k, s, nb) {
                            row.push((idx.c(df, pair, kd, sd), -dt));
                        }
                        p.add_row(row, Sense::Eq, 0.0);
                        tags.push(RowTag::Arrival {
                            family: af,
                            pair,
                            bin: k,
                            step: s,
                        });
                    }
                }
            }
        }
    }

    // Boundary returns.
    for i in 0..n {
        for s in 0..h {
            p.add_row(
                [(idx.c(SigmaIc, i, top, s), dt), (idx.c(U, i, top, s), 1.0)],
                Sense::Eq,
                0.0,
            );
            tags.push(RowTag::ChargeBoundary { node: i, step: s });
            p.add_row([(idx.c(SigmaId, i, 0, s), dt), (idx.c(W, i, 0, s), 1.0)], Sense::Eq, 0.0);
            tags.push(RowTag::DischargeBoundary { node: i, step: s });
        }
    }

    // Demand caps. Step 0 discharging is already fixed by the state, so its cap
    // is not a decision.
    for i in 0..n {
        for s in 1..h {
            let t = match opts.visibility {
                DemandVisibility::Window => window_start + s,
                DemandVisibility::Persistence => window_start,
            };
            let cap = scenario.demand.power(i, t);
            if cap.is_infinite() {
                continue;
            }
            p.add_row((0..nb).map(|k| (idx.c(W, i, k, s), kwh)), Sense::Le, cap);
            tags.push(RowTag::PowerCap { node: i, step: s });
        }
    }
    for pair in 0..n * n {
        for s in 0..h {
            let cap = scenario.demand.mobility(pair, window_start + s);
            if cap.is_infinite() {
                continue;
            }
            p.add_row((0..nb).map(|k| (idx.c(Pax, pair, k, s), dx * dt)), Sense::Le, cap);
            tags.push(RowTag::MobilityCap { pair, step: s });
        }
    }

    debug_assert_eq!(p.n_rows(), tags.len());
    Ok(DispatchLp {
        problem: p,
        index: idx,
        row_tags: tags,
        window_start,
        node_labels: scenario.nodes.iter().map(|n| n.as_str().to_owned()).collect(),
        empty_trip_penalty: opts.empty_trip_penalty,
    })
}

/// Departure `(bin, step)` whose arrival lands in bin `k` at window step `s + 1`.
fn departure_of(od: &crate::scenario::OdEntry, k: usize, s: usize, nb: usize) -> Option<(usize, usize)> {
    let kd = k + od.delta_bins;
    if kd >= nb || s + 1 < od.delta_steps {
        return None;
    }
    Some((kd, s + 1 - od.delta_steps))
}

#[allow(clippy::too_many_arguments)]
fn push_stencil(
    p: &mut LpProblem,
    tags: &mut Vec<RowTag>,
    idx: &VariableIndex,
    mut row: Vec<(usize, f64)>,
    family: Family,
    node: usize,
    bin: usize,
    s: usize,
    last: bool,
    inflow: f64,
) {
    if last {
        // expression + inflow >= 0
        p.add_row(row, Sense::Ge, -inflow);
        tags.push(RowTag::NextNonneg { family, node, bin });
    } else {
        // next = expression + inflow
        for entry in row.iter_mut() {
            entry.1 = -entry.1;
        }
        row.push((idx.c(family, node, bin, s + 1), 1.0));
        p.add_row(row, Sense::Eq, inflow);
        tags.push(RowTag::State {
            family,
            node,
            bin,
            step: s,
        });
    }
}

/// Reads the flow controls of window step `step` out of a solution vector.
/// Values within `1e-9` of zero are set to zero and trip departures are
/// clipped at zero.
pub fn extract_controls(x: &[f64], idx: &VariableIndex, step: usize) -> Result<ControlVector> {
    if x.len() != idx.n_cols() {
        return Err(Error::Dimension(format!(
            "solution has {} values, index has {} columns",
            x.len(),
            idx.n_cols()
        )));
    }
    if step >= idx.horizon {
        return Err(Error::Dimension(format!("step {step} outside horizon {}", idx.horizon)));
    }
    let (n, nb) = (idx.n_nodes, idx.n_bins);
    let clean = |v: f64| if v.abs() < 1e-9 { 0.0 } else { v };
    let mut ctrl = ControlVector::zeros(n, nb);
    for k in 0..nb {
        for i in 0..n {
            ctrl.sigma_ic[i][k] = clean(x[idx.c(Family::SigmaIc, i, k, step)]);
            ctrl.sigma_id[i][k] = clean(x[idx.c(Family::SigmaId, i, k, step)]);
        }
        for pair in 0..n * n {
            ctrl.sigma_trip_pax[pair][k] = clean(x[idx.c(Family::Pax, pair, k, step)]).max(0.0);
            ctrl.sigma_trip_empty[pair][k] = clean(x[idx.c(Family::Empty, pair, k, step)]).max(0.0);
        }
    }
    Ok(ctrl)
}

/// Objective of a window solution, recomputed from served quantities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveAudit {
    pub v2b_revenue: f64,
    pub trips_revenue: f64,
    pub g2v_cost: f64,
    pub discharged_kwh: f64,
    pub charged_kwh: f64,
    pub trips: f64,
    pub empty_trips: f64,
    /// Tie-break cost of empty trips (see [`BuildOptions::empty_trip_penalty`]).
    pub empty_trip_penalty: f64,
}

impl ObjectiveAudit {
    /// Window profit including the empty-trip tie-break; equals the LP objective.
    pub fn total(&self) -> f64 {
        self.trips_revenue + self.v2b_revenue - self.g2v_cost - self.empty_trip_penalty
    }
}

impl DispatchLp {
    /// Recomputes the objective from the discharged energy, charged energy and
    /// served trips implied by `x`, independently of the objective vector.
    pub fn audit(&self, x: &[f64], scenario: &ScenarioSpec) -> ObjectiveAudit {
        let penalty = self.empty_trip_penalty;
        let idx = &self.index;
        let (n, nb, h) = (idx.n_nodes, idx.n_bins, idx.horizon);
        let g = &scenario.grid;
        let mut a = ObjectiveAudit::default();
        for s in 0..h {
            for i in 0..n {
                let w: f64 = (0..nb).map(|k| x[idx.c(Family::W, i, k, s)]).sum();
                let u: f64 = (0..nb).map(|k| x[idx.c(Family::U, i, k, s)]).sum();
                let q_dis = scenario.vehicle.power_kw * w * g.dx * g.dt_minutes / 60.0;
                let q_ch = scenario.vehicle.power_kw * u * g.dx * g.dt_minutes / 60.0;
                a.discharged_kwh += q_dis;
                a.charged_kwh += q_ch;
                a.v2b_revenue += scenario.prices.outage_per_kwh[i] * q_dis;
                a.g2v_cost += scenario.prices.grid_price * q_ch;
            }
            for pair in 0..n * n {
                let trips: f64 = (0..nb).map(|k| x[idx.c(Family::Pax, pair, k, s)]).sum::<f64>() * g.dx * g.dt_minutes;
                a.trips += trips;
                let empty: f64 =
                    (0..nb).map(|k| x[idx.c(Family::Empty, pair, k, s)]).sum::<f64>() * g.dx * g.dt_minutes;
                a.empty_trips += empty;
                a.empty_trip_penalty += penalty * empty;
                a.trips_revenue += scenario
                    .fare_mode
                    .trip_revenue(scenario.prices.fare_per_step[pair], trips, g.dt_minutes);
            }
        }
        a
    }

    /// Human-readable column name, e.g. `w_IV_b3_s1` or `pax_I_II_b2_s0`.
    pub fn column_name(&self, col: usize) -> String {
        let t = self.index.tag(col).expect("column in range");
        let n = self.index.n_nodes;
        let place = if t.family.per_pair() {
            format!("{}_{}", self.node_labels[t.index / n], self.node_labels[t.index % n])
        } else {
            self.node_labels[t.index].clone()
        };
        format!("{}_{place}_b{}_s{}", t.family.name(), t.bin, t.step)
    }

    pub fn row_name(&self, row: usize) -> String {
        let n = self.index.n_nodes;
        let node = |i: usize| &self.node_labels[i];
        let pair = |p: usize| format!("{}_{}", self.node_labels[p / n], self.node_labels[p % n]);
        match self.row_tags[row] {
            RowTag::State { family, node: i, bin, step } => {
                format!("st_{}_{}_b{bin}_s{step}", family.name(), node(i))
            }
            RowTag::NextNonneg { family, node: i, bin } => format!("nn_{}_{}_b{bin}", family.name(), node(i)),
            RowTag::ChargeBoundary { node: i, step } => format!("bc_{}_s{step}", node(i)),
            RowTag::DischargeBoundary { node: i, step } => format!("bd_{}_s{step}", node(i)),
            RowTag::PowerCap { node: i, step } => format!("cap_dis_{}_s{step}", node(i)),
            RowTag::MobilityCap { pair: p, step } => format!("cap_mob_{}_s{step}", pair(p)),
            RowTag::IdleOutflow { node: i, bin, step } => format!("out_v_{}_b{bin}_s{step}", node(i)),
            RowTag::Arrival { family, pair: p, bin, step } => {
                format!("arr_{}_{}_b{bin}_s{step}", family.name(), pair(p))
            }
        }
    }

    /// Writes the LP in CPLEX LP format with descriptive names.
    pub fn write_lp<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        lp::write_lp_format(&self.problem, out, |j| self.column_name(j), |i| self.row_name(i))
    }
}
