//! Scenario file schema.
//!
//! ```toml
//! label = "extreme-2014-12-31"
//! nodes = ["I", "II", "IV"]
//! fleet_size = 7500
//! initial_weights = [0.3333333333333333, 0.3333333333333333, 0.3333333333333334] # optional
//!
//! [grid]
//! dx = 0.2
//! dt_minutes = 10
//! horizon_steps = 5
//! sim_steps = 144
//! quantization = "ceiling"          # or "nearest"
//!
//! [vehicle]
//! power_kw = 7
//! battery_kwh = 10
//! charge_efficiency = 0.86
//!
//! [prices]
//! grid_usd_per_kwh = 0.25
//! fare_mode = "per-trip"            # or "per-minute"
//!
//! [demand]
//! power = "power_demand.csv"        # node,step,value        (kWh per step)
//! mobility = "mobility_demand.csv"  # node,dest,step,value   (trips per step, unscaled)
//! mobility_scale = 10
//!
//! [[outage_price]]
//! node = "I"
//! usd_per_kwh = 20
//! usd_per_step = 23
//!
//! [[trip]]
//! origin = "I"
//! destination = "IV"
//! energy_kwh = 0.93
//! duration_s = 1000
//!
//! [[fare]]
//! origin = "I"
//! destination = "IV"
//! usd_per_kwh = 20
//! usd_per_step = 9
//! ```
//!
//! CSV paths are resolved relative to the scenario file. Every node (or
//! ordered pair) must have one row for each step `0..n` with no gaps.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DemandProfile, FareMode, OdTable, PriceTable, Quantization, ScenarioSpec, VehicleParams};
use crate::error::{Error, Result};
use crate::grid::{NodeId, SoeGrid};

pub const POWER_HEADER: [&str; 3] = ["node", "step", "value"];
pub const MOBILITY_HEADER: [&str; 4] = ["node", "dest", "step", "value"];

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    label: String,
    nodes: Vec<String>,
    fleet_size: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_weights: Option<Vec<f64>>,
    grid: GridSection,
    #[serde(default)]
    vehicle: VehicleSection,
    #[serde(default)]
    prices: PricesSection,
    demand: DemandSection,
    outage_price: Vec<OutagePriceRow>,
    trip: Vec<TripRow>,
    fare: Vec<FareRow>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    dx: f64,
    dt_minutes: f64,
    horizon_steps: usize,
    sim_steps: usize,
    #[serde(default)]
    quantization: Quantization,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct VehicleSection {
    power_kw: f64,
    battery_kwh: f64,
    charge_efficiency: f64,
}

impl Default for VehicleSection {
    fn default() -> Self {
        let v = VehicleParams::default();
        VehicleSection {
            power_kw: v.power_kw,
            battery_kwh: v.battery_kwh,
            charge_efficiency: v.charge_efficiency,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PricesSection {
    grid_usd_per_kwh: f64,
    fare_mode: FareMode,
}

impl Default for PricesSection {
    fn default() -> Self {
        PricesSection {
            grid_usd_per_kwh: 0.25,
            fare_mode: FareMode::PerTrip,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DemandSection {
    power: String,
    mobility: String,
    #[serde(default = "default_mobility_scale")]
    mobility_scale: f64,
}

fn default_mobility_scale() -> f64 {
    10.0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutagePriceRow {
    node: String,
    usd_per_kwh: f64,
    usd_per_step: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TripRow {
    origin: String,
    destination: String,
    energy_kwh: f64,
    duration_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FareRow {
    origin: String,
    destination: String,
    usd_per_kwh: f64,
    usd_per_step: f64,
}

/// Loads and validates a scenario file; CSV paths resolve relative to it.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, |name| {
        let p = base.join(name);
        std::fs::read_to_string(&p).map_err(|e| Error::io(p, e))
    })
}

/// Parses a scenario document, fetching referenced CSV files through `read_csv`.
pub fn parse_scenario(text: &str, read_csv: impl Fn(&str) -> Result<String>) -> Result<ScenarioSpec> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| Error::Scenario(format!("malformed scenario file: {e}")))?;

    let nodes: Vec<NodeId> = file.nodes.iter().map(|s| NodeId::new(s.as_str())).collect();
    let n = nodes.len();
    if n == 0 {
        return Err(Error::Scenario("scenario lists no nodes".into()));
    }
    let index = |label: &str, table: &str| -> Result<usize> {
        nodes
            .iter()
            .position(|x| x.as_str() == label)
            .ok_or_else(|| Error::Scenario(format!("unknown node label {label:?} in {table}")))
    };

    let grid = SoeGrid::with_dx(
        file.grid.dx,
        file.grid.dt_minutes,
        file.grid.horizon_steps,
        file.grid.sim_steps,
    )?;
    let vehicle = VehicleParams {
        power_kw: file.vehicle.power_kw,
        battery_kwh: file.vehicle.battery_kwh,
        charge_efficiency: file.vehicle.charge_efficiency,
    };

    let mut outage_kwh = vec![None; n];
    let mut outage_step = vec![0.0; n];
    for row in &file.outage_price {
        let i = index(&row.node, "outage_price")?;
        if outage_kwh[i].replace(row.usd_per_kwh).is_some() {
            return Err(Error::Scenario(format!("duplicate outage price for node {}", row.node)));
        }
        outage_step[i] = row.usd_per_step;
    }
    let outage_per_kwh = collect_complete(outage_kwh, |i| {
        format!("outage price table has no entry for node {}", nodes[i])
    })?;

    let pair_name = |od: usize| format!("{} -> {}", nodes[od / n], nodes[od % n]);

    let mut trips = vec![None; n * n];
    for row in &file.trip {
        let od = index(&row.origin, "trip")? * n + index(&row.destination, "trip")?;
        if trips[od].replace((row.energy_kwh, row.duration_s)).is_some() {
            return Err(Error::Scenario(format!("duplicate trip entry for {}", pair_name(od))));
        }
    }
    let trips = collect_complete(trips, |od| format!("trip table has no entry for {}", pair_name(od)))?;

    let mut fares = vec![None; n * n];
    for row in &file.fare {
        let od = index(&row.origin, "fare")? * n + index(&row.destination, "fare")?;
        if fares[od].replace((row.usd_per_kwh, row.usd_per_step)).is_some() {
            return Err(Error::Scenario(format!("duplicate fare entry for {}", pair_name(od))));
        }
    }
    let fares = collect_complete(fares, |od| format!("fare table has no entry for {}", pair_name(od)))?;

    let prices = PriceTable {
        outage_per_kwh,
        outage_per_step: outage_step,
        fare_per_step: fares.iter().map(|f| f.1).collect(),
        fare_per_kwh: fares.iter().map(|f| f.0).collect(),
        grid_price: file.prices.grid_usd_per_kwh,
    };

    let od = OdTable::new(n, &trips, &grid, vehicle.battery_kwh, file.grid.quantization)?;

    let power_text = read_csv(&file.demand.power)?;
    let mobility_text = read_csv(&file.demand.mobility)?;
    let power_kwh = parse_power_csv(&power_text, &nodes)?;
    let mobility_raw = parse_mobility_csv(&mobility_text, &nodes)?;
    let demand = DemandProfile {
        power_kwh,
        mobility_raw,
        mobility_scale: file.demand.mobility_scale,
    };

    let initial_weights = file.initial_weights.unwrap_or_else(|| vec![1.0 / n as f64; n]);

    let spec = ScenarioSpec {
        label: file.label,
        nodes,
        grid,
        vehicle,
        quantization: file.grid.quantization,
        fare_mode: file.prices.fare_mode,
        od,
        prices,
        demand,
        fleet_size: file.fleet_size,
        initial_weights,
    };
    spec.validate()?;
    Ok(spec)
}

fn collect_complete<T>(items: Vec<Option<T>>, missing: impl Fn(usize) -> String) -> Result<Vec<T>> {
    items
        .into_iter()
        .enumerate()
        .map(|(i, x)| x.ok_or_else(|| Error::Scenario(missing(i))))
        .collect()
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str], what: &str) -> Result<()> {
    let header = rdr
        .headers()
        .map_err(|e| Error::Scenario(format!("{what}: {e}")))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Scenario(format!(
            "{what}: header must be {:?}, found {:?}",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str, line: u64) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Scenario(format!("{what} line {line}: cannot parse {s:?}")))
}

/// Fills a dense `[series][step]` table, rejecting duplicates and gaps.
fn densify(
    cells: Vec<(usize, usize, f64)>,
    n_series: usize,
    series_name: impl Fn(usize) -> String,
    what: &str,
) -> Result<Vec<Vec<f64>>> {
    let n_steps = cells.iter().map(|c| c.1 + 1).max().unwrap_or(0);
    let mut table = vec![vec![None; n_steps]; n_series];
    for (s, t, x) in cells {
        if table[s][t].replace(x).is_some() {
            return Err(Error::Scenario(format!(
                "{what}: duplicate row for {} step {t}",
                series_name(s)
            )));
        }
    }
    table
        .into_iter()
        .enumerate()
        .map(|(s, row)| {
            row.into_iter()
                .enumerate()
                .map(|(t, x)| {
                    x.ok_or_else(|| {
                        Error::Scenario(format!("{what}: missing row for {} step {t}", series_name(s)))
                    })
                })
                .collect()
        })
        .collect()
}

fn node_lookup<'a>(nodes: &'a [NodeId], what: &'a str) -> impl Fn(&str, u64) -> Result<usize> + 'a {
    move |label, line| {
        nodes
            .iter()
            .position(|x| x.as_str() == label)
            .ok_or_else(|| Error::Scenario(format!("{what} line {line}: unknown node label {label:?}")))
    }
}

pub(crate) fn parse_power_csv(text: &str, nodes: &[NodeId]) -> Result<Vec<Vec<f64>>> {
    let what = "power demand";
    let mut rdr = csv_reader(text);
    check_header(&mut rdr, &POWER_HEADER, what)?;
    let lookup = node_lookup(nodes, what);
    let mut cells = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Scenario(format!("{what}: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        let node = lookup(&rec[0], line)?;
        cells.push((node, parse_field(&rec[1], what, line)?, parse_field(&rec[2], what, line)?));
    }
    densify(cells, nodes.len(), |i| format!("node {}", nodes[i]), what)
}

pub(crate) fn parse_mobility_csv(text: &str, nodes: &[NodeId]) -> Result<Vec<Vec<f64>>> {
    let what = "mobility demand";
    let n = nodes.len();
    let mut rdr = csv_reader(text);
    check_header(&mut rdr, &MOBILITY_HEADER, what)?;
    let lookup = node_lookup(nodes, what);
    let mut cells = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Scenario(format!("{what}: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        let od = lookup(&rec[0], line)? * n + lookup(&rec[1], line)?;
        cells.push((od, parse_field(&rec[2], what, line)?, parse_field(&rec[3], what, line)?));
    }
    densify(
        cells,
        n * n,
        |od| format!("pair {} -> {}", nodes[od / n], nodes[od % n]),
        what,
    )
}

pub(crate) fn power_csv(spec: &ScenarioSpec) -> String {
    let mut out = POWER_HEADER.join(",");
    out.push('\n');
    for (i, series) in spec.demand.power_kwh.iter().enumerate() {
        for (t, x) in series.iter().enumerate() {
            let _ = writeln!(out, "{},{t},{x}", spec.nodes[i]);
        }
    }
    out
}

pub(crate) fn mobility_csv(spec: &ScenarioSpec) -> String {
    let n = spec.n_nodes();
    let mut out = MOBILITY_HEADER.join(",");
    out.push('\n');
    for (od, series) in spec.demand.mobility_raw.iter().enumerate() {
        for (t, x) in series.iter().enumerate() {
            let _ = writeln!(out, "{},{},{t},{x}", spec.nodes[od / n], spec.nodes[od % n]);
        }
    }
    out
}

pub(crate) fn scenario_toml(spec: &ScenarioSpec, power_file: &str, mobility_file: &str) -> String {
    let n = spec.n_nodes();
    let pairs = || (0..n * n).map(|od| (od, spec.nodes[od / n].to_string(), spec.nodes[od % n].to_string()));
    let file = ScenarioFile {
        label: spec.label.clone(),
        nodes: spec.nodes.iter().map(|x| x.to_string()).collect(),
        fleet_size: spec.fleet_size,
        initial_weights: Some(spec.initial_weights.clone()),
        grid: GridSection {
            dx: spec.grid.dx,
            dt_minutes: spec.grid.dt_minutes,
            horizon_steps: spec.grid.horizon_steps,
            sim_steps: spec.grid.n_sim_steps,
            quantization: spec.quantization,
        },
        vehicle: VehicleSection {
            power_kw: spec.vehicle.power_kw,
            battery_kwh: spec.vehicle.battery_kwh,
            charge_efficiency: spec.vehicle.charge_efficiency,
        },
        prices: PricesSection {
            grid_usd_per_kwh: spec.prices.grid_price,
            fare_mode: spec.fare_mode,
        },
        demand: DemandSection {
            power: power_file.to_owned(),
            mobility: mobility_file.to_owned(),
            mobility_scale: spec.demand.mobility_scale,
        },
        outage_price: (0..n)
            .map(|i| OutagePriceRow {
                node: spec.nodes[i].to_string(),
                usd_per_kwh: spec.prices.outage_per_kwh[i],
                usd_per_step: spec.prices.outage_per_step[i],
            })
            .collect(),
        trip: pairs()
            .map(|(od, origin, destination)| {
                let e = &spec.od.entries()[od];
                TripRow {
                    origin,
                    destination,
                    energy_kwh: e.delta_x_kwh,
                    duration_s: e.delta_t_seconds,
                }
            })
            .collect(),
        fare: pairs()
            .map(|(od, origin, destination)| FareRow {
                origin,
                destination,
                usd_per_kwh: spec.prices.fare_per_kwh[od],
                usd_per_step: spec.prices.fare_per_step[od],
            })
            .collect(),
    };
    toml::to_string(&file).expect("scenario schema serializes")
}

/// In-memory form of a saved scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerializedScenario {
    pub scenario_toml: String,
    pub power_csv: String,
    pub mobility_csv: String,
}

impl SerializedScenario {
    /// Parses the documents back into a validated scenario.
    pub fn parse(&self) -> Result<ScenarioSpec> {
        parse_scenario(&self.scenario_toml, |name| match name {
            "power_demand.csv" => Ok(self.power_csv.clone()),
            "mobility_demand.csv" => Ok(self.mobility_csv.clone()),
            other => Err(Error::Scenario(format!("unknown demand file {other:?}"))),
        })
    }
}

pub fn serialize_scenario(spec: &ScenarioSpec) -> SerializedScenario {
    SerializedScenario {
        scenario_toml: scenario_toml(spec, "power_demand.csv", "mobility_demand.csv"),
        power_csv: power_csv(spec),
        mobility_csv: mobility_csv(spec),
    }
}

/// Writes `scenario.toml`, `power_demand.csv` and `mobility_demand.csv` into `dir`.
pub fn save_scenario(spec: &ScenarioSpec, dir: impl AsRef<Path>) -> Result<std::path::PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ser = serialize_scenario(spec);
    let files = [
        ("scenario.toml", ser.scenario_toml),
        ("power_demand.csv", ser.power_csv),
        ("mobility_demand.csv", ser.mobility_csv),
    ];
    for (name, body) in &files {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(p, e))?;
    }
    Ok(dir.join("scenario.toml"))
}
