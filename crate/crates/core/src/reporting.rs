//! Revenue decomposition, annualization and file outputs for completed runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::controller::RunLog;
use crate::dynamics::Census;
use crate::error::{Error, Result};
use crate::scenario::ScenarioSpec;

/// Realized revenue of a run, its components and the demand-limited maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevenueReport {
    pub label: String,
    pub fleet_size: f64,
    pub g2v_cost: f64,
    pub trips_revenue: f64,
    pub v2b_revenue: f64,
    pub total: f64,
    /// Revenue from serving every trip and every kWh of outage load at zero charging cost.
    pub max_possible: f64,
    pub per_vehicle: PerVehicle,
    /// Unserved trips by origin node.
    pub unserved_trips: Vec<f64>,
    /// Unserved outage energy by node, kWh.
    pub unserved_kwh: Vec<f64>,
    /// V2B revenue relative to the rest of the day's profit, percent (per event).
    pub v2b_uplift_percent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerVehicle {
    pub g2v_cost: f64,
    pub trips_revenue: f64,
    pub v2b_revenue: f64,
    pub total: f64,
    pub max_possible: f64,
}

pub fn revenue_report(log: &RunLog, scenario: &ScenarioSpec) -> RevenueReport {
    let n = log.nodes.len();
    let dt = scenario.grid.dt_minutes;
    let mut max_possible = 0.0;
    let mut unserved_trips = vec![0.0; n];
    let mut unserved_kwh = vec![0.0; n];
    for s in &log.steps {
        for i in 0..n {
            max_possible += s.power_demanded_kwh[i] * scenario.prices.outage_per_kwh[i];
            unserved_kwh[i] += s.power_unserved_kwh[i];
        }
        for pair in 0..n * n {
            max_possible += scenario
                .fare_mode
                .trip_revenue(scenario.prices.fare_per_step[pair], s.trips_demanded[pair], dt);
            unserved_trips[pair / n] += s.trips_unserved[pair];
        }
    }
    let t = &log.totals;
    let per = |x: f64| if log.fleet_size > 0.0 { x / log.fleet_size } else { 0.0 };
    let rest = t.total - t.v2b_revenue;
    RevenueReport {
        label: log.label.clone(),
        fleet_size: log.fleet_size,
        g2v_cost: t.g2v_cost,
        trips_revenue: t.trips_revenue,
        v2b_revenue: t.v2b_revenue,
        total: t.total,
        max_possible,
        per_vehicle: PerVehicle {
            g2v_cost: per(t.g2v_cost),
            trips_revenue: per(t.trips_revenue),
            v2b_revenue: per(t.v2b_revenue),
            total: per(t.total),
            max_possible: per(max_possible),
        },
        unserved_trips,
        unserved_kwh,
        v2b_uplift_percent: if rest > 0.0 { t.v2b_revenue / rest * 100.0 } else { 0.0 },
    }
}

/// One row of the annualization table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnualRow {
    pub extreme_days: u32,
    /// `N * extreme + (365 - N) * moderate`, $.
    pub annual_revenue: f64,
    /// `365 * moderate`, $ (the moderate day stands in for a mobility-only day).
    pub baseline: f64,
    /// `(annual - baseline) / fleet`, $ per vehicle per year.
    pub new_revenue_per_vehicle: f64,
    /// `(annual - baseline) / baseline * 100`.
    pub percent_increase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualizationTable {
    pub fleet_size: f64,
    pub rows: Vec<AnnualRow>,
}

/// Annual revenue gained by serving outage load, for each count of extreme days.
pub fn annualize(
    extreme: &RevenueReport,
    moderate: &RevenueReport,
    extreme_days: &[u32],
    fleet_size: f64,
) -> Result<AnnualizationTable> {
    if extreme.fleet_size != moderate.fleet_size || extreme.fleet_size != fleet_size {
        return Err(Error::Validation(format!(
            "fleet sizes differ: extreme {}, moderate {}, requested {fleet_size}",
            extreme.fleet_size, moderate.fleet_size
        )));
    }
    if !(fleet_size > 0.0) {
        return Err(Error::Validation("fleet size must be positive".into()));
    }
    if let Some(d) = extreme_days.iter().find(|d| **d > 365) {
        return Err(Error::Validation(format!("{d} extreme days exceed a year")));
    }
    let baseline = 365.0 * moderate.total;
    let rows = extreme_days
        .iter()
        .map(|&d| {
            let nd = f64::from(d);
            let annual = nd * extreme.total + (365.0 - nd) * moderate.total;
            let gain = annual - baseline;
            AnnualRow {
                extreme_days: d,
                annual_revenue: annual,
                baseline,
                new_revenue_per_vehicle: gain / fleet_size,
                percent_increase: if baseline != 0.0 { gain / baseline * 100.0 } else { 0.0 },
            }
        })
        .collect();
    Ok(AnnualizationTable { fleet_size, rows })
}

/// Rounds to `digits` significant figures.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let io_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(&r).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the CSV outputs and a plot manifest into `out_dir`. Every file name
/// carries `suffix` before its extension (e.g. `_7500`), so several runs can
/// share a directory.
pub fn emit_outputs(
    report: &RevenueReport,
    log: &RunLog,
    annual: Option<&AnnualizationTable>,
    out_dir: impl AsRef<Path>,
    suffix: &str,
) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = |stem: &str, ext: &str| dir.join(format!("{stem}{suffix}.{ext}"));
    let f = |x: f64| format!("{x}");
    let mut written = Vec::new();

    let path = name("revenue_decomposition", "csv");
    let mut rows: Vec<Vec<String>> = log
        .steps
        .iter()
        .map(|s| {
            vec![
                s.step.to_string(),
                f(s.g2v_cost),
                f(s.trips_revenue),
                f(s.v2b_revenue),
                f(s.total),
            ]
        })
        .collect();
    if !log.steps.is_empty() {
        rows.push(vec![
            "total".into(),
            f(report.g2v_cost),
            f(report.trips_revenue),
            f(report.v2b_revenue),
            f(report.total),
        ]);
    }
    write_csv(&path, &["step", "g2v_cost", "trips_revenue", "v2b_revenue", "total"], rows)?;
    written.push(path);

    let path = name("revenue_summary", "csv");
    let p = &report.per_vehicle;
    let rows = if log.steps.is_empty() {
        Vec::new()
    } else {
        [
            ("g2v_cost", report.g2v_cost, p.g2v_cost),
            ("trips_revenue", report.trips_revenue, p.trips_revenue),
            ("v2b_revenue", report.v2b_revenue, p.v2b_revenue),
            ("total", report.total, p.total),
            ("max_possible", report.max_possible, p.max_possible),
        ]
        .into_iter()
        .map(|(c, usd, pv)| vec![c.to_owned(), f(usd), f(pv), f(round_sig(pv, 2))])
        .collect()
    };
    write_csv(
        &path,
        &["component", "usd", "usd_per_vehicle", "usd_per_vehicle_2sf"],
        rows,
    )?;
    written.push(path);

    let path = name("state_timeseries", "csv");
    let mut header = vec!["step"];
    header.extend(Census::LABELS);
    header.push("total");
    let rows = log.steps.iter().map(|s| {
        let mut r = vec![s.step.to_string()];
        r.extend(s.census.as_array().iter().map(|x| f(*x)));
        r.push(f(s.census.total()));
        r
    });
    write_csv(&path, &header, rows)?;
    written.push(path);

    let path = name("unserved", "csv");
    let n = log.nodes.len();
    let mut rows = Vec::new();
    for s in &log.steps {
        for i in 0..n {
            rows.push(vec![
                s.step.to_string(),
                "power_kwh".into(),
                log.nodes[i].clone(),
                f(s.power_demanded_kwh[i]),
                f(s.power_served_kwh[i]),
                f(s.power_unserved_kwh[i]),
            ]);
        }
        for pair in 0..n * n {
            rows.push(vec![
                s.step.to_string(),
                "trips".into(),
                format!("{}->{}", log.nodes[pair / n], log.nodes[pair % n]),
                f(s.trips_demanded[pair]),
                f(s.trips_served[pair]),
                f(s.trips_unserved[pair]),
            ]);
        }
    }
    write_csv(&path, &["step", "kind", "key", "demanded", "served", "unserved"], rows)?;
    written.push(path);

    let path = name("annualization", "csv");
    let rows = annual.into_iter().flat_map(|t| {
        t.rows.iter().map(move |r| {
            vec![
                r.extreme_days.to_string(),
                f(t.fleet_size),
                f(r.new_revenue_per_vehicle),
                f(round_sig(r.new_revenue_per_vehicle, 2)),
                f(r.percent_increase),
                f(round_sig(r.percent_increase, 2)),
            ]
        })
    });
    write_csv(
        &path,
        &[
            "extreme_days",
            "fleet_size",
            "new_revenue_per_vehicle",
            "new_revenue_per_vehicle_2sf",
            "percent_increase",
            "percent_increase_2sf",
        ],
        rows,
    )?;
    written.push(path);

    let path = name("plots", "toml");
    let manifest = plot_manifest(suffix, report);
    std::fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

#[derive(Serialize)]
struct Manifest {
    label: String,
    fleet_size: f64,
    v2b_uplift_percent: f64,
    series: Vec<Series>,
}

#[derive(Serialize)]
struct Series {
    name: String,
    file: String,
    x: String,
    y: Vec<String>,
    x_unit: String,
    y_unit: String,
    kind: String,
}

fn plot_manifest(suffix: &str, report: &RevenueReport) -> String {
    let s = |name: &str, stem: &str, x: &str, y: &[&str], xu: &str, yu: &str, kind: &str| Series {
        name: name.into(),
        file: format!("{stem}{suffix}.csv"),
        x: x.into(),
        y: y.iter().map(|c| c.to_string()).collect(),
        x_unit: xu.into(),
        y_unit: yu.into(),
        kind: kind.into(),
    };
    let mut census: Vec<&str> = Census::LABELS.to_vec();
    census.push("total");
    let m = Manifest {
        label: report.label.clone(),
        fleet_size: report.fleet_size,
        v2b_uplift_percent: report.v2b_uplift_percent,
        series: vec![
            s(
                "Revenue decomposition per vehicle",
                "revenue_summary",
                "component",
                &["usd_per_vehicle"],
                "",
                "USD per vehicle per day",
                "bar",
            ),
            s(
                "Revenue per step",
                "revenue_decomposition",
                "step",
                &["g2v_cost", "trips_revenue", "v2b_revenue", "total"],
                "10-minute step",
                "USD",
                "line",
            ),
            s(
                "Vehicles in each state",
                "state_timeseries",
                "step",
                &census,
                "10-minute step",
                "vehicles",
                "stacked-area",
            ),
            s(
                "Unserved demand",
                "unserved",
                "step",
                &["unserved"],
                "10-minute step",
                "kWh (power_kwh rows) or trips (trips rows)",
                "line",
            ),
            s(
                "Annual revenue from serving outage load",
                "annualization",
                "extreme_days",
                &["new_revenue_per_vehicle", "percent_increase"],
                "days per year",
                "USD per vehicle per year; percent",
                "table",
            ),
        ],
    };
    toml::to_string(&m).expect("manifest serializes")
}
