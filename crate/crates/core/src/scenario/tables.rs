//! Plain-text renderings of the trip, outage-price and fare tables of a scenario.
//!
//! Numbers print in their shortest exact form, with integers shown without a
//! decimal point, so the output can be compared byte-for-byte against
//! reference tables.

use std::fmt::Write as _;

use super::ScenarioSpec;
use crate::error::{Error, Result};

/// Shortest round-trip decimal; integral values print without a fraction.
pub fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Trip energy and duration per ordered pair.
pub fn trip_table(spec: &ScenarioSpec) -> String {
    let n = spec.n_nodes();
    let mut out = String::from("Node Flows (i -> j) | Derived dx (kWh) | Derived dt (s)\n");
    for (od, e) in spec.od.entries().iter().enumerate() {
        let _ = writeln!(
            out,
            "{}->{} | {} | {}",
            spec.nodes[od / n],
            spec.nodes[od % n],
            fmt_num(e.delta_x_kwh),
            fmt_num(e.delta_t_seconds)
        );
    }
    out
}

/// Outage prices per node for an extreme and a moderate scenario side by side.
pub fn outage_price_table(extreme: &ScenarioSpec, moderate: &ScenarioSpec) -> Result<String> {
    if extreme.nodes != moderate.nodes {
        return Err(Error::Scenario("scenarios have different node sets".into()));
    }
    let mut out = String::from("Node (i) | Extreme ($/kWh) | Extreme ($/dt) | Moderate ($/kWh) | Moderate ($/dt)\n");
    for (i, node) in extreme.nodes.iter().enumerate() {
        let _ = writeln!(
            out,
            "{node} | {} | {} | {} | {}",
            fmt_num(extreme.prices.outage_per_kwh[i]),
            fmt_num(extreme.prices.outage_per_step[i]),
            fmt_num(moderate.prices.outage_per_kwh[i]),
            fmt_num(moderate.prices.outage_per_step[i])
        );
    }
    Ok(out)
}

/// Trip fares per ordered pair.
pub fn fare_table(spec: &ScenarioSpec) -> String {
    let n = spec.n_nodes();
    let mut out = String::from("Origin | Destination | Cost ($/kWh) | Cost ($/dt)\n");
    for od in 0..n * n {
        let _ = writeln!(
            out,
            "{} | {} | {} | {}",
            spec.nodes[od / n],
            spec.nodes[od % n],
            fmt_num(spec.prices.fare_per_kwh[od]),
            fmt_num(spec.prices.fare_per_step[od])
        );
    }
    out
}

/// Quantized trip parameters: `origin->destination | delta_bins | delta_steps`.
pub fn quantization_table(spec: &ScenarioSpec) -> String {
    let n = spec.n_nodes();
    let mut out = String::from("Pair | Delta bins | Delta steps\n");
    for (od, e) in spec.od.entries().iter().enumerate() {
        let _ = writeln!(out, "{}->{} | {} | {}", spec.nodes[od / n], spec.nodes[od % n], e.delta_bins, e.delta_steps);
    }
    out
}
