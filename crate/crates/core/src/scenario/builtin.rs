//! Scenarios bundled with the library.
//!
//! * `extreme-day` (alias `network-tables`): the three-node network with the
//!   extreme-outage-day prices and synthetic demand.
//! * `moderate-day`: the same network with moderate-outage-day prices.
//! * `zero-demand`: the same network and prices with no demand at all.
//!
//! The files under `data/scenarios/` are generated by
//! [`super::synthetic::synthetic_day`] with the default seed; a test checks
//! that they stay in sync.

use super::SerializedScenario;
use super::ScenarioSpec;
use crate::error::{Error, Result};

pub const NAMES: [&str; 3] = ["extreme-day", "moderate-day", "zero-demand"];

macro_rules! bundled {
    ($dir:literal) => {
        SerializedScenario {
            scenario_toml: include_str!(concat!("../../data/scenarios/", $dir, "/scenario.toml")).to_owned(),
            power_csv: include_str!(concat!("../../data/scenarios/", $dir, "/power_demand.csv")).to_owned(),
            mobility_csv: include_str!(concat!("../../data/scenarios/", $dir, "/mobility_demand.csv")).to_owned(),
        }
    };
}

fn canonical(name: &str) -> Option<&'static str> {
    match name {
        "extreme-day" | "network-tables" => Some("extreme-day"),
        "moderate-day" => Some("moderate-day"),
        "zero-demand" => Some("zero-demand"),
        _ => None,
    }
}

/// Raw bundled files of a scenario.
pub fn files(name: &str) -> Option<SerializedScenario> {
    Some(match canonical(name)? {
        "extreme-day" => bundled!("extreme-day"),
        "moderate-day" => bundled!("moderate-day"),
        _ => bundled!("zero-demand"),
    })
}

/// Loads a bundled scenario by name.
pub fn load(name: &str) -> Result<ScenarioSpec> {
    files(name)
        .ok_or_else(|| {
            Error::Scenario(format!(
                "unknown built-in scenario {name:?} (available: {}, network-tables)",
                NAMES.join(", ")
            ))
        })?
        .parse()
}
