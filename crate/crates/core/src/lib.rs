//! Receding-horizon dispatch of autonomous electric vehicle fleets.
//!
//! The fleet in each network node is described by three densities over the
//! battery state of energy (SOE): charging `u`, idle `v` and discharging `w`.
//! Charging and discharging move mass along the SOE axis (advection), and
//! flows between the three states, plus trips between nodes, are the control.
//! At every step a linear program over a short horizon chooses those flows to
//! maximize revenue from passenger trips and from backup power supplied to
//! buildings during grid outages, minus the cost of charging.
//!
//! Modules, bottom-up:
//!
//! * [`grid`]: the SOE x time grid, node labels and the fleet state.
//! * [`dynamics`]: the upwind forward simulator.
//! * [`scenario`]: scenario files, the bundled scenarios and table renderings.
//! * [`lp`]: LP representation, a bounded revised simplex solver and LP-format export.
//! * [`dispatch`]: the horizon-window LP.
//! * [`controller`]: the receding-horizon loop and fleet-size sweeps.
//! * [`reporting`]: revenue decomposition, annualization and output files.

pub mod controller;
pub mod dispatch;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod lp;
pub mod reporting;
pub mod scenario;

pub use error::{Error, Result};
