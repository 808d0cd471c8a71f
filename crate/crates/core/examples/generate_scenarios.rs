//! Regenerates the bundled scenario files under `data/scenarios/` from the
//! synthetic demand generator.
//!
//! ```text
//! cargo run --example generate_scenarios -- [output-dir] [seed]
//! ```

use std::path::PathBuf;

use aev_dispatch::scenario::save_scenario;
use aev_dispatch::scenario::synthetic::{synthetic_day, OutageDay, DEFAULT_SEED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let root = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/scenarios"));
    let seed = match args.next() {
        Some(s) => s.parse()?,
        None => DEFAULT_SEED,
    };
    for (dir, day) in [
        ("extreme-day", OutageDay::Extreme),
        ("moderate-day", OutageDay::Moderate),
        ("zero-demand", OutageDay::None),
    ] {
        let spec = synthetic_day(day, seed)?;
        let path = save_scenario(&spec, root.join(dir))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
