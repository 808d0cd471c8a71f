//! Prints the trip, outage-price, fare and quantization tables of the bundled scenarios.
//!
//! Usage: `cargo run --example render_tables`

use aev_dispatch::scenario::builtin;
use aev_dispatch::scenario::tables::{fare_table, outage_price_table, quantization_table, trip_table};

fn main() -> aev_dispatch::Result<()> {
    let extreme = builtin::load("extreme-day")?;
    let moderate = builtin::load("moderate-day")?;
    println!("{}", trip_table(&extreme));
    println!("{}", outage_price_table(&extreme, &moderate)?);
    println!("{}", fare_table(&extreme));
    println!("{}", quantization_table(&extreme));
    Ok(())
}
