//! Simulated moments of the three-agent parameter set next to the
//! reference columns.
//!
//! Usage: `cargo run --release --example three_agent_moments -- [paths] [years]`

use std::time::Instant;

use diverse_beliefs::calibration::{simulate_moments, MomentReport};
use diverse_beliefs::equilibrium::{Grid, MarketSpec, DEFAULT_DT};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let paths: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let years: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50.0);

    let start = Instant::now();
    let simulated = simulate_moments(
        &MarketSpec::three_agent(),
        Grid::new(years, DEFAULT_DT)?,
        0,
        paths,
        true,
    )?;
    println!("{paths} paths x {years} years in {:.1?}\n", start.elapsed());
    print!(
        "{}",
        MomentReport::comparison_table(&[
            ("simulated", &simulated),
            ("fitted", &MomentReport::reference_fit()),
            ("empirical", &MomentReport::historical()),
        ])
    );
    Ok(())
}
