//! One equilibrium path of the three-agent log economy, sampled yearly.
//!
//! Usage: `cargo run --release --example log_equilibrium -- [seed] [years]`

use diverse_beliefs::equilibrium::{simulate_path, Grid, MarketSpec, DEFAULT_DT};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let years: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(30.0);

    let economy = MarketSpec::three_agent().resolve()?;
    let path = simulate_path(&economy, Grid::new(years, DEFAULT_DT)?, seed, 0)?;

    println!(
        "{:>5} {:>9} {:>8} {:>8} {:>8} {:>8}   consumption shares",
        "year", "S", "S/delta", "r", "kappa", "sigma_S"
    );
    let per_year = (1.0 / DEFAULT_DT).round() as usize;
    for k in (0..path.len()).step_by(per_year) {
        let shares: Vec<String> = path.q.iter().map(|q| format!("{:.3}", q[k])).collect();
        println!(
            "{:>5.0} {:>9.3} {:>8.2} {:>8.4} {:>8.4} {:>8.4}   {}",
            path.grid.time(k),
            path.stock[k],
            path.pd[k],
            path.rate[k],
            path.kappa[k],
            path.sigma_s[k],
            shares.join(" ")
        );
    }
    Ok(())
}
