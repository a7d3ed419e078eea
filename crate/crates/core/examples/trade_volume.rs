//! Trading intensity when agents share an impatience rate.
//!
//! With equal `rho` and constant drifts each agent's stock holding is a
//! diffusion; its coefficient `theta^j` measures how hard the agent trades.
//! Volume dies out as one agent's consumption share goes to one.
//!
//! Usage: `cargo run --release --example trade_volume -- [seed] [years]`

use diverse_beliefs::beliefs::ContinuousBelief;
use diverse_beliefs::equilibrium::{simulate_path, AgentSpec, Grid, MarketSpec, DEFAULT_DT};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let years: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100.0);

    let agent = |alpha| AgentSpec::with_nu(0.05, 1.0, ContinuousBelief::ConstantDrift { alpha });
    let spec = MarketSpec {
        sigma: 0.2,
        alpha_star: 0.0,
        delta0: None,
        agents: vec![agent(-0.3), agent(0.0), agent(0.3)],
    };
    let economy = spec.resolve()?;
    let path = simulate_path(&economy, Grid::new(years, DEFAULT_DT)?, seed, 0)?;
    let theta = path
        .theta
        .as_ref()
        .expect("equal impatience and constant drifts");

    println!(
        "{:>5} {:>24} {:>30} {:>10}",
        "year", "consumption shares", "theta", "|theta|"
    );
    let per_decade = (10.0 / DEFAULT_DT).round() as usize;
    for k in (0..path.len()).step_by(per_decade) {
        let q: Vec<String> = path.q.iter().map(|q| format!("{:.3}", q[k])).collect();
        let th: Vec<String> = theta.iter().map(|t| format!("{:+.4}", t[k])).collect();
        let norm = theta.iter().map(|t| t[k] * t[k]).sum::<f64>().sqrt();
        println!(
            "{:>5.0} {:>24} {:>30} {:>10.5}",
            path.grid.time(k),
            q.join(" "),
            th.join(" "),
            norm
        );
    }
    let units_sum: f64 = path.units.iter().map(|u| u[path.len() - 1]).sum();
    println!("\nholdings sum to {units_sum:.12} at the horizon");
    Ok(())
}
