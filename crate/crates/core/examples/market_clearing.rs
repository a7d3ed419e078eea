//! The general market-clearing solver.
//!
//! For log utility the state-price density is known in closed form, which
//! checks the solver; the same call then handles power utility, where no
//! closed form exists.
//!
//! Usage: `cargo run --example market_clearing`

use diverse_beliefs::beliefs::ContinuousBelief;
use diverse_beliefs::equilibrium::{
    solve_market_clearing_general, state_price_density, Agent, InverseMarginal, LogUtility,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let belief = ContinuousBelief::ConstantDrift { alpha: 0.0 };
    let rhos = [0.02, 0.05, 0.1];
    let nus = [1.0, 2.0, 0.5];
    let log_lambdas = [0.3, -0.2, 0.0];
    let lambdas: Vec<f64> = log_lambdas.iter().map(|l: &f64| l.exp()).collect();
    let (delta, t) = (1.7, 3.0);

    let agents: Vec<Agent> = rhos
        .iter()
        .zip(&nus)
        .map(|(&r, &n)| Agent::new(r, n, belief))
        .collect();
    let closed = state_price_density(&agents, &log_lambdas, delta, t).zeta;
    let logs: Vec<LogUtility> = rhos.iter().map(|&rho| LogUtility { rho }).collect();
    let refs: Vec<&dyn InverseMarginal> = logs.iter().map(|u| u as &dyn InverseMarginal).collect();
    let solved = solve_market_clearing_general(&refs, &lambdas, &nus, delta, t)?;
    println!("log utility:   closed form zeta = {closed:.15}");
    println!(
        "               solver      zeta = {solved:.15}  (rel. error {:.1e})",
        (solved / closed - 1.0).abs()
    );

    // U(t, c) = exp(-rho t) c^(1-g) / (1-g), so I(t, y) = (exp(rho t) y)^(-1/g).
    let power = |rho: f64, g: f64| move |t: f64, y: f64| ((rho * t).exp() * y).powf(-1.0 / g);
    let (p0, p1, p2) = (power(0.02, 2.0), power(0.05, 0.5), power(0.1, 4.0));
    let refs: Vec<&dyn InverseMarginal> = vec![&p0, &p1, &p2];
    let zeta = solve_market_clearing_general(&refs, &lambdas, &nus, delta, t)?;
    let demand: Vec<f64> = refs
        .iter()
        .zip(lambdas.iter().zip(&nus))
        .map(|(i, (l, n))| i.consumption(t, zeta * n / l))
        .collect();
    println!("power utility: zeta = {zeta:.10}");
    println!(
        "               consumption {demand:.6?}, total {:.12} vs delta {delta}",
        demand.iter().sum::<f64>()
    );
    Ok(())
}
