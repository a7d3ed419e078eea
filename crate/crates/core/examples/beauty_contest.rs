//! Truthful versus faked reporting in the one-period beauty contest.
//!
//! Prints the fixed three-agent example in which every agent loses from
//! coordinated faking, then tallies welfare outcomes over random contests.
//!
//! Usage: `cargo run --example beauty_contest -- [contests] [seed]`

use diverse_beliefs::beauty::{
    all_worse_fixture, pareto_faked_equilibrium, truthful_equilibrium, welfare_comparison,
    ContestAgent, ContestSpec,
};
use diverse_beliefs::rng::{stream, Domain};
use rand::Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args
        .next()
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(10_000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let spec = all_worse_fixture();
    let t = truthful_equilibrium(&spec)?;
    let f = pareto_faked_equilibrium(&spec)?;
    let w = welfare_comparison(&spec, &t, &f);
    println!("truthful price {:.5}, faked price {:.5}", t.price, f.price);
    for j in 0..spec.agents.len() {
        println!(
            "  agent {j}: alpha {:+.3} -> professed {:+.4}, objective {:.6} -> {:.6}",
            spec.agents[j].alpha, f.professed[j], t.objectives[j], f.objectives[j]
        );
    }
    println!("  every agent worse off: {}\n", w.all_worse);

    let mut rng = stream(seed, Domain::Scratch, 0);
    let (mut all_improve, mut all_worse, mut mixed) = (0, 0, 0);
    for _ in 0..n {
        let size = rng.random_range(2..=6);
        let agents = (0..size)
            .map(|_| ContestAgent {
                gamma: rng.random_range(0.5..3.0),
                alpha: rng.random_range(-1.0..1.0),
                variance: rng.random_range(0.2..3.0),
            })
            .collect();
        let spec = ContestSpec::new(agents);
        let w = welfare_comparison(
            &spec,
            &truthful_equilibrium(&spec)?,
            &pareto_faked_equilibrium(&spec)?,
        );
        match (w.all_improve, w.all_worse) {
            (true, _) => all_improve += 1,
            (_, true) => all_worse += 1,
            _ => mixed += 1,
        }
    }
    println!(
        "{n} random contests: all improve {all_improve}, all worse {all_worse}, mixed {mixed}"
    );
    Ok(())
}
