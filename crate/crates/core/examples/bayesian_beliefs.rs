//! Conjugate learning about the mean of i.i.d. normal increments.
//!
//! Three agents with different priors watch the same data. Each agent's
//! log predictive density is accumulated step by step; net of the
//! reference density of `N(0, 1/tau)` increments it must equal the
//! closed-form log-likelihood ratio.
//!
//! Usage: `cargo run --example bayesian_beliefs -- [steps] [seed]`

use diverse_beliefs::beliefs::{log_likelihood_ratio, update_discrete, DiscreteBelief};
use diverse_beliefs::rng::{standard_normal, stream, Domain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let steps: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let (true_mean, precision) = (0.02, 1.0);
    let beliefs: Vec<DiscreteBelief> = [(-0.5, 10.0), (0.0, 100.0), (0.5, 1000.0)]
        .into_iter()
        .map(|(prior_mean, prior_size)| DiscreteBelief {
            prior_mean,
            prior_size,
            precision,
            diligent: true,
        })
        .collect();
    let mut states: Vec<_> = beliefs.iter().map(DiscreteBelief::initial_state).collect();
    let mut rng = stream(seed, Domain::Scratch, 0);
    let mut log_reference = 0.0;

    println!(
        "{:>6}  {:>24}  {:>24}  {:>24}",
        "step", "agent 0: mean / log L", "agent 1", "agent 2"
    );
    for k in 1..=steps {
        let x = true_mean + standard_normal(&mut rng) / precision.sqrt();
        log_reference +=
            0.5 * (-precision * x * x + (precision / (2.0 * std::f64::consts::PI)).ln());
        for (s, b) in states.iter_mut().zip(&beliefs) {
            *s = update_discrete(s, b, x);
        }
        if k.is_power_of_two() || k == steps {
            let cols: Vec<String> = states
                .iter()
                .map(|s| format!("{:>10.4} / {:>11.4}", s.mean, s.log_lambda - log_reference))
                .collect();
            println!("{k:>6}  {}", cols.join("  "));
        }
    }
    println!();
    for (j, (s, b)) in states.iter().zip(&beliefs).enumerate() {
        let closed = log_likelihood_ratio(s, b)?;
        let incremental = s.log_lambda - log_reference;
        println!("agent {j}: incremental {incremental:.10}, closed form {closed:.10}");
    }
    Ok(())
}
