//! Moment fitting with three heterogeneous agents and with a single agent.
//!
//! A lone log agent has a constant price/dividend ratio, so no choice of
//! its parameters produces valuation swings; the heterogeneous economy can.
//!
//! Usage: `cargo run --release --example fit_moments -- [paths] [evaluations]`

use diverse_beliefs::beliefs::ContinuousBelief;
use diverse_beliefs::calibration::{
    fit_parameters, CalibrationProblem, EmpiricalTargets, FreeParameter, MomentReport,
    ParameterName,
};
use diverse_beliefs::equilibrium::{AgentSpec, MarketSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let paths: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(40);
    let evaluations: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(80);
    let targets = EmpiricalTargets::default();

    let configure = |mut problem: CalibrationProblem| {
        problem.paths = paths;
        problem.horizon = 30.0;
        problem.max_evaluations = evaluations;
        problem.parallel = true;
        problem
    };

    use ParameterName::*;
    let hetero = configure(CalibrationProblem::new(
        MarketSpec::three_agent(),
        vec![
            FreeParameter::new(Sigma, None, 0.1, 1.0),
            FreeParameter::new(AlphaStar, None, -0.2, 0.2),
            FreeParameter::new(Alpha, Some(1), 0.0, 1.5),
        ],
    ));
    let homo = configure(CalibrationProblem::new(
        MarketSpec {
            sigma: 0.18,
            alpha_star: 0.0,
            delta0: None,
            agents: vec![AgentSpec::with_nu(
                0.04,
                1.0,
                ContinuousBelief::ConstantDrift { alpha: 0.0 },
            )],
        },
        vec![
            FreeParameter::new(Sigma, None, 0.05, 1.0),
            FreeParameter::new(AlphaStar, None, -0.2, 0.2),
            FreeParameter::new(Alpha, Some(0), -0.5, 0.5),
            FreeParameter::new(Rho, Some(0), 0.005, 0.5),
        ],
    ));

    let a = fit_parameters(&hetero, &targets)?;
    let b = fit_parameters(&homo, &targets)?;
    println!(
        "three agents: loss {:.4} -> {:.4} in {} evaluations",
        a.start_loss, a.loss, a.evaluations
    );
    println!(
        "one agent:    loss {:.4} -> {:.4} in {} evaluations\n",
        b.start_loss, b.loss, b.evaluations
    );
    print!(
        "{}",
        MomentReport::comparison_table(&[
            ("three", &a.report),
            ("one", &b.report),
            ("target", &targets.moments)
        ])
    );
    println!("\nthree-agent fit:\n{}", a.to_toml_fragment());
    Ok(())
}
