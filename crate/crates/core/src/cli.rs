//! Command-line front end behind the `divbel` binary.
//!
//! Every subcommand reads a run config (see [`crate::config`]), applies the
//! command-line overrides and writes its outputs, together with
//! `manifest.toml` holding the resolved config, into the `--out`
//! directory. Nothing is written anywhere else. `divbel replay` re-runs a
//! manifest and reproduces the original files byte for byte.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
//! failures.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::beauty::{
    pareto_faked_equilibrium, partial_faking, truthful_equilibrium, welfare_comparison,
};
use crate::calibration::{
    fit_parameters, ingest_price_dividend_csv, simulate_moments, EmpiricalTargets, MomentReport,
};
use crate::config::{Command, IngestBlock, Overrides, RunConfig};
use crate::equilibrium::{simulate_path, Grid};
use crate::error::{Error, Result};
use crate::feedback::{run_feedback, seed_sweep, FeedbackRun};

#[derive(Debug, Parser)]
#[command(
    name = "divbel",
    version,
    about = "Asset pricing with heterogeneous beliefs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Run config (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo path count, overriding the config.
    #[arg(long)]
    pub paths: Option<usize>,
    /// Worker threads; 1 (the default) runs sequentially. Outputs do not depend on it.
    #[arg(long, value_name = "THREADS")]
    pub parallel: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Continuous-time log-agent equilibrium paths and moments.
    SimulateLog(RunArgs),
    /// Discrete-time price-feedback economy.
    Feedback {
        #[command(flatten)]
        run: RunArgs,
        /// Run this many consecutive seeds and report bubble severity.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// One-period beauty contest: truthful and faked equilibria.
    Beauty(RunArgs),
    /// Fit market parameters to moment targets.
    Fit(RunArgs),
    /// Moment targets from a monthly price/dividend CSV.
    Ingest {
        #[command(flatten)]
        run: RunArgs,
        /// CSV to read when no config is given.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-run a manifest written by an earlier run.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                2
            } else {
                3
            }
        }
    }
}

fn dispatch(sub: Sub) -> Result<String> {
    let (command, run, sweep, csv) = match sub {
        Sub::SimulateLog(run) => (Command::SimulateLog, run, None, None),
        Sub::Feedback { run, sweep } => (Command::Feedback, run, sweep, None),
        Sub::Beauty(run) => (Command::Beauty, run, None, None),
        Sub::Fit(run) => (Command::Fit, run, None, None),
        Sub::Ingest { run, csv } => (Command::Ingest, run, None, csv),
        Sub::Replay { manifest, out } => {
            let config = RunConfig::load(&manifest)?.resolve(&Overrides::default())?;
            return execute(&config, &out, 1);
        }
    };
    let config = match (&run.config, csv) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(csv)) if command == Command::Ingest => RunConfig {
            command,
            seed: None,
            parallel: false,
            sweep_seeds: None,
            simulate: None,
            feedback: None,
            contest: None,
            fit: None,
            ingest: Some(IngestBlock {
                csv: csv.canonicalize().map_err(|e| Error::io(&csv, e))?,
            }),
        },
        _ => return Err(Error::Config("--config is required".into())),
    };
    if config.command != command {
        return Err(Error::Config(format!(
            "config is for `{}`, not `{}`",
            config.command.name(),
            command.name()
        )));
    }
    let threads = run.parallel.unwrap_or(1);
    if threads == 0 {
        return Err(Error::invalid("--parallel", "must be at least 1"));
    }
    let overrides = Overrides {
        seed: run.seed,
        paths: run.paths,
        parallel: threads > 1,
        sweep_seeds: sweep,
    };
    let config = config.resolve(&overrides)?;
    execute(&config, &run.out, threads)
}

/// Runs a resolved config, writing outputs under `out`. Returns the text summary.
pub fn execute(config: &RunConfig, out: &Path, threads: usize) -> Result<String> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write(out, "manifest.toml", &config.to_toml())?;
    if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| execute_command(config, out))
    } else {
        execute_command(config, out)
    }
}

fn execute_command(config: &RunConfig, out: &Path) -> Result<String> {
    match config.command {
        Command::SimulateLog => simulate_log(config, out),
        Command::Feedback => feedback(config, out),
        Command::Beauty => beauty(config, out),
        Command::Fit => fit(config, out),
        Command::Ingest => ingest(config, out),
    }
}

fn write(out: &Path, name: &str, contents: &str) -> Result<()> {
    let path = out.join(name);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))
}

fn to_string<F>(f: F) -> String
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

fn simulate_log(config: &RunConfig, out: &Path) -> Result<String> {
    let block = config.simulate.as_ref().expect("resolved");
    let seed = config.seed.unwrap_or(0);
    let economy = block.market.resolve()?;
    let grid = Grid::new(block.horizon, block.dt)?;
    for i in 0..block.write_paths.min(block.paths) {
        let path = simulate_path(&economy, grid, seed, i as u64)?;
        write(
            out,
            &format!("paths/path_{i:04}.csv"),
            &to_string(|b| path.write_csv(b)),
        )?;
    }
    let report = simulate_moments(&block.market, grid, seed, block.paths, config.parallel)?;
    let summary = format!(
        "simulate-log: {} paths x {} years, dt = {}, seed = {}\n\n{}",
        block.paths,
        block.horizon,
        block.dt,
        seed,
        MomentReport::comparison_table(&[("simulated", &report)])
    );
    write(out, "summary.txt", &summary)?;
    write(
        out,
        "moments.toml",
        &toml::to_string(&report).expect("report serializes"),
    )?;
    Ok(summary)
}

fn feedback(config: &RunConfig, out: &Path) -> Result<String> {
    let fb = config.feedback.as_ref().expect("resolved");
    if let Some(n) = config.sweep_seeds {
        let seeds: Vec<u64> = (0..n as u64).map(|i| fb.seed + i).collect();
        let metrics = seed_sweep(fb, &seeds, config.parallel)?;
        let mut csv = String::from("seed,max_log_ratio,min_log_ratio,range_log_ratio,crash_count,solver_warnings,max_residual\n");
        for m in &metrics {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                m.seed,
                m.max_log_ratio,
                m.min_log_ratio,
                m.range_log_ratio,
                m.crash_count,
                m.solver_warnings,
                m.max_residual
            );
        }
        write(out, "sweep.csv", &csv)?;
        let n = metrics.len() as f64;
        let mean = |f: &dyn Fn(&crate::feedback::FeedbackMetrics) -> f64| {
            metrics.iter().map(f).sum::<f64>() / n
        };
        let summary = format!(
            "feedback sweep: {} agents, {} diligent, {} steps, seeds {}..={}\n\
             mean range of log(S/S*)   {:.6}\n\
             max range of log(S/S*)    {:.6}\n\
             mean max of log(S/S*)     {:.6}\n\
             mean min of log(S/S*)     {:.6}\n\
             mean crash count          {:.3}\n\
             total solver warnings     {}\n",
            fb.agents,
            fb.n_diligent,
            fb.steps,
            seeds[0],
            seeds[seeds.len() - 1],
            mean(&|m| m.range_log_ratio),
            metrics
                .iter()
                .map(|m| m.range_log_ratio)
                .fold(f64::NEG_INFINITY, f64::max),
            mean(&|m| m.max_log_ratio),
            mean(&|m| m.min_log_ratio),
            mean(&|m| m.crash_count as f64),
            metrics.iter().map(|m| m.solver_warnings).sum::<usize>(),
        );
        write(out, "sweep_summary.txt", &summary)?;
        return Ok(summary);
    }
    let run: FeedbackRun = run_feedback(fb)?;
    write(out, "series.csv", &to_string(|b| run.write_csv(b, fb.dt)))?;
    let record = run.metrics.to_record();
    write(out, "metrics.txt", &record)?;
    Ok(record)
}

fn beauty(config: &RunConfig, out: &Path) -> Result<String> {
    let block = config.contest.as_ref().expect("resolved");
    let spec = &block.spec;
    let t = truthful_equilibrium(spec)?;
    let f = pareto_faked_equilibrium(spec)?;
    let w = welfare_comparison(spec, &t, &f);

    let mut csv = String::from("agent,gamma,alpha,variance,p,theta,objective,alpha_faked,theta_faked,objective_faked,improves\n");
    let mut text = format!(
        "truthful price S0 = {:.6}\nfaked price     S~ = {:.6}\n\n{:>5} {:>8} {:>9} {:>9} {:>8} {:>10} {:>11} {:>10} {:>10} {:>11} {:>9}\n",
        t.price, f.price, "agent", "gamma", "alpha", "variance", "p", "theta", "objective", "alpha~", "theta~", "objective~", "improves"
    );
    for (j, a) in spec.agents.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{j},{},{},{},{},{},{},{},{},{},{}",
            a.gamma,
            a.alpha,
            a.variance,
            t.weights[j],
            t.holdings[j],
            t.objectives[j],
            f.professed[j],
            f.holdings[j],
            f.objectives[j],
            w.improves[j]
        );
        let _ = writeln!(
            text,
            "{j:>5} {:>8.4} {:>9.4} {:>9.4} {:>8.4} {:>10.4} {:>11.6} {:>10.4} {:>10.4} {:>11.6} {:>9}",
            a.gamma, a.alpha, a.variance, t.weights[j], t.holdings[j], t.objectives[j], f.professed[j], f.holdings[j], f.objectives[j], w.improves[j]
        );
    }
    let verdict = if w.all_improve {
        "every agent improves"
    } else if w.all_worse {
        "every agent is worse off under faking"
    } else {
        "not every agent improves"
    };
    let _ = write!(
        text,
        "\nverdict: {verdict}\nweighted identity: lhs = {:.12}, rhs = {:.12}\n",
        w.identity_lhs, w.identity_rhs
    );
    if let Some(fakers) = &block.partial_fakers {
        let pf = partial_faking(spec, fakers)?;
        let _ = writeln!(
            text,
            "\npartial faking by {fakers:?}: price = {:.6}",
            pf.price
        );
        for (j, gain) in &pf.deviation_gains {
            let _ = writeln!(text, "  agent {j}: best deviation gain = {gain:.6e}");
        }
    }
    write(out, "contest.csv", &csv)?;
    write(out, "contest.txt", &text)?;
    Ok(text)
}

fn targets_for(csv: Option<&PathBuf>) -> Result<EmpiricalTargets> {
    match csv {
        Some(path) => ingest_price_dividend_csv(path),
        None => Ok(EmpiricalTargets::default()),
    }
}

fn fit(config: &RunConfig, out: &Path) -> Result<String> {
    let block = config.fit.as_ref().expect("resolved");
    let targets = targets_for(block.targets_csv.as_ref())?;
    let result = fit_parameters(&block.problem, &targets)?;
    let text = format!(
        "fit: {} paths x {} years, seed = {}, {} loss evaluations\ntargets: {}\nstart loss = {:.6}, fitted loss = {:.6}\n\n{}",
        block.problem.paths,
        block.problem.horizon,
        block.problem.seed,
        result.evaluations,
        targets.provenance,
        result.start_loss,
        result.loss,
        MomentReport::comparison_table(&[("fitted", &result.report), ("target", &targets.moments)])
    );
    write(out, "fit.txt", &text)?;
    write(out, "fitted.toml", &result.to_toml_fragment())?;
    Ok(text)
}

fn ingest(config: &RunConfig, out: &Path) -> Result<String> {
    let block = config.ingest.as_ref().expect("resolved");
    let targets = ingest_price_dividend_csv(&block.csv)?;
    let text = format!(
        "source: {}\n\n{}",
        targets.provenance,
        MomentReport::comparison_table(&[("data", &targets.moments)])
    );
    write(out, "targets.txt", &text)?;
    write(
        out,
        "targets.toml",
        &toml::to_string(&targets.moments).expect("report serializes"),
    )?;
    Ok(text)
}
