//! Price-feedback bubbles: 30 agents, with and without diligent agents.
//!
//! Usage: `cargo run --example bubbles -- [years] [seeds]`

use diverse_beliefs::feedback::{seed_sweep, FeedbackConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let years: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10.0);
    let n_seeds: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seeds: Vec<u64> = (0..n_seeds).collect();

    println!(
        "{:>10} {:>12} {:>12} {:>12} {:>8} {:>9}",
        "diligent", "mean range", "mean max", "mean min", "crashes", "warnings"
    );
    for n_diligent in [0, 10, 25, 30] {
        let config = FeedbackConfig::new(30, n_diligent, 0).with_years(years);
        let metrics = seed_sweep(&config, &seeds, true)?;
        let n = metrics.len() as f64;
        let mean = |f: fn(&diverse_beliefs::feedback::FeedbackMetrics) -> f64| {
            metrics.iter().map(f).sum::<f64>() / n
        };
        println!(
            "{:>10} {:>12.4} {:>12.4} {:>12.4} {:>8} {:>9}",
            n_diligent,
            mean(|m| m.range_log_ratio),
            mean(|m| m.max_log_ratio),
            mean(|m| m.min_log_ratio),
            metrics.iter().map(|m| m.crash_count).sum::<usize>(),
            metrics.iter().map(|m| m.solver_warnings).sum::<usize>(),
        );
    }
    Ok(())
}
