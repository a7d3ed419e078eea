//! Discrete-time economy in which agents learn from prices.
//!
//! Each agent believes that log dividend growth is i.i.d. gaussian with
//! unknown mean and updates a conjugate prior. A diligent agent observes the
//! true dividend increment. Every other agent takes the stock price for a
//! fixed multiple of the dividend and learns from the log price increment
//! `xi` instead, which the agent's own belief update then moves. The price
//! at each step therefore solves a scalar fixed point in `xi`.
//!
//! A shadow copy of every agent, always fed the true increment, gives the
//! reference price `S*` against which bubbles are measured.
//!
//! All rates are per step. Annual figures from the config are converted by
//! `dt` (rates, means) and `sqrt(dt)` (volatility).

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beliefs::{update_discrete, BeliefState, DiscreteBelief};
use crate::error::{Error, Result};
use crate::math::bisect;
use crate::rng::{self, Domain};

const SCAN_POINTS: usize = 200;
const BRACKET_SDS: f64 = 10.0;
const XI_TOL: f64 = 1e-12;
/// Single-step moves of `xi` away from the dividend increment larger than
/// this many daily standard deviations count as crashes or ramps.
pub const CRASH_SDS: f64 = 5.0;

fn default_sigma_star() -> f64 {
    0.25
}
fn default_growth_star() -> f64 {
    0.015
}
fn default_dt() -> f64 {
    1.0 / 252.0
}
fn default_steps() -> usize {
    25 * 252
}
fn default_rho_range() -> [f64; 2] {
    [0.04, 0.33]
}
fn default_precision_range() -> [f64; 2] {
    [0.4, 1.05]
}
fn default_prior_mean_range() -> [f64; 2] {
    [-0.05, 0.15]
}
fn default_nu() -> f64 {
    1.0
}
fn default_prior_size() -> f64 {
    252.0
}
fn default_max_log_move() -> f64 {
    4.0
}

/// Feedback experiment configuration. Every field except `agents` has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackConfig {
    /// Number of agents `J`.
    pub agents: usize,
    /// Agents `0..n_diligent` are diligent.
    #[serde(default)]
    pub n_diligent: usize,
    /// True annual dividend volatility.
    #[serde(default = "default_sigma_star")]
    pub sigma_star: f64,
    /// True annual log dividend growth.
    #[serde(default = "default_growth_star")]
    pub growth_star: f64,
    /// Step length in years.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Number of steps.
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Annual impatience rates are drawn uniformly from this range.
    #[serde(default = "default_rho_range")]
    pub rho_range: [f64; 2],
    /// Assumed precisions are drawn uniformly from this range, in multiples
    /// of the true per-step precision.
    #[serde(default = "default_precision_range")]
    pub precision_range: [f64; 2],
    /// Annual prior means are drawn uniformly from this range.
    #[serde(default = "default_prior_mean_range")]
    pub prior_mean_range: [f64; 2],
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Prior effective sample size, in steps.
    #[serde(default = "default_prior_size")]
    pub prior_size: f64,
    /// Largest `|xi - x|` the root search will consider.
    #[serde(default = "default_max_log_move")]
    pub max_log_move: f64,
}

impl FeedbackConfig {
    pub fn new(agents: usize, n_diligent: usize, seed: u64) -> Self {
        FeedbackConfig {
            agents,
            n_diligent,
            sigma_star: default_sigma_star(),
            growth_star: default_growth_star(),
            dt: default_dt(),
            steps: default_steps(),
            seed,
            rho_range: default_rho_range(),
            precision_range: default_precision_range(),
            prior_mean_range: default_prior_mean_range(),
            nu: default_nu(),
            prior_size: default_prior_size(),
            max_log_move: default_max_log_move(),
        }
    }

    pub fn with_years(mut self, years: f64) -> Self {
        self.steps = (years / self.dt).round() as usize;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(
                    format!("feedback.{field}"),
                    format!("must be positive, got {v}"),
                ))
            }
        };
        if self.agents == 0 {
            return Err(Error::invalid(
                "feedback.agents",
                "at least one agent is required",
            ));
        }
        if self.n_diligent > self.agents {
            return Err(Error::invalid(
                "feedback.n_diligent",
                format!(
                    "{} exceeds the agent count {}",
                    self.n_diligent, self.agents
                ),
            ));
        }
        positive("sigma_star", self.sigma_star)?;
        positive("dt", self.dt)?;
        positive("nu", self.nu)?;
        positive("max_log_move", self.max_log_move)?;
        if !self.growth_star.is_finite() {
            return Err(Error::invalid("feedback.growth_star", "must be finite"));
        }
        if !(self.prior_size > 0.0) {
            return Err(Error::invalid("feedback.prior_size", "must be positive"));
        }
        for (field, [lo, hi]) in [
            ("rho_range", self.rho_range),
            ("precision_range", self.precision_range),
        ] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::invalid(
                    format!("feedback.{field}"),
                    format!("need 0 < lo <= hi, got [{lo}, {hi}]"),
                ));
            }
        }
        let [lo, hi] = self.prior_mean_range;
        if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::invalid(
                "feedback.prior_mean_range",
                "need finite lo <= hi",
            ));
        }
        Ok(())
    }

    /// True per-step precision `1 / (sigma*^2 dt)`.
    pub fn true_precision(&self) -> f64 {
        1.0 / (self.sigma_star * self.sigma_star * self.dt)
    }

    /// True per-step mean of log dividend growth.
    pub fn true_mean(&self) -> f64 {
        self.growth_star * self.dt
    }

    fn daily_sd(&self) -> f64 {
        self.sigma_star * self.dt.sqrt()
    }
}

/// Per-step characteristics of one agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackAgent {
    /// Per-step impatience rate.
    pub rho: f64,
    pub nu: f64,
    /// `nu (exp(rho) - 1)`, the weight pricing a claim to next step's dividend onwards.
    pub nu_tilde: f64,
    pub belief: DiscreteBelief,
}

/// Draws every agent's characteristics. Agent `j` uses its own stream, so
/// adding agents never changes the first ones.
pub fn draw_agents(config: &FeedbackConfig) -> Vec<FeedbackAgent> {
    let tau_star = config.true_precision();
    (0..config.agents)
        .map(|j| {
            let mut rng = rng::stream(config.seed, Domain::Agent, j as u64);
            let mut uniform = |[lo, hi]: [f64; 2]| lo + (hi - lo) * rng.random::<f64>();
            let rho = uniform(config.rho_range) * config.dt;
            let precision = uniform(config.precision_range) * tau_star;
            let prior_mean = uniform(config.prior_mean_range) * config.dt;
            FeedbackAgent {
                rho,
                nu: config.nu,
                nu_tilde: config.nu * rho.exp_m1(),
                belief: DiscreteBelief {
                    prior_mean,
                    prior_size: config.prior_size,
                    precision,
                    diligent: j < config.n_diligent,
                },
            }
        })
        .collect()
}

/// Log price/dividend ratio at step `t`:
/// `log(sum w_j / nu_tilde_j) - log(sum w_j / nu_j)` with
/// `w_j = exp(-rho_j t) lambda_j`.
pub fn discrete_log_pd(agents: &[FeedbackAgent], log_lambdas: &[f64], t: f64) -> f64 {
    let lw = |j: usize| -agents[j].rho * t + log_lambdas[j];
    let max = (0..agents.len()).map(lw).fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (j, a) in agents.iter().enumerate() {
        let w = (lw(j) - max).exp();
        num += w / a.nu_tilde;
        den += w / a.nu;
    }
    (num / den).ln()
}

/// Price/dividend ratio at step `t`.
pub fn discrete_price(agents: &[FeedbackAgent], log_lambdas: &[f64], t: f64) -> f64 {
    discrete_log_pd(agents, log_lambdas, t).exp()
}

/// Economy state between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackState {
    pub step: usize,
    pub log_delta: f64,
    /// Log of the feedback price.
    pub log_s: f64,
    pub log_pd: f64,
    /// Log price/dividend ratio of the all-diligent shadow economy.
    pub log_pd_star: f64,
    pub beliefs: Vec<BeliefState>,
    pub shadow: Vec<BeliefState>,
    /// Last solved `xi`, used to pick among multiple roots.
    pub last_xi: Option<f64>,
}

impl FeedbackState {
    /// Time-0 state with `delta_0 = 1` and `S_0` the time-0 price/dividend ratio.
    pub fn initial(agents: &[FeedbackAgent]) -> Self {
        let beliefs: Vec<BeliefState> = agents.iter().map(|a| a.belief.initial_state()).collect();
        let log_pd = discrete_log_pd(agents, &vec![0.0; agents.len()], 0.0);
        FeedbackState {
            step: 0,
            log_delta: 0.0,
            log_s: log_pd,
            log_pd,
            log_pd_star: log_pd,
            shadow: beliefs.clone(),
            beliefs,
            last_xi: None,
        }
    }

    pub fn log_s_star(&self) -> f64 {
        self.log_pd_star + self.log_delta
    }
}

/// Outcome of one fixed-point step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub xi: f64,
    /// `|f(xi)|` of the accepted root, where `f` is the log-price residual.
    pub residual: f64,
    /// True if the scan found more than one root.
    pub multiple_roots: bool,
}

/// Residual `log PD_t + xi - x - log PD_{t+1}(xi)` in a form that costs one
/// exponential per agent. Each agent's next log weight is
/// `c_j - h_j (obs_j - m_j)^2`, where `obs_j` is `x` for diligent agents and
/// `xi` otherwise.
struct Residual {
    offset: f64,
    x: f64,
    c: Vec<f64>,
    h: Vec<f64>,
    m: Vec<f64>,
    follows_price: Vec<bool>,
    inv_nu: Vec<f64>,
    inv_nu_tilde: Vec<f64>,
    scratch: Vec<f64>,
}

impl Residual {
    fn new(agents: &[FeedbackAgent], state: &FeedbackState, x: f64) -> Self {
        let t_next = (state.step + 1) as f64;
        let n = agents.len();
        let mut r = Residual {
            offset: state.log_pd - x,
            x,
            c: Vec::with_capacity(n),
            h: Vec::with_capacity(n),
            m: Vec::with_capacity(n),
            follows_price: Vec::with_capacity(n),
            inv_nu: agents.iter().map(|a| 1.0 / a.nu).collect(),
            inv_nu_tilde: agents.iter().map(|a| 1.0 / a.nu_tilde).collect(),
            scratch: vec![0.0; n],
        };
        for (a, b) in agents.iter().zip(&state.beliefs) {
            let tau = a.belief.precision;
            // log_increment(x) = const - h (x - m)^2.
            let inv_k = 1.0 / b.sample_size();
            let constant = 0.5 * (-inv_k.ln_1p() + (tau / (2.0 * std::f64::consts::PI)).ln());
            r.c.push(-a.rho * t_next + b.log_lambda + constant);
            r.h.push(0.5 * tau / (1.0 + inv_k));
            r.m.push(b.mean);
            r.follows_price.push(!a.belief.diligent);
        }
        r
    }

    fn eval(&mut self, xi: f64) -> f64 {
        let mut max = f64::NEG_INFINITY;
        for j in 0..self.c.len() {
            let obs = if self.follows_price[j] { xi } else { self.x };
            let d = obs - self.m[j];
            let lw = self.c[j] - self.h[j] * d * d;
            self.scratch[j] = lw;
            max = max.max(lw);
        }
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..self.c.len() {
            let w = (self.scratch[j] - max).exp();
            num += w * self.inv_nu_tilde[j];
            den += w * self.inv_nu[j];
        }
        self.offset + xi - (num / den).ln()
    }
}

fn belief_dump(agents: &[FeedbackAgent], state: &FeedbackState) -> String {
    let mut s = String::new();
    for (j, (a, b)) in agents.iter().zip(&state.beliefs).enumerate() {
        let _ = write!(
            s,
            "[{j}: diligent={} mean={:e} K={} log_lambda={:e}] ",
            a.belief.diligent,
            b.mean,
            b.sample_size(),
            b.log_lambda
        );
    }
    s
}

/// Sub-intervals of a uniform scan of `[lo, hi]` on which `f` changes sign.
fn scan_sign_changes(f: &mut Residual, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let width = (hi - lo) / SCAN_POINTS as f64;
    let mut brackets = Vec::new();
    let (mut a, mut fa) = (lo, f.eval(lo));
    for i in 1..=SCAN_POINTS {
        let b = if i == SCAN_POINTS {
            hi
        } else {
            lo + width * i as f64
        };
        let fb = f.eval(b);
        if fa.is_finite() && fb.is_finite() && (fa == 0.0 || fa.signum() != fb.signum()) {
            brackets.push((a, b));
        }
        a = b;
        fa = fb;
    }
    brackets
}

/// Advances the economy by one step given the true log dividend increment `x`.
///
/// The bracket starts at `x +- 10` daily standard deviations and doubles,
/// up to `x +- max_log_move`, until a 200-point scan of it finds a sign change of the
/// residual. With several sign changes the root nearest the previous `xi`
/// wins and the outcome is flagged. The chosen root is
/// refined by bisection to `1e-12`.
pub fn step_fixed_point(
    agents: &[FeedbackAgent],
    config: &FeedbackConfig,
    state: &FeedbackState,
    x: f64,
) -> Result<(StepOutcome, FeedbackState)> {
    let mut f = Residual::new(agents, state, x);
    let sd = config.daily_sd();
    let mut half = (BRACKET_SDS * sd).min(config.max_log_move);
    let brackets = loop {
        let brackets = scan_sign_changes(&mut f, x - half, x + half);
        if !brackets.is_empty() {
            break brackets;
        }
        if half >= config.max_log_move {
            let (lo, hi) = (x - half, x + half);
            return Err(Error::NoRootInBracket {
                step: state.step,
                lo,
                hi,
                f_lo: f.eval(lo),
                f_hi: f.eval(hi),
                dump: belief_dump(agents, state),
            });
        }
        half = (2.0 * half).min(config.max_log_move);
    };
    let multiple_roots = brackets.len() > 1;
    let target = state.last_xi.unwrap_or(x);
    let (blo, bhi) = brackets
        .iter()
        .copied()
        .min_by(|p, q| {
            let dp = (0.5 * (p.0 + p.1) - target).abs();
            let dq = (0.5 * (q.0 + q.1) - target).abs();
            dp.total_cmp(&dq)
        })
        .expect("at least one bracket");
    let xi = bisect(|z| f.eval(z), blo, bhi, XI_TOL);
    let residual = f.eval(xi).abs();

    let t = (state.step + 1) as f64;
    let beliefs: Vec<BeliefState> = agents
        .iter()
        .zip(&state.beliefs)
        .map(|(a, b)| update_discrete(b, &a.belief, if a.belief.diligent { x } else { xi }))
        .collect();
    let shadow: Vec<BeliefState> = agents
        .iter()
        .zip(&state.shadow)
        .map(|(a, b)| update_discrete(b, &a.belief, x))
        .collect();
    let log_lambdas: Vec<f64> = beliefs.iter().map(|b| b.log_lambda).collect();
    let shadow_lambdas: Vec<f64> = shadow.iter().map(|b| b.log_lambda).collect();
    let next = FeedbackState {
        step: state.step + 1,
        log_delta: state.log_delta + x,
        log_s: state.log_s + xi,
        log_pd: discrete_log_pd(agents, &log_lambdas, t),
        log_pd_star: discrete_log_pd(agents, &shadow_lambdas, t),
        beliefs,
        shadow,
        last_xi: Some(xi),
    };
    Ok((
        StepOutcome {
            xi,
            residual,
            multiple_roots,
        },
        next,
    ))
}

/// One row of the trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackRow {
    pub step: usize,
    pub delta: f64,
    pub s_star: f64,
    pub s: f64,
    /// `log(S* / delta)`.
    pub log_pd_star: f64,
    /// `log(S / S*)`.
    pub log_ratio: f64,
    /// Absent at step 0.
    pub xi: Option<f64>,
    /// 1 if the step's scan found several roots.
    pub solver_warnings: u32,
}

/// Bubble metrics of one run. Keys of [`FeedbackMetrics::to_record`] are
/// the field names.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackMetrics {
    pub seed: u64,
    pub agents: usize,
    pub n_diligent: usize,
    pub steps: usize,
    pub max_log_ratio: f64,
    pub min_log_ratio: f64,
    pub range_log_ratio: f64,
    /// Steps with `|xi - x|` above [`CRASH_SDS`] daily standard deviations.
    pub crash_count: usize,
    pub solver_warnings: usize,
    pub max_residual: f64,
}

impl FeedbackMetrics {
    /// `key = value` lines, one per field.
    pub fn to_record(&self) -> String {
        format!(
            "seed = {}\nagents = {}\nn_diligent = {}\nsteps = {}\nmax_log_ratio = {:?}\nmin_log_ratio = {:?}\nrange_log_ratio = {:?}\ncrash_count = {}\nsolver_warnings = {}\nmax_residual = {:?}\n",
            self.seed,
            self.agents,
            self.n_diligent,
            self.steps,
            self.max_log_ratio,
            self.min_log_ratio,
            self.range_log_ratio,
            self.crash_count,
            self.solver_warnings,
            self.max_residual
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackRun {
    pub agents: Vec<FeedbackAgent>,
    pub rows: Vec<FeedbackRow>,
    pub metrics: FeedbackMetrics,
    pub final_state: FeedbackState,
}

impl FeedbackRun {
    pub const CSV_HEADER: &'static str =
        "t,delta,S_star,S,log_PD_star,log_ratio,xi,solver_warnings";

    /// Writes the trajectory as CSV with `t` in years.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W, dt: f64) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            let xi = r.xi.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.step as f64 * dt,
                r.delta,
                r.s_star,
                r.s,
                r.log_pd_star,
                r.log_ratio,
                xi,
                r.solver_warnings
            )?;
        }
        Ok(())
    }
}

fn row(state: &FeedbackState, xi: Option<f64>, warn: bool) -> FeedbackRow {
    let log_s_star = state.log_s_star();
    FeedbackRow {
        step: state.step,
        delta: state.log_delta.exp(),
        s_star: log_s_star.exp(),
        s: state.log_s.exp(),
        log_pd_star: state.log_pd_star,
        log_ratio: state.log_s - log_s_star,
        xi,
        solver_warnings: warn as u32,
    }
}

/// Runs the feedback economy for `config.steps` steps.
pub fn run_feedback(config: &FeedbackConfig) -> Result<FeedbackRun> {
    config.validate()?;
    let agents = draw_agents(config);
    let mut dividend = rng::stream(config.seed, Domain::Dividend, 0);
    let (mu, sd) = (config.true_mean(), config.daily_sd());
    let mut state = FeedbackState::initial(&agents);
    let mut rows = Vec::with_capacity(config.steps + 1);
    rows.push(row(&state, None, false));
    let (mut crashes, mut warnings, mut max_residual) = (0, 0, 0.0f64);
    for _ in 0..config.steps {
        let x = mu + sd * rng::standard_normal(&mut dividend);
        let (outcome, next) = step_fixed_point(&agents, config, &state, x)?;
        if (outcome.xi - x).abs() > CRASH_SDS * sd {
            crashes += 1;
        }
        warnings += outcome.multiple_roots as usize;
        max_residual = max_residual.max(outcome.residual);
        state = next;
        rows.push(row(&state, Some(outcome.xi), outcome.multiple_roots));
    }
    let max = rows
        .iter()
        .map(|r| r.log_ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let min = rows
        .iter()
        .map(|r| r.log_ratio)
        .fold(f64::INFINITY, f64::min);
    let metrics = FeedbackMetrics {
        seed: config.seed,
        agents: config.agents,
        n_diligent: config.n_diligent,
        steps: config.steps,
        max_log_ratio: max,
        min_log_ratio: min,
        range_log_ratio: max - min,
        crash_count: crashes,
        solver_warnings: warnings,
        max_residual,
    };
    Ok(FeedbackRun {
        agents,
        rows,
        metrics,
        final_state: state,
    })
}

/// Runs `config` once per seed. Results follow the order of `seeds`.
pub fn seed_sweep(
    config: &FeedbackConfig,
    seeds: &[u64],
    parallel: bool,
) -> Result<Vec<FeedbackMetrics>> {
    let run = |&seed: &u64| {
        let mut c = config.clone();
        c.seed = seed;
        run_feedback(&c).map(|r| r.metrics)
    };
    if parallel {
        seeds.par_iter().map(run).collect()
    } else {
        seeds.iter().map(run).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agent(rho: f64, diligent: bool, prior_size: f64) -> FeedbackAgent {
        FeedbackAgent {
            rho,
            nu: 1.0,
            nu_tilde: rho.exp_m1(),
            belief: DiscreteBelief {
                prior_mean: 0.0,
                prior_size,
                precision: 1.0e4,
                diligent,
            },
        }
    }

    #[test]
    fn single_agent_pd_is_perpetuity() {
        let a = [agent(0.001, false, 10.0)];
        for (ll, t) in [(0.0, 0.0), (3.0, 50.0), (-20.0, 1000.0)] {
            let pd = discrete_price(&a, &[ll], t);
            assert!((pd - 1.0 / 0.001f64.exp_m1()).abs() < 1e-9 * pd);
        }
    }

    #[test]
    fn identical_agents_give_constant_pd() {
        let a = [agent(0.002, false, 10.0); 3];
        let p0 = discrete_price(&a, &[0.0, 1.0, -2.0], 0.0);
        let p1 = discrete_price(&a, &[5.0, -1.0, 0.3], 700.0);
        assert!((p0 - p1).abs() < 1e-9 * p0);
    }

    #[test]
    fn two_agent_pd_matches_npv() {
        let a = [agent(0.001, false, 10.0), agent(0.002, false, 10.0)];
        let pd = discrete_price(&a, &[0.0, 0.0], 0.0);
        // Claim to dividends from the next step onwards, no growth, weights 1.
        let npv = |rho: f64| {
            (1..=1_000_000)
                .map(|k| (-rho * k as f64).exp())
                .sum::<f64>()
        };
        let expected = (npv(0.001) + npv(0.002)) / 2.0;
        assert!((pd - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn config_validation() {
        let mut c = FeedbackConfig::new(3, 4, 0);
        assert!(c.validate().is_err());
        c.n_diligent = 1;
        assert!(c.validate().is_ok());
        c.sigma_star = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn agents_draw_within_ranges() {
        let c = FeedbackConfig::new(50, 10, 3);
        let agents = draw_agents(&c);
        let tau = c.true_precision();
        for (j, a) in agents.iter().enumerate() {
            assert!(a.rho >= 0.04 * c.dt && a.rho <= 0.33 * c.dt);
            assert!(a.belief.precision >= 0.4 * tau && a.belief.precision <= 1.05 * tau);
            assert!(a.belief.prior_mean >= -0.05 * c.dt && a.belief.prior_mean <= 0.15 * c.dt);
            assert_eq!(a.belief.diligent, j < 10);
        }
    }

    #[test]
    fn frozen_single_agent_tracks_dividend() {
        let c = FeedbackConfig::new(1, 0, 0);
        let a = [agent(0.0005, false, f64::INFINITY)];
        let mut state = FeedbackState::initial(&a);
        for x in [0.01, -0.03, 0.002] {
            let (out, next) = step_fixed_point(&a, &c, &state, x).unwrap();
            assert!((out.xi - x).abs() < 1e-12);
            assert!((next.log_pd - state.log_pd).abs() < 1e-12);
            state = next;
        }
    }

    #[test]
    fn step_root_matches_grid_scan() {
        let c = FeedbackConfig::new(3, 1, 11);
        let agents = draw_agents(&c);
        let mut state = FeedbackState::initial(&agents);
        let x = 0.004;
        // Move beliefs off the prior first.
        for _ in 0..20 {
            state = step_fixed_point(&agents, &c, &state, x).unwrap().1;
        }
        let (out, _) = step_fixed_point(&agents, &c, &state, -0.01).unwrap();
        let mut f = Residual::new(&agents, &state, -0.01);
        let (lo, hi) = (-0.01 - 0.2, -0.01 + 0.2);
        let n = 100_000;
        let h = (hi - lo) / n as f64;
        let mut roots = Vec::new();
        let mut prev = f.eval(lo);
        for i in 1..=n {
            let z = lo + h * i as f64;
            let fz = f.eval(z);
            if prev.signum() != fz.signum() {
                roots.push(z - 0.5 * h);
            }
            prev = fz;
        }
        assert!(!roots.is_empty());
        assert_eq!(out.multiple_roots, roots.len() > 1);
        let last = state.last_xi.unwrap();
        let nearest = roots
            .iter()
            .copied()
            .min_by(|a, b| (a - last).abs().total_cmp(&(b - last).abs()))
            .unwrap();
        assert!((nearest - out.xi).abs() <= h);
        assert!(out.residual < 1e-10);
    }

    #[test]
    fn metrics_record_has_documented_keys() {
        let mut c = FeedbackConfig::new(4, 2, 5);
        c.steps = 50;
        let run = run_feedback(&c).unwrap();
        let rec = run.metrics.to_record();
        for key in [
            "range_log_ratio",
            "crash_count",
            "solver_warnings",
            "max_residual",
        ] {
            assert!(rec.contains(&format!("{key} = ")));
        }
        assert_eq!(run.rows.len(), 51);
        assert!(run.rows[0].xi.is_none());
    }
}
