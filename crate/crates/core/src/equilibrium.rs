//! Continuous-time equilibrium with log agents.
//!
//! Agent `j` has utility `exp(-rho_j t) log c`, equilibrium weight `nu_j`
//! and a belief encoded by its density process `Lambda^j` over a common
//! reference measure under which `X` is a Brownian motion. The dividend
//! follows `d delta = delta sigma (dX + alpha_star dt)`.
//!
//! Every closed-form quantity is a weighted average over agents with weights
//! proportional to `exp(-rho_j t) Lambda^j_t / nu_j` (or those weights
//! divided by `rho_j`). The weights are formed in log space and normalized
//! with a shifted exponential, so impatient agents whose weight has decayed
//! far below machine range do not produce NaNs.
//!
//! Paths are simulated on a uniform grid. `log delta` and `log Lambda` use
//! log-Euler steps, which are exact for constant coefficients.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beliefs::{log_lambda_step, ContinuousBelief};
use crate::error::{Error, Result};
use crate::math::{log_sum_exp, softmax};
use crate::rng::{self, Domain};

/// Price/dividend ratios above this are treated as a failure of the
/// integrability condition rather than a genuine price.
pub const PD_DIVERGENCE_LIMIT: f64 = 1e6;

/// Default grid step: one trading day in years.
pub const DEFAULT_DT: f64 = 1.0 / 252.0;

/// Agent description as written in config files.
///
/// Exactly one of `nu` and `initial_wealth` must be given. Wealth is
/// converted through `w_0 = Lambda_0 / (nu rho)` with `Lambda_0 = 1` and the
/// normalization `zeta_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_wealth: Option<f64>,
    pub belief: ContinuousBelief,
}

impl AgentSpec {
    pub fn with_nu(rho: f64, nu: f64, belief: ContinuousBelief) -> Self {
        AgentSpec {
            rho,
            nu: Some(nu),
            initial_wealth: None,
            belief,
        }
    }

    pub fn with_wealth(rho: f64, initial_wealth: f64, belief: ContinuousBelief) -> Self {
        AgentSpec {
            rho,
            nu: None,
            initial_wealth: Some(initial_wealth),
            belief,
        }
    }

    fn resolve(&self, field: &str) -> Result<Agent> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::invalid(
                format!("{field}.rho"),
                format!("must be positive, got {}", self.rho),
            ));
        }
        let nu = match (self.nu, self.initial_wealth) {
            (Some(nu), None) => {
                if !(nu > 0.0 && nu.is_finite()) {
                    return Err(Error::invalid(
                        format!("{field}.nu"),
                        format!("must be positive, got {nu}"),
                    ));
                }
                nu
            }
            (None, Some(w0)) => {
                if !(w0 > 0.0 && w0.is_finite()) {
                    return Err(Error::invalid(
                        format!("{field}.initial_wealth"),
                        format!("must be positive, got {w0}"),
                    ));
                }
                1.0 / (self.rho * w0)
            }
            _ => {
                return Err(Error::invalid(
                    field,
                    "exactly one of `nu` and `initial_wealth` must be set",
                ))
            }
        };
        self.belief.validate(&format!("{field}.belief"))?;
        Ok(Agent::new(self.rho, nu, self.belief))
    }
}

/// An agent with its weight resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub rho: f64,
    pub nu: f64,
    pub belief: ContinuousBelief,
    log_rho: f64,
    log_nu: f64,
}

impl Agent {
    pub fn new(rho: f64, nu: f64, belief: ContinuousBelief) -> Self {
        Agent {
            rho,
            nu,
            belief,
            log_rho: rho.ln(),
            log_nu: nu.ln(),
        }
    }
}

/// Market description as written in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSpec {
    /// Dividend volatility.
    pub sigma: f64,
    /// True drift adjustment of the driver.
    pub alpha_star: f64,
    /// Initial dividend. Defaults to `sum_j 1/nu_j`, which makes `zeta_0 = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<f64>,
    pub agents: Vec<AgentSpec>,
}

impl MarketSpec {
    /// The three-agent parameter set fitted to annual S&P data.
    pub fn three_agent() -> Self {
        let agent =
            |alpha, rho, nu| AgentSpec::with_nu(rho, nu, ContinuousBelief::ConstantDrift { alpha });
        MarketSpec {
            sigma: 0.517,
            alpha_star: -0.01,
            delta0: None,
            agents: vec![
                agent(0.210, 0.131, 14.47),
                agent(0.727, 0.01, 1.00),
                agent(-0.05, 0.443, 0.174),
            ],
        }
    }

    pub fn resolve(&self) -> Result<Economy> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(
                "market.sigma",
                format!("must be positive, got {}", self.sigma),
            ));
        }
        if !self.alpha_star.is_finite() {
            return Err(Error::invalid("market.alpha_star", "must be finite"));
        }
        if self.agents.is_empty() {
            return Err(Error::invalid(
                "market.agents",
                "at least one agent is required",
            ));
        }
        let agents = self
            .agents
            .iter()
            .enumerate()
            .map(|(j, a)| a.resolve(&format!("market.agents[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        let delta0 = match self.delta0 {
            Some(d) if d > 0.0 && d.is_finite() => d,
            Some(d) => {
                return Err(Error::invalid(
                    "market.delta0",
                    format!("must be positive, got {d}"),
                ))
            }
            None => agents.iter().map(|a| 1.0 / a.nu).sum(),
        };
        Ok(Economy {
            sigma: self.sigma,
            alpha_star: self.alpha_star,
            delta0,
            agents,
        })
    }
}

/// A validated market.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    pub sigma: f64,
    pub alpha_star: f64,
    pub delta0: f64,
    pub agents: Vec<Agent>,
}

impl Economy {
    /// All impatience rates equal and all drifts constant: the setting in
    /// which the trade-volume expansion holds.
    pub fn supports_trade_volume(&self) -> bool {
        equal_impatience(&self.agents)
            && self
                .agents
                .iter()
                .all(|a| a.belief.constant_drift().is_some())
    }
}

fn equal_impatience(agents: &[Agent]) -> bool {
    let rho0 = agents[0].rho;
    agents.iter().all(|a| (a.rho - rho0).abs() <= 1e-12 * rho0)
}

/// Uniform time grid `0, dt, ..., steps * dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dt: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(horizon: f64, dt: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid(
                "horizon",
                format!("must be positive, got {horizon}"),
            ));
        }
        if !(dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
        }
        if dt > horizon {
            return Err(Error::invalid("dt", "must not exceed the horizon"));
        }
        Ok(Grid {
            dt,
            steps: (horizon / dt).round() as usize,
        })
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
}

/// Reference-measure driver `X` and the dividend it generates.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverPath {
    pub grid: Grid,
    pub x: Vec<f64>,
    pub log_delta: Vec<f64>,
}

/// Simulates path `path_index` of the driver under the reference measure.
///
/// `X` has i.i.d. `N(0, dt)` increments drawn from the
/// `(seed, Driver, path_index)` stream and
/// `d log delta = sigma dX + (sigma alpha_star - sigma^2 / 2) dt`.
pub fn simulate_driver(economy: &Economy, grid: Grid, seed: u64, path_index: u64) -> DriverPath {
    let mut rng = rng::stream(seed, Domain::Driver, path_index);
    let sd = grid.dt.sqrt();
    let drift =
        (economy.sigma * economy.alpha_star - 0.5 * economy.sigma * economy.sigma) * grid.dt;
    let mut x = Vec::with_capacity(grid.steps + 1);
    let mut log_delta = Vec::with_capacity(grid.steps + 1);
    x.push(0.0);
    log_delta.push(economy.delta0.ln());
    for k in 0..grid.steps {
        let dx = sd * rng::standard_normal(&mut rng);
        x.push(x[k] + dx);
        log_delta.push(log_delta[k] + economy.sigma * dx + drift);
    }
    DriverPath { grid, x, log_delta }
}

/// `log(exp(-rho_j t) Lambda^j_t / nu_j)` for every agent.
pub fn log_discounted_weights(agents: &[Agent], log_lambdas: &[f64], t: f64) -> Vec<f64> {
    agents
        .iter()
        .zip(log_lambdas)
        .map(|(a, l)| -a.rho * t + l - a.log_nu)
        .collect()
}

/// State-price density at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePrice {
    /// `L_t = zeta_t delta_t = sum_j exp(-rho_j t) Lambda^j_t / nu_j`.
    pub zeta_delta: f64,
    pub zeta: f64,
    pub log_zeta: f64,
}

pub fn state_price_density(
    agents: &[Agent],
    log_lambdas: &[f64],
    delta: f64,
    t: f64,
) -> StatePrice {
    let log_l = log_sum_exp(&log_discounted_weights(agents, log_lambdas, t));
    let log_zeta = log_l - delta.ln();
    StatePrice {
        zeta_delta: log_l.exp(),
        zeta: log_zeta.exp(),
        log_zeta,
    }
}

/// Price/dividend ratio. Depends on beliefs and preferences only, never on `delta`.
pub fn price_dividend_ratio(agents: &[Agent], log_lambdas: &[f64], t: f64) -> f64 {
    let lw = log_discounted_weights(agents, log_lambdas, t);
    let lw_rho: Vec<f64> = lw.iter().zip(agents).map(|(w, a)| w - a.log_rho).collect();
    (log_sum_exp(&lw_rho) - log_sum_exp(&lw)).exp()
}

/// Returns `(S_t, S_t / delta_t)`.
pub fn stock_price(agents: &[Agent], log_lambdas: &[f64], delta: f64, t: f64) -> (f64, f64) {
    let pd = price_dividend_ratio(agents, log_lambdas, t);
    (delta * pd, pd)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateKappa {
    pub rate: f64,
    pub kappa: f64,
    /// Consumption shares `q^j_t`.
    pub q: Vec<f64>,
    pub alpha_bar: f64,
    pub rho_bar: f64,
}

/// Riskless rate and market price of risk.
///
/// `r = rho_bar + sigma (alpha_star + alpha_bar) - sigma^2`,
/// `kappa = sigma - alpha_bar`, with `alpha_bar`, `rho_bar` the
/// `q`-weighted averages of drifts and impatience rates.
pub fn rate_and_kappa(
    agents: &[Agent],
    log_lambdas: &[f64],
    alphas: &[f64],
    sigma: f64,
    alpha_star: f64,
    t: f64,
) -> RateKappa {
    let q = softmax(&log_discounted_weights(agents, log_lambdas, t));
    let alpha_bar: f64 = q.iter().zip(alphas).map(|(q, a)| q * a).sum();
    let rho_bar: f64 = q.iter().zip(agents).map(|(q, a)| q * a.rho).sum();
    RateKappa {
        rate: rho_bar + sigma * (alpha_star + alpha_bar) - sigma * sigma,
        kappa: sigma - alpha_bar,
        q,
        alpha_bar,
        rho_bar,
    }
}

/// Stock volatility `sigma^S = kappa + a` and the wealth-weighted drift `a`.
pub fn stock_volatility(
    agents: &[Agent],
    log_lambdas: &[f64],
    alphas: &[f64],
    kappa: f64,
    t: f64,
) -> (f64, f64) {
    let lw: Vec<f64> = log_discounted_weights(agents, log_lambdas, t)
        .iter()
        .zip(agents)
        .map(|(w, a)| w - a.log_rho)
        .collect();
    let a: f64 = softmax(&lw).iter().zip(alphas).map(|(w, a)| w * a).sum();
    (kappa + a, a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Holdings {
    pub wealth: Vec<f64>,
    pub consumption: Vec<f64>,
    /// Units of stock held, `pi^j`.
    pub units: Vec<f64>,
}

/// Wealth, consumption and stock holdings of each agent.
///
/// `w^j = exp(-rho_j t) Lambda^j / (zeta nu_j rho_j)`, `c^j = rho_j w^j` and
/// `pi^j = w^j (alpha^j + kappa) / sum_i w^i (alpha^i + kappa)`. The
/// denominator equals `S (a + kappa)`; zero stock volatility is an error.
pub fn wealth_and_portfolios(
    agents: &[Agent],
    log_lambdas: &[f64],
    alphas: &[f64],
    log_zeta: f64,
    stock: f64,
    kappa: f64,
    t: f64,
) -> Result<Holdings> {
    let lw = log_discounted_weights(agents, log_lambdas, t);
    let wealth: Vec<f64> = lw
        .iter()
        .zip(agents)
        .map(|(w, a)| (w - a.log_rho - log_zeta).exp())
        .collect();
    let consumption: Vec<f64> = wealth.iter().zip(agents).map(|(w, a)| a.rho * w).collect();
    let exposures: Vec<f64> = wealth
        .iter()
        .zip(alphas)
        .map(|(w, a)| w * (a + kappa))
        .collect();
    let total: f64 = exposures.iter().sum();
    let vol = total / stock;
    if !(vol.abs() > 1e-12) {
        return Err(Error::SingularMarket { t, value: vol });
    }
    Ok(Holdings {
        units: exposures.iter().map(|e| e / total).collect(),
        wealth,
        consumption,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeVolume {
    /// Diffusion coefficient of each agent's holdings.
    pub theta: Vec<f64>,
    /// Euclidean norm of `theta`.
    pub total: f64,
}

/// Diffusion coefficients `theta^j` of the holdings processes.
///
/// Valid only when all impatience rates are equal and `sigma` and every
/// `alpha^j` are constant; other inputs are rejected.
pub fn trade_volume(
    agents: &[Agent],
    q: &[f64],
    alphas: &[f64],
    alpha_bar: f64,
    sigma: f64,
) -> Result<TradeVolume> {
    if !equal_impatience(agents) {
        return Err(Error::invalid(
            "agents.rho",
            "trade volume requires equal impatience rates",
        ));
    }
    if agents.iter().any(|a| a.belief.constant_drift().is_none()) {
        return Err(Error::invalid(
            "agents.belief",
            "trade volume requires constant-drift beliefs",
        ));
    }
    let v: f64 = q
        .iter()
        .zip(alphas)
        .map(|(q, a)| q * (a - alpha_bar).powi(2))
        .sum();
    let theta: Vec<f64> = q
        .iter()
        .zip(alphas)
        .map(|(q, a)| {
            let d = a - alpha_bar;
            q * (d * d / sigma - v / sigma + d)
        })
        .collect();
    let total = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
    Ok(TradeVolume { theta, total })
}

/// Inverse marginal utility `I_j(t, y)`.
pub trait InverseMarginal {
    fn consumption(&self, t: f64, y: f64) -> f64;
}

impl<F: Fn(f64, f64) -> f64> InverseMarginal for F {
    fn consumption(&self, t: f64, y: f64) -> f64 {
        self(t, y)
    }
}

/// `U(t, c) = exp(-rho t) log c`, so `I(t, y) = exp(-rho t) / y`.
#[derive(Debug, Clone, Copy)]
pub struct LogUtility {
    pub rho: f64,
}

impl InverseMarginal for LogUtility {
    fn consumption(&self, t: f64, y: f64) -> f64 {
        (-self.rho * t).exp() / y
    }
}

/// Solves `sum_j I_j(t, zeta nu_j / Lambda^j) = delta` for `zeta > 0`.
///
/// The aggregate demand is decreasing in `zeta`, so the root is bracketed by
/// doubling steps in `log zeta` and refined by bisection to a relative
/// tolerance well below `1e-12`.
pub fn solve_market_clearing_general(
    inverse_marginals: &[&dyn InverseMarginal],
    lambdas: &[f64],
    nus: &[f64],
    delta: f64,
    t: f64,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    let excess = |u: f64| {
        let zeta = u.exp();
        let demand: f64 = inverse_marginals
            .iter()
            .zip(lambdas.iter().zip(nus))
            .map(|(i, (l, nu))| i.consumption(t, zeta * nu / l))
            .sum();
        demand.ln() - delta.ln()
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut step = 1.0;
    loop {
        let (f_lo, f_hi) = (excess(lo), excess(hi));
        if f_lo.is_nan() || f_hi.is_nan() {
            return Err(Error::BracketNotFound { t });
        }
        if f_lo >= 0.0 && f_hi <= 0.0 {
            break;
        }
        step *= 2.0;
        if step > 2048.0 {
            return Err(Error::BracketNotFound { t });
        }
        if f_lo < 0.0 {
            lo -= step;
        }
        if f_hi > 0.0 {
            hi += step;
        }
    }
    let u = crate::math::bisect(|u| -excess(u), lo, hi, 1e-15);
    Ok(u.exp())
}

/// One simulated equilibrium path. Per-agent series are indexed `[agent][time]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPath {
    pub grid: Grid,
    pub x: Vec<f64>,
    pub delta: Vec<f64>,
    pub zeta: Vec<f64>,
    pub stock: Vec<f64>,
    pub pd: Vec<f64>,
    pub rate: Vec<f64>,
    pub kappa: Vec<f64>,
    pub sigma_s: Vec<f64>,
    pub alpha_bar: Vec<f64>,
    pub a: Vec<f64>,
    pub log_lambda: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub wealth: Vec<Vec<f64>>,
    pub consumption: Vec<Vec<f64>>,
    pub units: Vec<Vec<f64>>,
    /// Present only when [`Economy::supports_trade_volume`] holds.
    pub theta: Option<Vec<Vec<f64>>>,
}

impl EquilibriumPath {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Per-step total return `(S_{k+1} + delta_k dt - S_k) / S_k`.
    pub fn step_returns(&self) -> Vec<f64> {
        let dt = self.grid.dt;
        self.stock
            .windows(2)
            .zip(&self.delta)
            .map(|(s, d)| (s[1] + d * dt - s[0]) / s[0])
            .collect()
    }

    /// CSV header; column order is fixed.
    pub fn csv_header(agents: usize) -> String {
        let mut cols: Vec<String> = ["t", "X", "delta", "zeta", "S", "PD", "r", "kappa", "sigmaS"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for name in ["q", "w", "c", "pi", "theta"] {
            cols.extend((1..=agents).map(|j| format!("{name}_{j}")));
        }
        cols.join(",")
    }

    /// Writes the path as CSV. `theta_j` columns are empty when trade volume is undefined.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        let agents = self.q.len();
        writeln!(out, "{}", Self::csv_header(agents))?;
        for k in 0..self.len() {
            let mut row = vec![
                self.grid.time(k),
                self.x[k],
                self.delta[k],
                self.zeta[k],
                self.stock[k],
                self.pd[k],
                self.rate[k],
                self.kappa[k],
                self.sigma_s[k],
            ]
            .into_iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>();
            for series in [&self.q, &self.wealth, &self.consumption, &self.units] {
                row.extend(series.iter().map(|s| s[k].to_string()));
            }
            match &self.theta {
                Some(theta) => row.extend(theta.iter().map(|s| s[k].to_string())),
                None => row.extend(std::iter::repeat_n(String::new(), agents)),
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Evaluates the equilibrium along a driver path.
///
/// The beliefs are integrated from `X` alone, so two drivers sharing `x` but
/// with different `log_delta` produce identical `pd` series.
pub fn equilibrium_path(economy: &Economy, driver: &DriverPath) -> Result<EquilibriumPath> {
    let grid = driver.grid;
    let n = driver.x.len();
    let agents = &economy.agents;
    let j_count = agents.len();
    let with_theta = economy.supports_trade_volume();
    let per_agent = || vec![Vec::with_capacity(n); j_count];

    let mut path = EquilibriumPath {
        grid,
        x: driver.x.clone(),
        delta: Vec::with_capacity(n),
        zeta: Vec::with_capacity(n),
        stock: Vec::with_capacity(n),
        pd: Vec::with_capacity(n),
        rate: Vec::with_capacity(n),
        kappa: Vec::with_capacity(n),
        sigma_s: Vec::with_capacity(n),
        alpha_bar: Vec::with_capacity(n),
        a: Vec::with_capacity(n),
        log_lambda: per_agent(),
        q: per_agent(),
        wealth: per_agent(),
        consumption: per_agent(),
        units: per_agent(),
        theta: with_theta.then(per_agent),
    };

    let mut log_lambdas = vec![0.0; j_count];
    let mut alphas = vec![0.0; j_count];
    for k in 0..n {
        let t = grid.time(k);
        let x = driver.x[k];
        if k > 0 {
            let dx = x - driver.x[k - 1];
            for (l, a) in log_lambdas.iter_mut().zip(&alphas) {
                *l = log_lambda_step(*l, *a, dx, grid.dt);
            }
        }
        for (a, agent) in alphas.iter_mut().zip(agents) {
            *a = agent.belief.drift(t, x);
        }
        let delta = driver.log_delta[k].exp();
        let spd = state_price_density(agents, &log_lambdas, delta, t);
        let (stock, pd) = stock_price(agents, &log_lambdas, delta, t);
        if !(pd < PD_DIVERGENCE_LIMIT) {
            return Err(Error::IntegrabilityViolation { t, pd });
        }
        let rk = rate_and_kappa(
            agents,
            &log_lambdas,
            &alphas,
            economy.sigma,
            economy.alpha_star,
            t,
        );
        let (sigma_s, a) = stock_volatility(agents, &log_lambdas, &alphas, rk.kappa, t);
        let holdings = wealth_and_portfolios(
            agents,
            &log_lambdas,
            &alphas,
            spd.log_zeta,
            stock,
            rk.kappa,
            t,
        )?;
        if let Some(theta) = path.theta.as_mut() {
            let tv = trade_volume(agents, &rk.q, &alphas, rk.alpha_bar, economy.sigma)?;
            for (series, v) in theta.iter_mut().zip(tv.theta) {
                series.push(v);
            }
        }

        path.delta.push(delta);
        path.zeta.push(spd.zeta);
        path.stock.push(stock);
        path.pd.push(pd);
        path.rate.push(rk.rate);
        path.kappa.push(rk.kappa);
        path.sigma_s.push(sigma_s);
        path.alpha_bar.push(rk.alpha_bar);
        path.a.push(a);
        #[allow(clippy::needless_range_loop)]
        for j in 0..j_count {
            path.log_lambda[j].push(log_lambdas[j]);
            path.q[j].push(rk.q[j]);
            path.wealth[j].push(holdings.wealth[j]);
            path.consumption[j].push(holdings.consumption[j]);
            path.units[j].push(holdings.units[j]);
        }
    }
    Ok(path)
}

/// Simulates path `path_index` of the master `seed`.
pub fn simulate_path(
    economy: &Economy,
    grid: Grid,
    seed: u64,
    path_index: u64,
) -> Result<EquilibriumPath> {
    equilibrium_path(economy, &simulate_driver(economy, grid, seed, path_index))
}

/// Simulates paths `0..n_paths`. The result is ordered by path index and
/// does not depend on `parallel`.
pub fn simulate_paths(
    economy: &Economy,
    grid: Grid,
    seed: u64,
    n_paths: usize,
    parallel: bool,
) -> Result<Vec<EquilibriumPath>> {
    let run = |i: usize| simulate_path(economy, grid, seed, i as u64);
    if parallel {
        (0..n_paths).into_par_iter().map(run).collect()
    } else {
        (0..n_paths).map(run).collect()
    }
}
