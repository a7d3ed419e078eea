//! Moment estimators, empirical targets and parameter fitting.
//!
//! Estimators, applied to every grid point of every path:
//!
//! * price/dividend ratio: mean and standard deviation of `S_t / delta_t`;
//! * return on equity: per-step total return
//!   `(S_{t+dt} + delta_t dt - S_t) / S_t`, mean scaled by `1/dt` and
//!   standard deviation by `1/sqrt(dt)`;
//! * riskless rate: mean and standard deviation of the instantaneous `r_t`;
//! * equity premium: mean return minus mean rate;
//! * Sharpe ratio: premium over return standard deviation.
//!
//! Standard deviations are population (divide by `n`) and pooled over paths.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beliefs::ContinuousBelief;
use crate::equilibrium::{simulate_path, EquilibriumPath, Grid, MarketSpec, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::optimize::NelderMead;

/// The eight moments compared in the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean_pd: f64,
    pub std_pd: f64,
    pub mean_return: f64,
    pub std_return: f64,
    pub mean_rate: f64,
    pub std_rate: f64,
    pub equity_premium: f64,
    pub sharpe: f64,
}

impl MomentReport {
    /// Builds a report from the six primary estimates; premium and Sharpe
    /// ratio follow from them.
    pub fn from_estimates(
        mean_pd: f64,
        std_pd: f64,
        mean_return: f64,
        std_return: f64,
        mean_rate: f64,
        std_rate: f64,
    ) -> Self {
        let equity_premium = mean_return - mean_rate;
        MomentReport {
            mean_pd,
            std_pd,
            mean_return,
            std_return,
            mean_rate,
            std_rate,
            equity_premium,
            sharpe: equity_premium / std_return,
        }
    }

    /// Long-run moments of the US stock market.
    pub fn historical() -> Self {
        MomentReport {
            mean_pd: 25.0,
            std_pd: 7.1,
            mean_return: 0.07,
            std_return: 0.18,
            mean_rate: 0.018,
            std_rate: 0.057,
            equity_premium: 0.06,
            sharpe: 0.33,
        }
    }

    /// Moments of the three-agent economy at its reference fit.
    pub fn reference_fit() -> Self {
        MomentReport {
            mean_pd: 26.06,
            std_pd: 3.84,
            mean_return: 0.077,
            std_return: 0.134,
            mean_rate: 0.018,
            std_rate: 0.061,
            equity_premium: 0.059,
            sharpe: 0.326,
        }
    }

    pub fn as_array(&self) -> [f64; 8] {
        [
            self.mean_pd,
            self.std_pd,
            self.mean_return,
            self.std_return,
            self.mean_rate,
            self.std_rate,
            self.equity_premium,
            self.sharpe,
        ]
    }

    pub const LABELS: [&'static str; 8] = [
        "Mean price/dividend ratio",
        "Standard deviation of price/dividend ratio",
        "Mean return on equity",
        "Standard deviation of return on equity",
        "Mean riskless rate",
        "Standard deviation of riskless rate",
        "Equity premium",
        "Sharpe ratio",
    ];

    /// Aligned side-by-side table.
    pub fn comparison_table(columns: &[(&str, &MomentReport)]) -> String {
        let mut out = format!("{:<44}", "");
        for (name, _) in columns {
            out.push_str(&format!("{name:>12}"));
        }
        out.push('\n');
        for (i, label) in Self::LABELS.iter().enumerate() {
            out.push_str(&format!("{label:<44}"));
            for (_, report) in columns {
                out.push_str(&format!("{:>12.4}", report.as_array()[i]));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for MomentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Self::comparison_table(&[("value", self)]))
    }
}

/// Where a set of targets came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    BuiltIn,
    Csv {
        path: String,
        rows: usize,
        first_date: String,
        last_date: String,
        /// False when the file had no rate column and the built-in rate moments were used.
        rate_from_data: bool,
    },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::BuiltIn => write!(f, "built-in historical moments"),
            Provenance::Csv {
                path,
                rows,
                first_date,
                last_date,
                rate_from_data,
            } => write!(
                f,
                "{path}: {rows} rows, {first_date} to {last_date}, rate moments {}",
                if *rate_from_data {
                    "from data"
                } else {
                    "built-in"
                }
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalTargets {
    pub moments: MomentReport,
    pub provenance: Provenance,
}

impl Default for EmpiricalTargets {
    fn default() -> Self {
        EmpiricalTargets {
            moments: MomentReport::historical(),
            provenance: Provenance::BuiltIn,
        }
    }
}

/// Count, mean and sum of squared deviations of one series.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Running {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Running {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Pooled combination of two partial results.
    pub fn merge(&self, other: &Running) -> Running {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (a, b) = (self.n as f64, other.n as f64);
        Running {
            n,
            mean: self.mean + d * b / n as f64,
            m2: self.m2 + other.m2 + d * d * a * b / n as f64,
        }
    }

    pub fn std(&self) -> f64 {
        (self.m2 / self.n as f64).sqrt()
    }
}

/// Moments of a single path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMoments {
    pub dt: f64,
    pub pd: Running,
    pub returns: Running,
    pub rate: Running,
}

impl PathMoments {
    pub fn from_path(path: &EquilibriumPath) -> Self {
        let mut m = PathMoments {
            dt: path.grid.dt,
            pd: Running::default(),
            returns: Running::default(),
            rate: Running::default(),
        };
        path.pd.iter().for_each(|&x| m.pd.push(x));
        path.rate.iter().for_each(|&x| m.rate.push(x));
        path.step_returns()
            .into_iter()
            .for_each(|x| m.returns.push(x));
        m
    }

    fn key(&self) -> [f64; 6] {
        [
            self.pd.mean,
            self.pd.m2,
            self.returns.mean,
            self.returns.m2,
            self.rate.mean,
            self.rate.m2,
        ]
    }
}

/// Streaming accumulator over paths.
///
/// Per-path results are kept and reduced in a canonical order, so the
/// report is bit-identical for any permutation of the input paths.
#[derive(Debug, Clone, Default)]
pub struct MomentAccumulator {
    parts: Vec<PathMoments>,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_path(&mut self, path: &EquilibriumPath) -> Result<()> {
        self.push_moments(PathMoments::from_path(path))
    }

    pub fn push_moments(&mut self, m: PathMoments) -> Result<()> {
        if let Some(first) = self.parts.first() {
            if first.dt != m.dt {
                return Err(Error::invalid(
                    "paths",
                    "all paths must share one grid step",
                ));
            }
        }
        self.parts.push(m);
        Ok(())
    }

    pub fn paths(&self) -> usize {
        self.parts.len()
    }

    pub fn report(&self) -> Result<MomentReport> {
        if self.parts.is_empty() {
            return Err(Error::EmptyInput("no paths to compute moments from".into()));
        }
        let mut parts = self.parts.clone();
        parts.sort_by(|a, b| {
            a.key()
                .iter()
                .zip(b.key().iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let dt = parts[0].dt;
        let (mut pd, mut ret, mut rate) =
            (Running::default(), Running::default(), Running::default());
        for p in &parts {
            pd = pd.merge(&p.pd);
            ret = ret.merge(&p.returns);
            rate = rate.merge(&p.rate);
        }
        Ok(MomentReport::from_estimates(
            pd.mean,
            pd.std(),
            ret.mean / dt,
            ret.std() / dt.sqrt(),
            rate.mean,
            rate.std(),
        ))
    }
}

/// Moments pooled over `paths`, which must share one grid.
pub fn compute_moments(paths: &[EquilibriumPath]) -> Result<MomentReport> {
    let mut acc = MomentAccumulator::new();
    for p in paths {
        if p.grid != paths[0].grid {
            return Err(Error::invalid("paths", "all paths must share one grid"));
        }
        acc.push_path(p)?;
    }
    acc.report()
}

/// Simulates `n_paths` paths and returns their moments without keeping the paths.
pub fn simulate_moments(
    spec: &MarketSpec,
    grid: Grid,
    seed: u64,
    n_paths: usize,
    parallel: bool,
) -> Result<MomentReport> {
    let economy = spec.resolve()?;
    let one = |i: usize| {
        simulate_path(&economy, grid, seed, i as u64).map(|p| PathMoments::from_path(&p))
    };
    let parts: Vec<PathMoments> = if parallel {
        (0..n_paths)
            .into_par_iter()
            .map(one)
            .collect::<Result<_>>()?
    } else {
        (0..n_paths).map(one).collect::<Result<_>>()?
    };
    let mut acc = MomentAccumulator::new();
    for p in parts {
        acc.push_moments(p)?;
    }
    acc.report()
}

/// Parses `YYYY.MM`, `YYYY-MM` or `YYYY-MM-DD` into a month index.
/// A single digit after the dot is read as a decimal fraction, so `1871.1`
/// is October.
fn parse_month(s: &str) -> Option<i64> {
    let s = s.trim();
    let (year, month) = if let Some((y, m)) = s.split_once('.') {
        let month = match m.len() {
            1 => m.parse::<i64>().ok()? * 10,
            2 => m.parse::<i64>().ok()?,
            _ => return None,
        };
        (y.parse::<i64>().ok()?, month)
    } else {
        let mut parts = s.split('-');
        let y = parts.next()?.parse::<i64>().ok()?;
        let m = parts.next()?.parse::<i64>().ok()?;
        if let Some(d) = parts.next() {
            d.parse::<u32>().ok().filter(|d| (1..=31).contains(d))?;
        }
        if parts.next().is_some() {
            return None;
        }
        (y, m)
    };
    (1..=12).contains(&month).then_some(year * 12 + month - 1)
}

fn find_column(headers: &csv::StringRecord, names: &[&str]) -> Option<usize> {
    headers
        .iter()
        .position(|h| names.iter().any(|n| h.trim().eq_ignore_ascii_case(n)))
}

/// Reads monthly price/dividend data and computes the eight moments.
///
/// Required columns: `date`, `price` (or `real_price`) and `dividend` (or
/// `real_dividend`), with dividends at an annual rate. An optional `rate`
/// column holds the annual riskless rate as a fraction; without it the
/// rate moments fall back to the built-in table. Monthly returns
/// `(P_{m+1} + D_m / 12 - P_m) / P_m` are annualized by 12 (mean) and
/// `sqrt(12)` (standard deviation). Spans shorter than ten years are rejected.
pub fn ingest_price_dividend_csv(path: &Path) -> Result<EmpiricalTargets> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let date_col = find_column(&headers, &["date"])
        .ok_or_else(|| parse_err(1, "missing `date` column".into()))?;
    let price_col = find_column(&headers, &["price", "real_price"])
        .ok_or_else(|| parse_err(1, "missing `price` or `real_price` column".into()))?;
    let div_col = find_column(&headers, &["dividend", "real_dividend"])
        .ok_or_else(|| parse_err(1, "missing `dividend` or `real_dividend` column".into()))?;
    let rate_col = find_column(&headers, &["rate"]);

    let mut months = Vec::new();
    let mut dates = Vec::new();
    let mut prices = Vec::new();
    let mut dividends = Vec::new();
    let mut rates = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        let field = |c: usize, name: &str| {
            record
                .get(c)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| parse_err(line, format!("missing {name}")))
        };
        let number = |c: usize, name: &str| -> Result<f64> {
            let raw = field(c, name)?;
            let v: f64 = raw
                .parse()
                .map_err(|_| parse_err(line, format!("bad {name} `{raw}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(line, format!("non-finite {name}")))
            }
        };
        let date = field(date_col, "date")?;
        let month =
            parse_month(date).ok_or_else(|| parse_err(line, format!("bad date `{date}`")))?;
        let price = number(price_col, "price")?;
        let dividend = number(div_col, "dividend")?;
        if price <= 0.0 || dividend <= 0.0 {
            return Err(parse_err(
                line,
                "price and dividend must be positive".into(),
            ));
        }
        if let Some(&prev) = months.last() {
            if month <= prev {
                return Err(parse_err(
                    line,
                    format!("date `{date}` is not after the previous row"),
                ));
            }
        }
        if let Some(c) = rate_col {
            rates.push(number(c, "rate")?);
        }
        months.push(month);
        dates.push(date.to_string());
        prices.push(price);
        dividends.push(dividend);
    }
    if months.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} has no data rows",
            path.display()
        )));
    }
    let span = months[months.len() - 1] - months[0];
    if span < 120 {
        return Err(Error::invalid(
            "csv",
            format!("date span of {span} months is shorter than ten years"),
        ));
    }

    let mut pd = Running::default();
    prices
        .iter()
        .zip(&dividends)
        .for_each(|(p, d)| pd.push(p / d));
    let mut ret = Running::default();
    for k in 0..prices.len() - 1 {
        ret.push((prices[k + 1] + dividends[k] / 12.0 - prices[k]) / prices[k]);
    }
    let (mean_rate, std_rate) = if rates.is_empty() {
        let t = MomentReport::historical();
        (t.mean_rate, t.std_rate)
    } else {
        let mut r = Running::default();
        rates.iter().for_each(|&x| r.push(x));
        (r.mean, r.std())
    };
    Ok(EmpiricalTargets {
        moments: MomentReport::from_estimates(
            pd.mean,
            pd.std(),
            12.0 * ret.mean,
            12f64.sqrt() * ret.std(),
            mean_rate,
            std_rate,
        ),
        provenance: Provenance::Csv {
            path: path.display().to_string(),
            rows: prices.len(),
            first_date: dates[0].clone(),
            last_date: dates[dates.len() - 1].clone(),
            rate_from_data: !rates.is_empty(),
        },
    })
}

/// A parameter the fit may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterName {
    Sigma,
    AlphaStar,
    Alpha,
    Rho,
    Nu,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParameter {
    pub name: ParameterName,
    /// Agent index for per-agent parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<usize>,
    pub lo: f64,
    pub hi: f64,
}

impl FreeParameter {
    pub fn new(name: ParameterName, agent: Option<usize>, lo: f64, hi: f64) -> Self {
        FreeParameter {
            name,
            agent,
            lo,
            hi,
        }
    }

    fn label(&self) -> String {
        match self.agent {
            Some(j) => format!("{:?}[{j}]", self.name).to_lowercase(),
            None => format!("{:?}", self.name).to_lowercase(),
        }
    }

    fn get(&self, spec: &MarketSpec) -> f64 {
        let agent = || &spec.agents[self.agent.unwrap_or(0)];
        match self.name {
            ParameterName::Sigma => spec.sigma,
            ParameterName::AlphaStar => spec.alpha_star,
            ParameterName::Alpha => agent().belief.constant_drift().unwrap_or(0.0),
            ParameterName::Rho => agent().rho,
            ParameterName::Nu => agent().nu.unwrap_or(1.0),
        }
    }

    fn set(&self, spec: &mut MarketSpec, value: f64) {
        let j = self.agent.unwrap_or(0);
        match self.name {
            ParameterName::Sigma => spec.sigma = value,
            ParameterName::AlphaStar => spec.alpha_star = value,
            ParameterName::Alpha => {
                spec.agents[j].belief = ContinuousBelief::ConstantDrift { alpha: value }
            }
            ParameterName::Rho => spec.agents[j].rho = value,
            ParameterName::Nu => {
                spec.agents[j].nu = Some(value);
                spec.agents[j].initial_wealth = None;
            }
        }
    }
}

/// Weights of the eight squared relative errors in the loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentWeights {
    pub mean_pd: f64,
    pub std_pd: f64,
    pub mean_return: f64,
    pub std_return: f64,
    pub mean_rate: f64,
    pub std_rate: f64,
    pub equity_premium: f64,
    pub sharpe: f64,
}

impl Default for MomentWeights {
    fn default() -> Self {
        MomentWeights {
            mean_pd: 1.0,
            std_pd: 1.0,
            mean_return: 1.0,
            std_return: 1.0,
            mean_rate: 1.0,
            std_rate: 1.0,
            equity_premium: 1.0,
            sharpe: 1.0,
        }
    }
}

impl MomentWeights {
    pub fn only(index: usize) -> Self {
        let mut w = [0.0; 8];
        w[index] = 1.0;
        Self::from_array(w)
    }

    fn from_array(w: [f64; 8]) -> Self {
        MomentWeights {
            mean_pd: w[0],
            std_pd: w[1],
            mean_return: w[2],
            std_return: w[3],
            mean_rate: w[4],
            std_rate: w[5],
            equity_premium: w[6],
            sharpe: w[7],
        }
    }

    fn as_array(&self) -> [f64; 8] {
        [
            self.mean_pd,
            self.std_pd,
            self.mean_return,
            self.std_return,
            self.mean_rate,
            self.std_rate,
            self.equity_premium,
            self.sharpe,
        ]
    }
}

/// `sum_k w_k ((m_k - target_k) / target_k)^2`; terms with zero weight are skipped.
pub fn moment_loss(report: &MomentReport, targets: &MomentReport, weights: &MomentWeights) -> f64 {
    report
        .as_array()
        .iter()
        .zip(targets.as_array())
        .zip(weights.as_array())
        .filter(|(_, w)| *w != 0.0)
        .map(|((m, t), w)| w * ((m - t) / t).powi(2))
        .sum()
}

fn default_paths() -> usize {
    200
}
fn default_horizon() -> f64 {
    50.0
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_max_evaluations() -> usize {
    200
}

/// A moment-matching problem. Every loss evaluation reuses the same seed,
/// so the simulated shocks are common across parameter points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationProblem {
    /// Starting point; parameters not listed in `free` stay fixed.
    pub market: MarketSpec,
    pub free: Vec<FreeParameter>,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub weights: MomentWeights,
    #[serde(default = "default_max_evaluations")]
    pub max_evaluations: usize,
    #[serde(default)]
    pub parallel: bool,
}

impl CalibrationProblem {
    pub fn new(market: MarketSpec, free: Vec<FreeParameter>) -> Self {
        CalibrationProblem {
            market,
            free,
            paths: default_paths(),
            horizon: default_horizon(),
            dt: default_dt(),
            seed: 0,
            weights: MomentWeights::default(),
            max_evaluations: default_max_evaluations(),
            parallel: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.market.resolve()?;
        Grid::new(self.horizon, self.dt)?;
        if self.paths == 0 {
            return Err(Error::invalid("fit.paths", "must be at least 1"));
        }
        for (i, p) in self.free.iter().enumerate() {
            let field = format!("fit.free[{i}]");
            if !(p.lo < p.hi && p.lo.is_finite() && p.hi.is_finite()) {
                return Err(Error::invalid(
                    field,
                    format!("need lo < hi, got [{}, {}]", p.lo, p.hi),
                ));
            }
            let positive = matches!(
                p.name,
                ParameterName::Sigma | ParameterName::Rho | ParameterName::Nu
            );
            if positive && p.lo <= 0.0 {
                return Err(Error::invalid(
                    field,
                    format!("{} must stay positive", p.label()),
                ));
            }
            let per_agent = matches!(
                p.name,
                ParameterName::Alpha | ParameterName::Rho | ParameterName::Nu
            );
            match (per_agent, p.agent) {
                (true, Some(j)) if j < self.market.agents.len() => {}
                (true, _) => return Err(Error::invalid(field, "needs a valid `agent` index")),
                (false, Some(_)) => return Err(Error::invalid(field, "takes no `agent` index")),
                (false, None) => {}
            }
            if p.name == ParameterName::Alpha
                && self.market.agents[p.agent.unwrap()]
                    .belief
                    .constant_drift()
                    .is_none()
            {
                return Err(Error::invalid(
                    field,
                    "alpha is only free for constant-drift agents",
                ));
            }
        }
        Ok(())
    }

    fn to_unbounded(&self, spec: &MarketSpec) -> Vec<f64> {
        self.free
            .iter()
            .map(|p| {
                let s = ((p.get(spec) - p.lo) / (p.hi - p.lo)).clamp(1e-6, 1.0 - 1e-6);
                (s / (1.0 - s)).ln()
            })
            .collect()
    }

    /// The spec at the box-transformed point `u`.
    pub fn spec_at(&self, u: &[f64]) -> MarketSpec {
        let mut spec = self.market.clone();
        for (p, &ui) in self.free.iter().zip(u) {
            p.set(&mut spec, p.lo + (p.hi - p.lo) / (1.0 + (-ui).exp()));
        }
        spec
    }

    /// Simulated moments of `spec` under this problem's seed and budget.
    pub fn moments(&self, spec: &MarketSpec) -> Result<MomentReport> {
        simulate_moments(
            spec,
            Grid::new(self.horizon, self.dt)?,
            self.seed,
            self.paths,
            self.parallel,
        )
    }

    /// Loss of `spec`; simulation failures and non-finite moments give `+inf`.
    pub fn loss(&self, spec: &MarketSpec, targets: &MomentReport) -> f64 {
        match self.moments(spec) {
            Ok(m) => {
                let l = moment_loss(&m, targets, &self.weights);
                if l.is_finite() {
                    l
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub market: MarketSpec,
    pub report: MomentReport,
    pub loss: f64,
    pub start_loss: f64,
    pub evaluations: usize,
}

impl FitResult {
    /// `[market]` table reusable as a `simulate-log` config.
    pub fn to_toml_fragment(&self) -> String {
        #[derive(Serialize)]
        struct Wrapper<'a> {
            market: &'a MarketSpec,
        }
        toml::to_string(&Wrapper {
            market: &self.market,
        })
        .expect("market spec serializes")
    }
}

/// Minimizes the moment loss with Nelder–Mead on logistic-transformed
/// coordinates, which keep every parameter inside its bounds.
pub fn fit_parameters(
    problem: &CalibrationProblem,
    targets: &EmpiricalTargets,
) -> Result<FitResult> {
    problem.validate()?;
    let t = targets.moments;
    let start = problem.to_unbounded(&problem.market);
    let start_loss = problem.loss(&problem.spec_at(&start), &t);
    let nm = NelderMead {
        max_evaluations: problem.max_evaluations,
        f_tol: 1e-12,
        x_tol: 1e-6,
        ..NelderMead::default()
    };
    let best = nm.minimize(|u| problem.loss(&problem.spec_at(u), &t), &start);
    let market = problem.spec_at(&best.x);
    let report = problem.moments(&market)?;
    Ok(FitResult {
        loss: moment_loss(&report, &t, &problem.weights),
        market,
        report,
        start_loss,
        evaluations: best.evaluations + 1,
    })
}
