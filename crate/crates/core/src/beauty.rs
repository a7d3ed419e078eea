//! One-period CARA beauty contest.
//!
//! Agent `j` has risk aversion `gamma_j` and believes the payoff is
//! `N(alpha_j, v_j)`. With truthful reporting the price is the
//! `p`-weighted average of the `alpha_j`, `p_j` proportional to
//! `1/(gamma_j v_j)`. Agents who know the price is formed from professed
//! beliefs may profess `alpha~_j` instead; the Pareto-efficient profile is
//! `alpha~_j = (1 - p_j) alpha_j + p_j S~`. Objectives are always evaluated
//! under each agent's true belief.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContestAgent {
    pub gamma: f64,
    pub alpha: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContestSpec {
    pub agents: Vec<ContestAgent>,
}

impl ContestSpec {
    pub fn new(agents: Vec<ContestAgent>) -> Self {
        ContestSpec { agents }
    }

    /// Builds a spec from parallel slices.
    pub fn from_slices(gamma: &[f64], alpha: &[f64], variance: &[f64]) -> Self {
        ContestSpec {
            agents: gamma
                .iter()
                .zip(alpha)
                .zip(variance)
                .map(|((&gamma, &alpha), &variance)| ContestAgent {
                    gamma,
                    alpha,
                    variance,
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents.len() < 2 {
            return Err(Error::invalid(
                "contest.agents",
                format!(
                    "at least two agents are required, got {}",
                    self.agents.len()
                ),
            ));
        }
        for (j, a) in self.agents.iter().enumerate() {
            if !(a.gamma > 0.0 && a.gamma.is_finite()) {
                return Err(Error::invalid(
                    format!("contest.agents[{j}].gamma"),
                    format!("must be positive, got {}", a.gamma),
                ));
            }
            if !(a.variance > 0.0 && a.variance.is_finite()) {
                return Err(Error::invalid(
                    format!("contest.agents[{j}].variance"),
                    format!("must be positive, got {}", a.variance),
                ));
            }
            if !a.alpha.is_finite() {
                return Err(Error::invalid(
                    format!("contest.agents[{j}].alpha"),
                    "must be finite",
                ));
            }
        }
        Ok(())
    }

    /// Price weights `p_j`, summing to one.
    pub fn weights(&self) -> Vec<f64> {
        let raw: Vec<f64> = self
            .agents
            .iter()
            .map(|a| 1.0 / (a.gamma * a.variance))
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|r| r / total).collect()
    }
}

/// `-exp(-(alpha - S)^2 / (2 v)) / gamma`.
pub fn truthful_objective(a: &ContestAgent, price: f64) -> f64 {
    -(-(a.alpha - price).powi(2) / (2.0 * a.variance)).exp() / a.gamma
}

/// Expected utility under the true belief of an agent who professes
/// `professed` and trades at `price`.
pub fn faked_objective(a: &ContestAgent, professed: f64, price: f64) -> f64 {
    let holding = (professed - price) / (a.gamma * a.variance);
    let exponent = -a.gamma * holding * (a.alpha - professed)
        - (professed - price).powi(2) / (2.0 * a.variance);
    -exponent.exp() / a.gamma
}

#[derive(Debug, Clone, PartialEq)]
pub struct Truthful {
    pub weights: Vec<f64>,
    pub price: f64,
    pub holdings: Vec<f64>,
    pub objectives: Vec<f64>,
}

pub fn truthful_equilibrium(spec: &ContestSpec) -> Result<Truthful> {
    spec.validate()?;
    let weights = spec.weights();
    let price: f64 = weights
        .iter()
        .zip(&spec.agents)
        .map(|(p, a)| p * a.alpha)
        .sum();
    Ok(Truthful {
        holdings: spec
            .agents
            .iter()
            .map(|a| (a.alpha - price) / (a.gamma * a.variance))
            .collect(),
        objectives: spec
            .agents
            .iter()
            .map(|a| truthful_objective(a, price))
            .collect(),
        weights,
        price,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Faked {
    pub professed: Vec<f64>,
    pub price: f64,
    pub holdings: Vec<f64>,
    pub objectives: Vec<f64>,
}

/// The Pareto-efficient faked-beliefs equilibrium.
pub fn pareto_faked_equilibrium(spec: &ContestSpec) -> Result<Faked> {
    spec.validate()?;
    let p = spec.weights();
    let q: Vec<f64> = p.iter().map(|p| p * (1.0 - p)).collect();
    let price = q
        .iter()
        .zip(&spec.agents)
        .map(|(q, a)| q * a.alpha)
        .sum::<f64>()
        / q.iter().sum::<f64>();
    let professed: Vec<f64> = p
        .iter()
        .zip(&spec.agents)
        .map(|(p, a)| (1.0 - p) * a.alpha + p * price)
        .collect();
    Ok(Faked {
        holdings: professed
            .iter()
            .zip(&spec.agents)
            .map(|(f, a)| (f - price) / (a.gamma * a.variance))
            .collect(),
        objectives: professed
            .iter()
            .zip(&spec.agents)
            .map(|(f, a)| faked_objective(a, *f, price))
            .collect(),
        professed,
        price,
    })
}

/// Agent `j`'s objective when it professes `professed` and the others'
/// professed beliefs contribute `rest = sum_{i != j} p_i alpha~_i` to the price.
pub fn deviation_objective(
    spec: &ContestSpec,
    weights: &[f64],
    j: usize,
    rest: f64,
    professed: f64,
) -> f64 {
    faked_objective(&spec.agents[j], professed, weights[j] * professed + rest)
}

/// Maximizer of [`deviation_objective`]: `((1 - p) alpha + p rest) / (1 - p^2)`.
pub fn best_response(spec: &ContestSpec, weights: &[f64], j: usize, rest: f64) -> f64 {
    let p = weights[j];
    ((1.0 - p) * spec.agents[j].alpha + p * rest) / (1.0 - p * p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Welfare {
    /// Strictly better off under faking.
    pub improves: Vec<bool>,
    pub all_improve: bool,
    pub all_worse: bool,
    /// `alpha~_j` lies between `alpha_j` and `S_0`.
    pub professed_between: Vec<bool>,
    /// `sum q (alpha - S_0)^2` with `q` proportional to `p (1 - p)`.
    pub identity_lhs: f64,
    /// `sum q (alpha - S~)^2 + (S_0 - S~)^2`.
    pub identity_rhs: f64,
}

pub fn welfare_comparison(spec: &ContestSpec, truthful: &Truthful, faked: &Faked) -> Welfare {
    let (s0, s1) = (truthful.price, faked.price);
    let improves: Vec<bool> = spec
        .agents
        .iter()
        .zip(&faked.professed)
        .map(|(a, &f)| (a.alpha - s0).powi(2) < (f - s1).powi(2) + 2.0 * (f - s1) * (a.alpha - f))
        .collect();
    let all_worse =
        spec.agents.iter().zip(&faked.professed).all(|(a, &f)| {
            (a.alpha - s0).powi(2) > (f - s1).powi(2) + 2.0 * (f - s1) * (a.alpha - f)
        });
    let professed_between = spec
        .agents
        .iter()
        .zip(&faked.professed)
        .map(|(a, &f)| (f - a.alpha) * (f - s0) <= 0.0)
        .collect();
    let raw: Vec<f64> = truthful.weights.iter().map(|p| p * (1.0 - p)).collect();
    let total: f64 = raw.iter().sum();
    let q: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let identity_lhs = q
        .iter()
        .zip(&spec.agents)
        .map(|(q, a)| q * (a.alpha - s0).powi(2))
        .sum();
    let identity_rhs = q
        .iter()
        .zip(&spec.agents)
        .map(|(q, a)| q * (a.alpha - s1).powi(2))
        .sum::<f64>()
        + (s0 - s1).powi(2);
    Welfare {
        all_improve: improves.iter().all(|&b| b),
        improves,
        all_worse,
        professed_between,
        identity_lhs,
        identity_rhs,
    }
}

/// Outcome when only the agents in a subset fake.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFaking {
    pub price: f64,
    pub professed: Vec<f64>,
    /// For each truthful agent: its index and the gain from its best
    /// unilateral deviation, in objective units.
    pub deviation_gains: Vec<(usize, f64)>,
}

/// Agents in `fakers` use `alpha~_j = (1 - p_j) alpha_j + p_j S~`, the rest
/// report truthfully, and `S~` solves
/// `S~ (1 - sum_F p^2) = sum_F p (1 - p) alpha + sum_{not F} p alpha`.
pub fn partial_faking(spec: &ContestSpec, fakers: &[usize]) -> Result<PartialFaking> {
    spec.validate()?;
    let n = spec.agents.len();
    let mut in_f = vec![false; n];
    for &j in fakers {
        if j >= n {
            return Err(Error::invalid(
                "fakers",
                format!("agent index {j} out of range"),
            ));
        }
        in_f[j] = true;
    }
    let p = spec.weights();
    let (mut num, mut p2) = (0.0, 0.0);
    for j in 0..n {
        let (pj, aj) = (p[j], spec.agents[j].alpha);
        if in_f[j] {
            num += pj * (1.0 - pj) * aj;
            p2 += pj * pj;
        } else {
            num += pj * aj;
        }
    }
    let price = num / (1.0 - p2);
    let professed: Vec<f64> = (0..n)
        .map(|j| {
            let a = spec.agents[j].alpha;
            if in_f[j] {
                (1.0 - p[j]) * a + p[j] * price
            } else {
                a
            }
        })
        .collect();
    let deviation_gains = (0..n)
        .filter(|&j| !in_f[j])
        .map(|j| {
            let rest = price - p[j] * professed[j];
            let best = best_response(spec, &p, j, rest);
            let gain = deviation_objective(spec, &p, j, rest, best)
                - deviation_objective(spec, &p, j, rest, professed[j]);
            (j, gain)
        })
        .collect();
    Ok(PartialFaking {
        price,
        professed,
        deviation_gains,
    })
}

/// A three-agent contest in which every agent is strictly worse off under
/// the Pareto-efficient faked equilibrium than under truthful reporting.
pub fn all_worse_fixture() -> ContestSpec {
    ContestSpec::from_slices(&ALL_WORSE[0], &ALL_WORSE[1], &ALL_WORSE[2])
}

const ALL_WORSE: [[f64; 3]; 3] = [[1.5, 1.0, 2.5], [-0.7, -0.6, 0.7], [1.0, 2.0, 0.5]];
