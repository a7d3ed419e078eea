//! Agent beliefs as likelihood-ratio martingales.
//!
//! An agent's subjective measure is described by its density process
//! `Lambda_t` with respect to a common reference measure. Two families are
//! supported:
//!
//! * continuous time, where `d Lambda = Lambda * alpha_t dX` for a reference
//!   Brownian motion `X`, with either a constant drift `alpha` or the
//!   posterior-mean drift of a gaussian prior on the unknown drift;
//! * discrete time, where the agent believes increments are i.i.d.
//!   `N(mu, 1/tau)` with `tau` known and a conjugate gaussian prior on `mu`.
//!
//! Densities are carried in log space throughout; `Lambda` itself is only
//! materialized on request.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest log value whose exponential is a finite `f64`.
const MAX_LOG: f64 = 709.782712893384;

/// Continuous-time belief about the drift of the reference Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContinuousBelief {
    /// The agent is certain the driver has drift `alpha` (per unit time).
    ConstantDrift { alpha: f64 },
    /// The drift is unknown with a `N(prior_mean, 1/prior_precision)` prior,
    /// `prior_precision` measured in time units.
    BayesianGaussian {
        prior_mean: f64,
        prior_precision: f64,
    },
}

impl ContinuousBelief {
    pub fn validate(&self, field: &str) -> Result<()> {
        match *self {
            ContinuousBelief::ConstantDrift { alpha } if !alpha.is_finite() => {
                Err(Error::invalid(format!("{field}.alpha"), "must be finite"))
            }
            ContinuousBelief::BayesianGaussian {
                prior_mean,
                prior_precision,
            } => {
                if !prior_mean.is_finite() {
                    return Err(Error::invalid(
                        format!("{field}.prior_mean"),
                        "must be finite",
                    ));
                }
                if !(prior_precision > 0.0 && prior_precision.is_finite()) {
                    return Err(Error::invalid(
                        format!("{field}.prior_precision"),
                        format!("must be positive and finite, got {prior_precision}"),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Drift `alpha_t` given the cumulative driver value `x = X_t`.
    pub fn drift(&self, t: f64, x: f64) -> f64 {
        match *self {
            ContinuousBelief::ConstantDrift { alpha } => alpha,
            ContinuousBelief::BayesianGaussian {
                prior_mean,
                prior_precision,
            } => (x + prior_mean * prior_precision) / (prior_precision + t),
        }
    }

    pub fn constant_drift(&self) -> Option<f64> {
        match *self {
            ContinuousBelief::ConstantDrift { alpha } => Some(alpha),
            ContinuousBelief::BayesianGaussian { .. } => None,
        }
    }
}

/// Drift of a continuous belief at time `t` with `X_t = x`.
pub fn alpha_continuous(belief: &ContinuousBelief, t: f64, x: f64) -> f64 {
    belief.drift(t, x)
}

/// One log-Euler step of `d Lambda = Lambda alpha dX`:
/// `log Lambda += alpha dX - alpha^2 dt / 2`. Exact when `alpha` is constant.
pub fn log_lambda_step(log_lambda: f64, alpha: f64, dx: f64, dt: f64) -> f64 {
    log_lambda + alpha * dx - 0.5 * alpha * alpha * dt
}

/// Same step on the level of `Lambda`; positivity is preserved.
pub fn lambda_sde_step(lambda: f64, alpha: f64, dx: f64, dt: f64) -> f64 {
    debug_assert!(lambda > 0.0);
    lambda * (alpha * dx - 0.5 * alpha * alpha * dt).exp()
}

/// Discrete-time gaussian belief with conjugate prior `N(prior_mean, 1/(prior_size * precision))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteBelief {
    /// Prior mean of the per-step increment.
    pub prior_mean: f64,
    /// Prior effective sample size `K_0`. `f64::INFINITY` freezes the belief.
    pub prior_size: f64,
    /// Assumed precision `tau` of one increment.
    pub precision: f64,
    /// Diligent agents learn from true dividend increments, others from price increments.
    pub diligent: bool,
}

impl DiscreteBelief {
    pub fn validate(&self, field: &str) -> Result<()> {
        if !self.prior_mean.is_finite() {
            return Err(Error::invalid(
                format!("{field}.prior_mean"),
                "must be finite",
            ));
        }
        if !(self.prior_size > 0.0) {
            return Err(Error::invalid(
                format!("{field}.prior_size"),
                format!("must be positive, got {}", self.prior_size),
            ));
        }
        if !(self.precision > 0.0 && self.precision.is_finite()) {
            return Err(Error::invalid(
                format!("{field}.precision"),
                format!("must be positive and finite, got {}", self.precision),
            ));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> BeliefState {
        BeliefState {
            log_lambda: 0.0,
            mean: self.prior_mean,
            prior_size: self.prior_size,
            step: 0,
        }
    }
}

/// Posterior state after `step` observations.
///
/// `log_lambda` is the log joint density of the observations under the
/// agent's predictive law. The effective sample size is never stored; it is
/// always `prior_size + step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeliefState {
    pub log_lambda: f64,
    pub mean: f64,
    pub prior_size: f64,
    pub step: u64,
}

impl BeliefState {
    /// `K_t = K_0 + t`.
    pub fn sample_size(&self) -> f64 {
        self.prior_size + self.step as f64
    }

    /// Log-density increment `log(lambda_{t+1} / lambda_t)` if `x` is observed next.
    #[inline]
    pub fn log_increment(&self, precision: f64, x: f64) -> f64 {
        let eps = x - self.mean;
        // K_t / K_{t+1} = 1 / (1 + 1/K_t); finite even for a frozen prior.
        let inv_k = 1.0 / self.sample_size();
        let ratio = 1.0 / (1.0 + inv_k);
        0.5 * (-precision * eps * eps * ratio - inv_k.ln_1p() + (precision / (2.0 * PI)).ln())
    }

    /// Posterior mean after observing `x`.
    #[inline]
    pub fn next_mean(&self, x: f64) -> f64 {
        self.mean + (x - self.mean) / (self.sample_size() + 1.0)
    }
}

/// Conjugate update on observing the increment `x`.
pub fn update_discrete(state: &BeliefState, belief: &DiscreteBelief, x: f64) -> BeliefState {
    BeliefState {
        log_lambda: state.log_lambda + state.log_increment(belief.precision, x),
        mean: state.next_mean(x),
        prior_size: state.prior_size,
        step: state.step + 1,
    }
}

/// `log Lambda_t` against the reference law of i.i.d. `N(0, 1/tau)` increments.
///
/// Requires a finite prior size: with a frozen prior the value depends on
/// the raw observation sum, which the state does not retain.
pub fn log_likelihood_ratio(state: &BeliefState, belief: &DiscreteBelief) -> Result<f64> {
    let k0 = belief.prior_size;
    if !k0.is_finite() {
        return Err(Error::invalid(
            "prior_size",
            "likelihood ratio is undefined for a frozen (infinite) prior",
        ));
    }
    let kt = state.sample_size();
    let (m0, mt) = (belief.prior_mean, state.mean);
    // K_t m_t^2 - K_0 m_0^2, rearranged to avoid cancellation when m_t ~ m_0.
    let quad = kt * (mt - m0) * (mt + m0) + (kt - k0) * m0 * m0;
    Ok(0.5 * belief.precision * quad + 0.5 * (k0 / kt).ln())
}

/// `Lambda_t`, or a saturation error if it is not representable.
pub fn likelihood_ratio(state: &BeliefState, belief: &DiscreteBelief) -> Result<f64> {
    let log_value = log_likelihood_ratio(state, belief)?;
    if log_value > MAX_LOG {
        return Err(Error::Saturation { log_value });
    }
    Ok(log_value.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn belief(prior_mean: f64, prior_size: f64, precision: f64) -> DiscreteBelief {
        DiscreteBelief {
            prior_mean,
            prior_size,
            precision,
            diligent: false,
        }
    }

    #[test]
    fn constant_drift_ignores_state() {
        let b = ContinuousBelief::ConstantDrift { alpha: 0.21 };
        for (t, x) in [(0.0, 0.0), (3.0, -1.5), (100.0, 7.0)] {
            assert_eq!(alpha_continuous(&b, t, x), 0.21);
        }
    }

    #[test]
    fn bayesian_drift_closed_form() {
        let b = ContinuousBelief::BayesianGaussian {
            prior_mean: 0.0,
            prior_precision: 1.0,
        };
        assert_eq!(b.drift(0.0, 0.0), 0.0);
        let b = ContinuousBelief::BayesianGaussian {
            prior_mean: 0.1,
            prior_precision: 2.0,
        };
        assert!((b.drift(3.0, 0.5) - 0.14).abs() < 1e-15);
    }

    #[test]
    fn bayesian_drift_is_gaussian_posterior_mean() {
        // Observing Y_t = X_t + b t is a gaussian likelihood in b with
        // precision t and sufficient statistic X_t; combine with the prior.
        let (beta, eps, t, x) = (0.1_f64, 2.0_f64, 3.0_f64, 0.5_f64);
        let posterior_precision = eps + t;
        let posterior_mean = (beta * eps + (x / t) * t) / posterior_precision;
        let b = ContinuousBelief::BayesianGaussian {
            prior_mean: beta,
            prior_precision: eps,
        };
        assert!((b.drift(t, x) - posterior_mean).abs() < 1e-15);
    }

    #[test]
    fn invalid_prior_precision_rejected() {
        let b = ContinuousBelief::BayesianGaussian {
            prior_mean: 0.0,
            prior_precision: 0.0,
        };
        assert!(b.validate("agents[0].belief").is_err());
        assert!(belief(0.0, 0.0, 1.0).validate("b").is_err());
        assert!(belief(0.0, 1.0, -1.0).validate("b").is_err());
    }

    #[test]
    fn zero_drift_keeps_lambda_at_one() {
        let mut l = 1.0;
        for dx in [0.3, -0.1, 0.05] {
            l = lambda_sde_step(l, 0.0, dx, 0.01);
        }
        assert_eq!(l, 1.0);
    }

    #[test]
    fn constant_drift_exponential_martingale() {
        // alpha = 0.5, X_1 = 0.2: Lambda_1 = exp(0.1 - 0.125).
        let l = log_lambda_step(0.0, 0.5, 0.2, 1.0);
        assert!((l - (-0.025)).abs() < 1e-15);
    }

    #[test]
    fn update_with_zero_innovation() {
        let b = belief(0.0, 1.0, 2.5);
        let s = update_discrete(&b.initial_state(), &b, 0.0);
        assert_eq!(s.mean, 0.0);
        let expected = 0.5 * ((0.5f64).ln() + (2.5 / (2.0 * PI)).ln());
        assert!((s.log_lambda - expected).abs() < 1e-15);
        assert_eq!(s.sample_size(), 2.0);
    }

    #[test]
    fn observation_at_prior_mean_keeps_mean() {
        let b = belief(0.5, 1.0, 1.0);
        let s = update_discrete(&b.initial_state(), &b, 0.5);
        assert_eq!(s.mean, 0.5);
    }

    #[test]
    fn lambda_at_time_zero_is_one() {
        let b = belief(0.3, 4.0, 2.0);
        assert_eq!(likelihood_ratio(&b.initial_state(), &b).unwrap(), 1.0);
    }

    #[test]
    fn one_step_likelihood_ratio() {
        // mu_0 = 0, K_0 = 1: mu_1 = x/2, K_1 = 2, so Lambda_1 =
        // exp((tau/2) * 2 * (x/2)^2) * sqrt(1/2).
        let (tau, x) = (3.0, 0.7);
        let b = belief(0.0, 1.0, tau);
        let s = update_discrete(&b.initial_state(), &b, x);
        let expected = ((tau / 2.0) * 2.0 * (x / 2.0).powi(2)).exp() * 0.5f64.sqrt();
        assert!((likelihood_ratio(&s, &b).unwrap() - expected).abs() < 1e-14);
        // Cross-check: ratio of the explicit joint densities.
        let subjective = {
            // x ~ N(0, 1/tau + 1/(K_0 tau)) marginally.
            let var = 1.0 / tau + 1.0 / tau;
            (-(x * x) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
        };
        let reference = (-(tau * x * x) / 2.0).exp() * (tau / (2.0 * PI)).sqrt();
        assert!((subjective / reference - expected).abs() < 1e-14);
        assert!((s.log_lambda - subjective.ln()).abs() < 1e-14);
    }

    #[test]
    fn frozen_prior_never_moves() {
        let b = belief(0.2, f64::INFINITY, 4.0);
        let mut s = b.initial_state();
        for x in [1.0, -3.0, 0.5] {
            let next = update_discrete(&s, &b, x);
            let direct = 0.5 * (-4.0 * (x - 0.2f64).powi(2) + (4.0 / (2.0 * PI)).ln());
            assert!((next.log_lambda - s.log_lambda - direct).abs() < 1e-14);
            s = next;
        }
        assert_eq!(s.mean, 0.2);
        assert!(log_likelihood_ratio(&s, &b).is_err());
    }

    #[test]
    fn saturation_is_reported() {
        let b = belief(0.0, 1.0, 1.0);
        let mut s = b.initial_state();
        for _ in 0..40 {
            s = update_discrete(&s, &b, 50.0);
        }
        match likelihood_ratio(&s, &b) {
            Err(Error::Saturation { log_value }) => assert!(log_value > MAX_LOG),
            other => panic!("expected saturation, got {other:?}"),
        }
    }
}
