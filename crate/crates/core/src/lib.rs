//! Asset pricing with heterogeneous beliefs.
//!
//! * [`beliefs`]: continuous and discrete Gaussian beliefs and their
//!   likelihood-ratio densities.
//! * [`equilibrium`]: closed-form continuous-time equilibrium with log agents.
//! * [`feedback`]: discrete-time economy where agents learn from prices.
//! * [`beauty`]: one-period CARA contest where agents may misreport.
//! * [`calibration`]: moment estimators, data ingest and parameter fitting.
//! * [`cli`]: config-driven runs behind the `divbel` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beauty;
pub mod beliefs;
pub mod calibration;
pub mod cli;
pub mod config;
pub mod equilibrium;
pub mod error;
pub mod feedback;
pub mod math;
pub mod optimize;
pub mod rng;

pub use error::{Error, Result};
