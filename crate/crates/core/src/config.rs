//! Run configuration files.
//!
//! A run config is a TOML file naming the experiment in `command` and
//! carrying the block that experiment needs:
//!
//! ```toml
//! command = "simulate-log"
//! seed = 7
//!
//! [simulate]
//! horizon = 50.0
//! paths = 200
//!
//! [simulate.market]
//! sigma = 0.517
//! alpha_star = -0.01
//!
//! [[simulate.market.agents]]
//! rho = 0.131
//! nu = 14.47
//! belief = { kind = "constant_drift", alpha = 0.21 }
//! ```
//!
//! | command        | block        |
//! |----------------|--------------|
//! | `simulate-log` | `[simulate]` |
//! | `feedback`     | `[feedback]` |
//! | `beauty`       | `[contest]`  |
//! | `fit`          | `[fit]`      |
//! | `ingest`       | `[ingest]`   |
//!
//! A top-level `seed` overrides the seeds inside the blocks. The resolved
//! config, with every default filled in, is what a run writes to its
//! manifest; feeding the manifest back reproduces the run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::beauty::ContestSpec;
use crate::calibration::CalibrationProblem;
use crate::equilibrium::{MarketSpec, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::feedback::FeedbackConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SimulateLog,
    Feedback,
    Beauty,
    Fit,
    Ingest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SimulateLog => "simulate-log",
            Command::Feedback => "feedback",
            Command::Beauty => "beauty",
            Command::Fit => "fit",
            Command::Ingest => "ingest",
        }
    }
}

fn default_horizon() -> f64 {
    50.0
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_paths() -> usize {
    1
}
fn default_write_paths() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_paths")]
    pub paths: usize,
    /// Number of leading paths written out as CSV.
    #[serde(default = "default_write_paths")]
    pub write_paths: usize,
    pub market: MarketSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeautyBlock {
    #[serde(flatten)]
    pub spec: ContestSpec,
    /// Subset of agents that fake in the partial-faking diagnostic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial_fakers: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitBlock {
    #[serde(flatten)]
    pub problem: CalibrationProblem,
    /// Price/dividend CSV to take targets from; built-in targets otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestBlock {
    pub csv: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Run paths or sweep seeds on all cores. Output does not depend on it.
    #[serde(default)]
    pub parallel: bool,
    /// Feedback only: run this many consecutive seeds starting at the config seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_seeds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<FeedbackConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contest: Option<BeautyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ingest: Option<IngestBlock>,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub parallel: bool,
    pub sweep_seeds: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config; relative input paths are resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let absolute = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if let Ok(c) = p.canonicalize() {
                *p = c;
            }
        };
        if let Some(i) = config.ingest.as_mut() {
            absolute(&mut i.csv);
        }
        if let Some(csv) = config.fit.as_mut().and_then(|f| f.targets_csv.as_mut()) {
            absolute(csv);
        }
        Ok(config)
    }

    /// Applies overrides, pushes the top-level seed into the blocks and validates.
    pub fn resolve(mut self, overrides: &Overrides) -> Result<Self> {
        if overrides.seed.is_some() {
            self.seed = overrides.seed;
        }
        self.parallel |= overrides.parallel;
        if overrides.sweep_seeds.is_some() {
            self.sweep_seeds = overrides.sweep_seeds;
        }
        let seed = self.seed;
        match self.command {
            Command::SimulateLog => {
                let block = self
                    .simulate
                    .as_mut()
                    .ok_or_else(|| missing("simulate", "simulate-log"))?;
                if let Some(p) = overrides.paths {
                    block.paths = p;
                }
                if block.paths == 0 {
                    return Err(Error::invalid("simulate.paths", "must be at least 1"));
                }
                crate::equilibrium::Grid::new(block.horizon, block.dt)?;
                block.market.resolve()?;
                self.seed = Some(seed.unwrap_or(0));
            }
            Command::Feedback => {
                let block = self
                    .feedback
                    .as_mut()
                    .ok_or_else(|| missing("feedback", "feedback"))?;
                if let Some(s) = seed {
                    block.seed = s;
                }
                self.seed = Some(block.seed);
                block.validate()?;
                if self.sweep_seeds == Some(0) {
                    return Err(Error::invalid("sweep_seeds", "must be at least 1"));
                }
            }
            Command::Beauty => {
                let block = self
                    .contest
                    .as_ref()
                    .ok_or_else(|| missing("contest", "beauty"))?;
                block.spec.validate()?;
            }
            Command::Fit => {
                let block = self.fit.as_mut().ok_or_else(|| missing("fit", "fit"))?;
                if let Some(s) = seed {
                    block.problem.seed = s;
                }
                if let Some(p) = overrides.paths {
                    block.problem.paths = p;
                }
                block.problem.parallel |= self.parallel;
                self.seed = Some(block.problem.seed);
                block.problem.validate()?;
            }
            Command::Ingest => {
                self.ingest
                    .as_ref()
                    .ok_or_else(|| missing("ingest", "ingest"))?;
            }
        }
        Ok(self)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

fn missing(block: &str, command: &str) -> Error {
    Error::Config(format!("command `{command}` needs a [{block}] block"))
}
