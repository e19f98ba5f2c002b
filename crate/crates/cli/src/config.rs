//! Experiment configuration (TOML).

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use symdyn::rational;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// SFT file, relative to the config file.
    pub sft: PathBuf,
    /// Cylinder depth `L` of the weak* metric.
    pub depth: usize,
    /// Largest period of the candidate net orbits.
    pub period_cap: usize,
    pub epsilon: String,
    /// `delta = 2^{-k0}` for the built point.
    pub k0: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<usize>,
    pub rounds: usize,
    pub scan_depth: usize,
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_shadow_samples")]
    pub shadow_samples: usize,
    pub output_dir: PathBuf,
    /// Cylinder holding the base point.
    pub base_word: String,
    #[serde(default = "default_true")]
    pub prune_net: bool,
    /// Growth factors replacing `2^n`; leaves the proven regime.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub growth: Vec<String>,
    pub hyperbolicity: HyperbolicityConfig,
    pub balls: BallConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cocycle: Vec<CocycleConfig>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperbolicityConfig {
    pub eta: String,
    #[serde(default = "default_onset")]
    pub onset: usize,
    #[serde(default = "default_n_check")]
    pub n_check: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallConfig {
    pub base_radius: String,
    pub shrink: String,
    pub rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleConfig {
    pub name: String,
    pub u: Vec<String>,
    pub v: Vec<String>,
    #[serde(default = "default_block")]
    pub block: usize,
}

fn default_samples() -> usize {
    64
}

fn default_shadow_samples() -> usize {
    100
}

fn default_true() -> bool {
    true
}

fn default_onset() -> usize {
    1
}

fn default_n_check() -> usize {
    25
}

fn default_block() -> usize {
    1
}

/// Numeric fields of a config after parsing and range checks.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub epsilon: BigRational,
    pub eta: BigRational,
    pub base_radius: BigRational,
    pub shrink: BigRational,
    pub growth: Option<Vec<num_bigint::BigInt>>,
}

fn rat(field: &str, s: &str) -> Result<BigRational, CliError> {
    rational::parse(s).ok_or_else(|| CliError::Config(format!("{field}: not a rational number: {s:?}")))
}

fn positive(field: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        return Err(CliError::Config(format!("{field} must be at least 1")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        positive("depth", self.depth)?;
        positive("period_cap", self.period_cap)?;
        positive("k0", self.k0)?;
        positive("rounds", self.rounds)?;
        positive("scan_depth", self.scan_depth)?;
        positive("balls.rounds", self.balls.rounds)?;
        positive("hyperbolicity.n_check", self.hyperbolicity.n_check)?;
        if self.stages == Some(0) {
            return Err(CliError::Config("stages must be at least 1".into()));
        }
        if self.base_word.is_empty() {
            return Err(CliError::Config("base_word must be nonempty".into()));
        }
        let epsilon = rat("epsilon", &self.epsilon)?;
        let eta = rat("hyperbolicity.eta", &self.hyperbolicity.eta)?;
        let base_radius = rat("balls.base_radius", &self.balls.base_radius)?;
        let shrink = rat("balls.shrink", &self.balls.shrink)?;
        for (name, v) in [("epsilon", &epsilon), ("hyperbolicity.eta", &eta), ("balls.base_radius", &base_radius)] {
            if !v.is_positive() {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        if !shrink.is_positive() || shrink >= BigRational::from_integer(1.into()) {
            return Err(CliError::Config("balls.shrink must lie strictly between 0 and 1".into()));
        }
        let growth = if self.growth.is_empty() {
            None
        } else {
            let g = self
                .growth
                .iter()
                .map(|s| {
                    s.parse::<num_bigint::BigInt>()
                        .ok()
                        .filter(|g| g.is_positive())
                        .ok_or_else(|| CliError::Config(format!("growth: not a positive integer: {s:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(g)
        };
        for (i, c) in self.cocycle.iter().enumerate() {
            let valid = !c.name.is_empty() && c.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '-' || ch == '_');
            if !valid {
                return Err(CliError::Config(format!("cocycle name {:?} must be nonempty ASCII letters, digits, - or _", c.name)));
            }
            if self.cocycle[..i].iter().any(|d| d.name == c.name) {
                return Err(CliError::Config(format!("duplicate cocycle name {:?}", c.name)));
            }
            positive(&format!("cocycle {}: block", c.name), c.block)?;
            for s in c.u.iter().chain(&c.v) {
                rat(&format!("cocycle {}", c.name), s)?;
            }
        }
        Ok(Resolved { epsilon, eta, base_radius, shrink, growth })
    }
}
