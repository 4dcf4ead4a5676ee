//! Suite configuration files.
//!
//! A config file supplies defaults for the global CLI options (seed, output
//! directory, significance level, replica budget) plus an optional list of
//! model selections and stream allocations. Everything is validated before
//! any sampling: model selections run through the library's admissibility
//! predicates so violations are reported with the constraint spelled out,
//! and stream allocations must use distinct domain tags.
//!
//! Schema (all keys optional unless noted):
//!
//! ```json
//! {
//!   "seed": 7,
//!   "out_dir": "runs/exp1",
//!   "level": 0.01,
//!   "replicas": 10000,
//!   "models": [
//!     {"model": "sj", "rho": 0.4, "p": 0.3},
//!     {"model": "geometric", "rho": 1.0, "mean": 2.0}
//!   ],
//!   "streams": [
//!     {"name": "boundary", "domain": 1},
//!     {"name": "environment", "domain": 2}
//!   ]
//! }
//! ```
//!
//! Unknown keys are rejected with the offending key named in the error.

use lppkit::{Error, Result};
use lppkit::scaling::{params_for, ModelKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

/// One model/parameter selection to be validated for admissibility.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSelection {
    pub model: String,
    pub rho: f64,
    /// Bernoulli site probability (SJ only).
    #[serde(default)]
    pub p: Option<f64>,
    /// Geometric weight mean (geometric lattice only).
    #[serde(default)]
    pub mean: Option<f64>,
}

impl ModelSelection {
    /// Resolve to a [`ModelKind`], enforcing that model-specific parameters
    /// are present exactly when the model needs them.
    pub fn kind(&self) -> Result<ModelKind> {
        parse_model_kind(&self.model, self.p, self.mean)
    }
}

/// A named stream-domain allocation; domains must be pairwise distinct so
/// components never share randomness.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamAlloc {
    pub name: String,
    pub domain: u32,
}

/// Validated suite configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out_dir: Option<String>,
    /// Significance level for statistical sub-tests.
    #[serde(default)]
    pub level: Option<f64>,
    /// Default replica budget for Monte Carlo verifiers.
    #[serde(default)]
    pub replicas: Option<u32>,
    #[serde(default)]
    pub models: Vec<ModelSelection>,
    #[serde(default)]
    pub streams: Vec<StreamAlloc>,
}

/// Parse a model name plus its auxiliary parameters into a [`ModelKind`].
pub fn parse_model_kind(name: &str, p: Option<f64>, mean: Option<f64>) -> Result<ModelKind> {
    let kind = match name {
        "hammersley" => ModelKind::Hammersley,
        "poisson_lines" | "lines" => ModelKind::PoissonLines,
        "sj" => ModelKind::Sj {
            p: p.ok_or_else(|| Error::Config("model \"sj\" requires key \"p\"".into()))?,
        },
        "exponential" => ModelKind::Exponential,
        "geometric" => ModelKind::Geometric {
            mean: mean
                .ok_or_else(|| Error::Config("model \"geometric\" requires key \"mean\"".into()))?,
        },
        "blpp" => ModelKind::Blpp,
        other => {
            return Err(Error::Config(format!(
                "unknown model {other:?}; expected one of hammersley, poisson_lines, sj, \
                 exponential, geometric, blpp"
            )))
        }
    };
    Ok(kind)
}

/// Load and validate a config file.
///
/// Validation order: JSON schema (unknown keys are named), then per-model
/// admissibility via [`params_for`] (constraint violations keep the
/// library's constraint-naming messages), then stream-allocation
/// distinctness.
pub fn load_config(path: &Path) -> Result<SuiteConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: SuiteConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    validate(&cfg)?;
    Ok(cfg)
}

/// Validate an in-memory config (exposed separately for tests).
pub fn validate(cfg: &SuiteConfig) -> Result<()> {
    if let Some(level) = cfg.level {
        if !(0.0 < level && level < 1.0) {
            return Err(Error::Config(format!("level must lie in (0,1), got {level}")));
        }
    }
    for sel in &cfg.models {
        let kind = sel.kind()?;
        // params_for is the admissibility predicate; its errors name the
        // violated constraint (e.g. "need rho > p/(1-p)").
        params_for(kind, sel.rho)?;
    }
    let mut seen = BTreeSet::new();
    for s in &cfg.streams {
        if !seen.insert(s.domain) {
            return Err(Error::Config(format!(
                "duplicate stream ids: domain {} allocated more than once",
                s.domain
            )));
        }
    }
    Ok(())
}
