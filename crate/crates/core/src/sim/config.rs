use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Inclusive integer range `[lo, hi]`, written `[lo, hi]` in config files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(from = "[u64; 2]")]
pub struct IntRange {
    pub lo: u64,
    pub hi: u64,
}

impl From<[u64; 2]> for IntRange {
    fn from([lo, hi]: [u64; 2]) -> Self {
        IntRange { lo, hi }
    }
}

impl IntRange {
    pub fn new(lo: u64, hi: u64) -> Self {
        IntRange { lo, hi }
    }
}

/// How jobs are generated and when they arrive.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalConfig {
    #[serde(rename = "machines")]
    pub machine_count: usize,
    #[serde(rename = "jobs")]
    pub job_count: usize,
    /// Mean of the exponential interarrival distribution.
    pub interarrival_mean: f64,
    pub ops_per_job: IntRange,
    pub alternatives_per_op: IntRange,
    pub proc_time: IntRange,
    #[serde(default)]
    pub seed: u64,
}

impl ArrivalConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: ArrivalConfig =
            toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.machine_count == 0 {
            return bad("machines must be at least 1".into());
        }
        if self.job_count == 0 {
            return bad("jobs must be at least 1".into());
        }
        if !(self.interarrival_mean.is_finite() && self.interarrival_mean > 0.0) {
            return bad("interarrival_mean must be a positive number".into());
        }
        for (name, r) in [
            ("ops_per_job", self.ops_per_job),
            ("alternatives_per_op", self.alternatives_per_op),
            ("proc_time", self.proc_time),
        ] {
            if r.lo > r.hi {
                return bad(format!("{name} range [{}, {}] is empty", r.lo, r.hi));
            }
        }
        if self.ops_per_job.lo < 1 {
            return bad("ops_per_job must start at 1 or more".into());
        }
        if self.alternatives_per_op.lo < 1 || self.alternatives_per_op.hi > self.machine_count as u64 {
            return bad(format!(
                "alternatives_per_op must lie within [1, {}]",
                self.machine_count
            ));
        }
        if self.proc_time.lo < 1 {
            return bad("proc_time must start at 1 or more (p_lo >= 1)".into());
        }
        if self.proc_time.hi > u64::from(u32::MAX) || self.ops_per_job.hi > 1 << 16 {
            return bad("proc_time or ops_per_job upper bound is too large".into());
        }
        Ok(())
    }
}
