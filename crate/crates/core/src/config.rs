//! Case-study configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ephem::{BodyCatalog, EphemError};
use crate::planner::SearchConfig;
use crate::problem::{Problem, ProblemError, ProblemSpec};

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Ephem(#[from] EphemError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("{0}")]
    Invalid(String),
}

impl ConfigError {
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            ConfigError::Io { .. } | ConfigError::Ephem(EphemError::Io { .. })
        )
    }
}

/// Repetition campaign settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsConfig {
    pub reps: usize,
    /// A run succeeds when its best f_obj is below this value.
    pub success_threshold: f64,
}

/// Launch epochs to scan, days MJD2000.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScanConfig {
    Dates { dates: Vec<f64> },
    Range { start: f64, end: f64, step: f64 },
}

impl ScanConfig {
    pub fn dates(&self) -> Result<Vec<f64>, ConfigError> {
        match self {
            ScanConfig::Dates { dates } => Ok(dates.clone()),
            ScanConfig::Range { start, end, step } => {
                if !(*step > 0.0) || end < start {
                    return Err(ConfigError::Invalid(
                        "scan needs step > 0 and end >= start".into(),
                    ));
                }
                let n = ((end - start) / step + 1e-9).floor() as usize;
                Ok((0..=n).map(|k| start + k as f64 * step).collect())
            }
        }
    }
}

/// A reference plan shipped with a case study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenPlan {
    pub solution: Vec<u32>,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub name: String,
    /// Catalog file, relative to the config file.
    pub catalog: PathBuf,
    pub problem: ProblemSpec,
    pub search: SearchConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<StatsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub golden: Option<GoldenPlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// A config with its catalog loaded.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub config: RunConfig,
    pub catalog: BodyCatalog,
}

impl LoadedConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref().to_path_buf();
        let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
            path: path.clone(),
            source,
        })?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.clone(),
            source,
        })?;
        config.search.validate().map_err(ConfigError::Invalid)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let catalog = BodyCatalog::load(base.join(&config.catalog))?;
        Ok(Self {
            path,
            config,
            catalog,
        })
    }

    pub fn problem(&self) -> Result<Problem, ConfigError> {
        Ok(Problem::new(self.config.problem.clone(), self.catalog.clone())?)
    }

    /// The problem with a different departure epoch.
    pub fn problem_at(&self, t0: f64) -> Result<Problem, ConfigError> {
        let mut spec = self.config.problem.clone();
        spec.t0 = t0;
        Ok(Problem::new(spec, self.catalog.clone())?)
    }

    pub fn enumeration_cap(&self) -> u64 {
        self.config.enumeration_cap.unwrap_or(DEFAULT_ENUMERATION_CAP)
    }
}
