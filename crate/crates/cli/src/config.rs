//! Run configuration and parameter resolution against the catalog.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use qwave_core::protocols::Statistics;

use crate::catalog::{lookup, names, ExperimentInfo, ParamKind};
use crate::error::{config_error, CliError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub shots: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

/// Parameters with defaults filled in and types checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub info: ExperimentInfo,
    reals: BTreeMap<String, f64>,
    counts: BTreeMap<String, u64>,
    statistics: Option<Statistics>,
}

impl Resolved {
    pub fn real(&self, name: &str) -> f64 {
        self.reals[name]
    }

    pub fn count(&self, name: &str) -> u64 {
        self.counts[name]
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics.unwrap_or(Statistics::Boson)
    }
}

impl RunConfig {
    /// Config with every schema default written out.
    pub fn with_defaults(info: &ExperimentInfo, shots: u64, seed: u64) -> Self {
        RunConfig {
            experiment: info.name.clone(),
            params: info.params.iter().map(|p| (p.name.clone(), p.default.clone())).collect(),
            shots,
            seed,
            output_path: None,
            format: Format::Json,
        }
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let info = lookup(&self.experiment).ok_or_else(|| {
            config_error(format!(
                "unknown experiment `{}` (expected one of: {})",
                self.experiment,
                names().join(", ")
            ))
        })?;
        for name in self.params.keys() {
            if info.param(name).is_none() {
                let allowed: Vec<&str> = info.params.iter().map(|p| p.name.as_str()).collect();
                return Err(config_error(format!(
                    "parameter `{name}` is not accepted by `{}` (accepted: [{}])",
                    info.name,
                    allowed.join(", ")
                )));
            }
        }
        let mut resolved = Resolved {
            info: info.clone(),
            reals: BTreeMap::new(),
            counts: BTreeMap::new(),
            statistics: None,
        };
        for schema in &info.params {
            let value = self.params.get(&schema.name).unwrap_or(&schema.default);
            let bad = || config_error(format!("parameter `{}` has invalid value {value}", schema.name));
            match schema.kind {
                ParamKind::Real => {
                    let v = value.as_f64().filter(|v| v.is_finite()).ok_or_else(bad)?;
                    resolved.reals.insert(schema.name.clone(), v);
                }
                ParamKind::Count => {
                    let v = value.as_u64().ok_or_else(bad)?;
                    resolved.counts.insert(schema.name.clone(), v);
                }
                ParamKind::Statistics => {
                    let s = value.as_str().ok_or_else(bad)?;
                    resolved.statistics = Some(s.parse().map_err(|_| bad())?);
                }
            }
        }
        Ok(resolved)
    }
}
