use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

/// Input parameter recorded in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Count(u64),
    Real(f64),
    Reals(Vec<f64>),
    Text(String),
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Real(v)
    }
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Count(v)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Count(v as u64)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<Vec<f64>> for ParamValue {
    fn from(v: Vec<f64>) -> Self {
        ParamValue::Reals(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalValue {
    pub value: f64,
    pub count: u64,
}

/// Predicted values, sampled values and their differences for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: BTreeMap<String, ParamValue>,
    pub seed: u64,
    pub shots: u64,
    pub analytic: BTreeMap<String, f64>,
    pub empirical: BTreeMap<String, EmpiricalValue>,
    pub discrepancies: BTreeMap<String, f64>,
    pub pass: bool,
    /// Analytic entries that have no sampled counterpart.
    #[serde(skip)]
    pub exact_only: BTreeSet<String>,
    /// Failed internal checks, for diagnostics.
    #[serde(skip)]
    pub failures: Vec<String>,
}

/// Representative of `phi` in `[0, 2π)`.
pub fn canonical_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // values a rounding error below 2π are 0
    if r >= TAU - 1e-12 {
        0.0
    } else {
        r
    }
}

/// Five-sigma binomial tolerance for a frequency estimated from `count`
/// trials of an event with probability `p`.
pub fn five_sigma(p: f64, count: u64) -> f64 {
    if count == 0 {
        return f64::INFINITY;
    }
    let p = p.clamp(0.0, 1.0);
    (5.0 * (p * (1.0 - p) / count as f64).sqrt()).max(1e-12)
}

impl ExperimentReport {
    pub fn new(experiment: &str, seed: u64, shots: u64) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            params: BTreeMap::new(),
            seed,
            shots,
            analytic: BTreeMap::new(),
            empirical: BTreeMap::new(),
            discrepancies: BTreeMap::new(),
            pass: false,
            exact_only: BTreeSet::new(),
            failures: Vec::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl Into<ParamValue>) {
        self.params.insert(name.to_string(), value.into());
    }

    /// Phase parameter, stored in `[0, 2π)`.
    pub fn phase_param(&mut self, name: &str, phi: f64) {
        self.param(name, canonical_phase(phi));
    }

    /// Predicted probability that sampling will estimate.
    pub fn analytic(&mut self, name: &str, value: f64) {
        self.analytic.insert(name.to_string(), value);
    }

    /// Predicted or computed value with no sampled counterpart.
    pub fn exact(&mut self, name: &str, value: f64) {
        self.analytic.insert(name.to_string(), value);
        self.exact_only.insert(name.to_string());
    }

    /// Records a sampled frequency and compares it with the analytic entry of
    /// the same name at five sigma. Ignored when `count` is zero.
    pub fn empirical(&mut self, name: &str, value: f64, count: u64) {
        if count == 0 {
            return;
        }
        self.empirical.insert(name.to_string(), EmpiricalValue { value, count });
        match self.analytic.get(name) {
            Some(&p) => {
                let d = (p - value).abs();
                self.discrepancies.insert(name.to_string(), d);
                if d > five_sigma(p, count) {
                    self.failures.push(format!("{name}: empirical {value} vs analytic {p} over {count} trials"));
                }
            }
            None => self.failures.push(format!("{name}: no analytic prediction")),
        }
    }

    /// Records an internal consistency check.
    pub fn check(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failures.push(name.to_string());
        }
    }

    /// Checks `|value − target| ≤ tol` and records the outcome.
    pub fn check_close(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        // NaN fails too
        let close = (value - target).abs() <= tol;
        if !close {
            self.failures.push(format!("{name}: {value} vs {target} (tol {tol:e})"));
        }
    }

    /// Sets `pass`: every check held and every sampled analytic entry has an
    /// empirical value whenever shots were taken.
    pub fn finish(mut self) -> Self {
        if self.shots > 0 {
            let missing: Vec<String> = self
                .analytic
                .keys()
                .filter(|k| !self.exact_only.contains(*k) && !self.empirical.contains_key(*k))
                .cloned()
                .collect();
            for k in missing {
                self.failures.push(format!("{k}: no empirical value"));
            }
        }
        self.pass = self.failures.is_empty();
        if !self.pass {
            log::warn!("{}: {}", self.experiment, self.failures.join("; "));
        }
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.analytic.get(name).copied()
    }
}
