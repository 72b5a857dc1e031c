//! Dispatch from a resolved config to the protocol runners.

use std::fs;
use std::path::Path;

use serde::Serialize;

use qwave_core::protocols::{
    ab_gauge_check, aux_particle_phase, bell_chain, coherent_factorization, collective_chain, fermion_nogo,
    photon_swap_experiment, rabi_rotation, rabi_time_grid,
};
use qwave_core::{ExperimentReport, C64};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{report_csv, report_json, to_json};

pub fn execute(config: &RunConfig) -> Result<ExperimentReport, CliError> {
    let p = config.resolve()?;
    let (shots, seed) = (config.shots, config.seed);
    log::info!("running {} (shots {shots}, seed {seed})", config.experiment);
    let alpha = || C64::from_polar(p.real("alpha"), p.real("alpha_phase"));
    let report = match p.info.name.as_str() {
        "photon-swap" => photon_swap_experiment(p.real("phi"), shots, seed)?,
        "rabi" => {
            let a = alpha();
            rabi_rotation(a, p.count("cutoff") as usize, &rabi_time_grid(a, p.count("points") as usize))?
        }
        "bell-chain" => bell_chain(p.count("n") as usize, shots, seed)?,
        "aux-phase" => aux_particle_phase(p.real("phi"), p.statistics(), shots, seed)?,
        "fermion-nogo" => fermion_nogo(shots, seed)?,
        "coherent-factorization" => coherent_factorization(alpha(), p.count("cutoff") as usize)?,
        "collective-chain" => collective_chain(p.real("phi"), shots, seed)?,
        "gauge-check" => ab_gauge_check(p.real("phi"), p.real("kick"), shots, seed)?,
        other => unreachable!("catalog entry `{other}` has no runner"),
    };
    if !report.pass {
        log::warn!("{}: report did not pass", report.experiment);
    }
    Ok(report)
}

pub fn render(report: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Json => report_json(report),
        Format::Csv => report_csv(report),
    }
}

pub fn write_output(path: &str, text: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_string(),
        source,
    };
    if let Some(dir) = Path::new(path).parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, text).map_err(io)
}

/// Runs one config and writes its report to `output_path` or returns the
/// rendered text for stdout.
pub fn run(config: &RunConfig) -> Result<Option<String>, CliError> {
    let report = execute(config)?;
    let text = render(&report, config.format);
    match &config.output_path {
        Some(path) => write_output(path, &text).map(|_| None),
        None => Ok(Some(text)),
    }
}

#[derive(Debug, Serialize)]
pub struct BatchEntry {
    pub index: usize,
    pub experiment: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ExperimentReport>,
}

fn batch_one(index: usize, config: &RunConfig) -> BatchEntry {
    let mut entry = BatchEntry {
        index,
        experiment: config.experiment.clone(),
        exit_code: 0,
        output_path: config.output_path.clone(),
        pass: None,
        error: None,
        report: None,
    };
    let outcome = execute(config).and_then(|report| {
        if let Some(path) = &config.output_path {
            write_output(path, &render(&report, config.format))?;
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            entry.pass = Some(report.pass);
            if config.output_path.is_none() {
                entry.report = Some(report);
            }
        }
        Err(e) => {
            entry.exit_code = e.exit_code();
            entry.error = Some(e.to_string());
        }
    }
    entry
}

/// Runs every config, `jobs` at a time, and returns the summary in input
/// order.
pub fn run_batch(configs: &[RunConfig], jobs: usize) -> Vec<BatchEntry> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if jobs > 1 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                return pool.install(|| configs.par_iter().enumerate().map(|(i, c)| batch_one(i, c)).collect());
            }
        }
    }
    let _ = jobs;
    configs.iter().enumerate().map(|(i, c)| batch_one(i, c)).collect()
}

pub fn batch_summary(entries: &[BatchEntry]) -> String {
    to_json(&entries)
}

/// First nonzero exit code in the batch.
pub fn batch_exit_code(entries: &[BatchEntry]) -> i32 {
    entries.iter().map(|e| e.exit_code).find(|&c| c != 0).unwrap_or(0)
}
