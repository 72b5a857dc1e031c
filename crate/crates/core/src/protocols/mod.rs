//! One runner per experiment. Each returns an [`ExperimentReport`] holding
//! closed-form predictions next to exact simulation and sampled frequencies.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QwaveError, Result};
use crate::fock::{ModeKind, ModeRegister, StateVector};
use crate::measurement::JointDistribution;
use crate::operators::{creation, OperatorMatrix};
use crate::C64;

pub mod aux_phase;
pub mod bell;
pub mod coherent;
pub mod collective;
pub mod gauge;
pub mod nogo;
pub mod photon_swap;
pub mod rabi;
pub mod report;

pub use aux_phase::{aux_particle_phase, aux_particle_phase_ordered, ModeOrdering};
pub use bell::{bell_chain, bell_chain_with, max_satisfiable, LhvStrategy};
pub use coherent::{coherent_factorization, coherent_factorization_with_bound};
pub use collective::{collective_chain, collective_chain_ordered};
pub use gauge::ab_gauge_check;
pub use nogo::fermion_nogo;
pub use photon_swap::photon_swap_experiment;
pub use rabi::{rabi_rotation, rabi_time_grid};
pub use report::{canonical_phase, EmpiricalValue, ExperimentReport, ParamValue};

/// Evolution time that completes a unit-strength swap in the one-excitation
/// sector.
pub const SWAP_TIME: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    pub fn kind(self) -> ModeKind {
        match self {
            Statistics::Boson => ModeKind::Boson,
            Statistics::Fermion => ModeKind::Fermion,
        }
    }

    /// Sign picked up when two particles are exchanged.
    pub fn exchange_sign(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistics {
    type Err = QwaveError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "boson" | "bosons" => Ok(Statistics::Boson),
            "fermion" | "fermions" => Ok(Statistics::Fermion),
            _ => Err(QwaveError::InvalidParameter {
                name: "statistics",
                reason: format!("expected boson or fermion, got `{s}`"),
            }),
        }
    }
}

/// `Σ cᵢ a†(modeᵢ)`.
pub(crate) fn creation_combination(register: &Arc<ModeRegister>, terms: &[(&str, C64)]) -> Result<OperatorMatrix> {
    let mut acc = OperatorMatrix::zeros(register);
    for (mode, c) in terms {
        acc = &acc + &creation(register, mode)?.scale(*c);
    }
    Ok(acc)
}

/// `O₁ O₂ ⋯ |0⟩`, normalized.
pub(crate) fn create_from_vacuum(register: &Arc<ModeRegister>, ops: &[&OperatorMatrix]) -> Result<StateVector> {
    let mut v = StateVector::vacuum(register.clone()).into_amplitudes();
    for op in ops.iter().rev() {
        v = op.apply_raw(&v);
    }
    StateVector::from_unnormalized(register.clone(), v)
}

/// `(a† + e^{iφ} b†)/√2`.
pub(crate) fn split_creation(register: &Arc<ModeRegister>, a: &str, b: &str, phi: f64) -> Result<OperatorMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    creation_combination(register, &[(a, C64::from(h)), (b, C64::from_polar(h, phi))])
}

/// Key of a joint outcome, e.g. `prob(+,-)`.
pub(crate) fn outcome_key(prefix: &str, outcome: &[&str]) -> String {
    format!("{prefix}({})", outcome.join(","))
}

/// Adds sampled frequencies of every joint outcome under `prefix`.
pub(crate) fn record_frequencies(report: &mut ExperimentReport, prefix: &str, joint: &JointDistribution, counts: &[usize]) {
    let total: usize = counts.iter().sum();
    for (i, &c) in counts.iter().enumerate() {
        let key = outcome_key(prefix, &joint.outcome(i));
        report.empirical(&key, c as f64 / total.max(1) as f64, total as u64);
    }
}

/// Relative phase `arg(z_b / z_a)` in `[0, 2π)`.
pub(crate) fn relative_phase(z_a: C64, z_b: C64) -> f64 {
    canonical_phase((z_b / z_a).arg())
}
