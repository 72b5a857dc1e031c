//! Potential step at B acting on every charge there leaves the statistics
//! unchanged; acting on the test particle alone shifts its phase.

use crate::error::Result;
use crate::exec::Exec;
use crate::fock::StateVector;
use crate::measurement::{sample_indices, tally, JointDistribution};
use crate::operators::phase_kick;
use crate::protocols::aux_phase::{aux_register, aux_state, site_statistics, ModeOrdering, AUX_B, TEST_B};
use crate::protocols::report::ExperimentReport;
use crate::protocols::{outcome_key, record_frequencies, Statistics};
use crate::rng::derive_seed;

/// Site statistics of the test/auxiliary state with `kick` applied to the
/// listed modes.
pub fn kicked_statistics(phi: f64, kick: f64, modes: &[&str]) -> Result<JointDistribution> {
    let r = aux_register(Statistics::Boson, ModeOrdering::Grouped)?;
    let mut state: StateVector = aux_state(&r, phi)?;
    for m in modes {
        state = phase_kick(&r, m, kick)?.apply(&state)?;
    }
    site_statistics(&state)
}

pub fn ab_gauge_check(phi: f64, kick: f64, shots: u64, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("gauge-check", seed, shots);
    report.phase_param("phi", phi);
    report.phase_param("kick", kick);

    let baseline = kicked_statistics(phi, 0.0, &[])?;
    let both = kicked_statistics(phi, kick, &[TEST_B, AUX_B])?;
    let test_only = kicked_statistics(phi, kick, &[TEST_B])?;
    let shifted = kicked_statistics(phi + kick, 0.0, &[])?;

    let invariance = baseline.tv_distance(&both);
    report.exact("tv.baseline_vs_both", invariance);
    report.check("tv.baseline_vs_both", invariance < 1e-10);
    let shift = baseline.tv_distance(&test_only);
    report.exact("tv.baseline_vs_test_only", shift);
    let composed = test_only.tv_distance(&shifted);
    report.exact("tv.test_only_vs_shifted_phase", composed);
    report.check("tv.test_only_vs_shifted_phase", composed < 1e-10);

    for i in 0..baseline.len() {
        let o = baseline.outcome(i);
        report.analytic(&outcome_key("both.prob", &o), baseline.probs[i]);
        report.analytic(&outcome_key("test_only.prob", &o), shifted.probs[i]);
    }
    if shots > 0 {
        let exec = Exec::default();
        let both_counts = tally(&sample_indices(&both, shots as usize, derive_seed(seed, 0), exec), both.len());
        record_frequencies(&mut report, "both.prob", &both, &both_counts);
        let test_counts = tally(&sample_indices(&test_only, shots as usize, derive_seed(seed, 1), exec), test_only.len());
        record_frequencies(&mut report, "test_only.prob", &test_only, &test_counts);
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_kick_is_identical() {
        let a = kicked_statistics(0.3, 0.0, &[TEST_B, AUX_B]).unwrap();
        let b = kicked_statistics(0.3, 0.0, &[]).unwrap();
        assert_eq!(a.probs, b.probs);
    }

    #[test]
    fn kick_on_test_particle_moves_the_phase() {
        let r = ab_gauge_check(0.2, FRAC_PI_2, 3000, 8).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert!(r.get("tv.baseline_vs_both").unwrap() < 1e-12);
        assert!(r.get("tv.baseline_vs_test_only").unwrap() > 0.1);
        assert_abs_diff_eq!(r.get("tv.test_only_vs_shifted_phase").unwrap(), 0.0, epsilon = 1e-12);
    }
}
