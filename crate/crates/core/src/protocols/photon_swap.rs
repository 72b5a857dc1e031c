//! Single photon shared between two regions, transferred onto two spins and
//! read out in the x basis.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use crate::error::Result;
use crate::exec::Exec;
use crate::fock::{build_register, prepare_superposition, ModeRegister, ModeSpec, Site, StateVector};
use crate::measurement::{joint_distribution, sample_indices, spin_direction_measurement, tally};
use crate::operators::{swap_coupler, Propagator};
use crate::protocols::report::ExperimentReport;
use crate::protocols::{outcome_key, record_frequencies, relative_phase, SWAP_TIME};
use crate::C64;

pub const PHOTON_A: &str = "photon_A";
pub const PHOTON_B: &str = "photon_B";
pub const SPIN_A: &str = "spin_A";
pub const SPIN_B: &str = "spin_B";

pub fn swap_register() -> Result<Arc<ModeRegister>> {
    build_register(vec![
        ModeSpec::boson(PHOTON_A, 1, Site::A),
        ModeSpec::boson(PHOTON_B, 1, Site::B),
        ModeSpec::two_level(SPIN_A, Site::A),
        ModeSpec::two_level(SPIN_B, Site::B),
    ])
}

/// Photon superposition evolved through both local swaps, with the target
/// spin superposition.
pub fn swapped_state(phi: f64) -> Result<(StateVector, StateVector)> {
    let r = swap_register()?;
    let h = &swap_coupler(&r, PHOTON_A, SPIN_A, 1.0)? + &swap_coupler(&r, PHOTON_B, SPIN_B, 1.0)?;
    let initial = prepare_superposition(&r, PHOTON_A, PHOTON_B, phi)?;
    let out = Propagator::new(&h)?.evolve(&initial, SWAP_TIME)?;
    let target = prepare_superposition(&r, SPIN_A, SPIN_B, phi)?;
    Ok((out, target))
}

/// Per-outcome probability of an x-basis coincidence `(s, s)` or
/// anti-coincidence `(s, −s)`; the two coincident outcomes together carry
/// `¼|1 + e^{iφ}|²`.
pub fn x_outcome_probability(phi: f64, same: bool) -> f64 {
    let sign = if same { 1.0 } else { -1.0 };
    (C64::from(1.0) + C64::from_polar(sign, phi)).norm_sqr() / 8.0
}

pub fn photon_swap_experiment(phi: f64, shots: u64, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("photon-swap", seed, shots);
    report.phase_param("phi", phi);

    let (out, target) = swapped_state(phi)?;
    let fidelity = out.fidelity(&target)?;
    report.exact("fidelity", fidelity);
    report.check_close("fidelity", fidelity, 1.0, 1e-9);
    let r = out.register().clone();
    let up_a = out.amplitude(&[0, 0, 1, 0].into())?;
    let up_b = out.amplitude(&[0, 0, 0, 1].into())?;
    let phase = relative_phase(up_a, up_b);
    report.exact("relative_phase", phase);
    let wrapped = (phase - super::canonical_phase(phi)).abs();
    report.check("relative_phase", wrapped.min(std::f64::consts::TAU - wrapped) < 1e-9);

    let xa = spin_direction_measurement(&r, SPIN_A, FRAC_PI_2)?.named("A");
    let xb = spin_direction_measurement(&r, SPIN_B, FRAC_PI_2)?.named("B");
    let joint = joint_distribution(&out, &[&xa, &xb])?;
    let coincidence = 2.0 * x_outcome_probability(phi, true);
    report.analytic("coincidence", coincidence);
    report.analytic("anticoincidence", 2.0 * x_outcome_probability(phi, false));
    for i in 0..joint.len() {
        let o = joint.outcome(i);
        let predicted = x_outcome_probability(phi, o[0] == o[1]);
        let key = outcome_key("prob", &o);
        report.analytic(&key, predicted);
        report.check_close(&key, joint.probs[i], predicted, 1e-10);
    }
    let born_coincidence = joint.prob_where(|o| o[0] == o[1]);
    report.check_close("coincidence", born_coincidence, coincidence, 1e-10);

    if shots > 0 {
        let counts = tally(&sample_indices(&joint, shots as usize, seed, Exec::default()), joint.len());
        record_frequencies(&mut report, "prob", &joint, &counts);
        let same: usize = (0..joint.len())
            .filter(|&i| joint.outcome(i)[0] == joint.outcome(i)[1])
            .map(|i| counts[i])
            .sum();
        report.empirical("coincidence", same as f64 / shots as f64, shots);
        report.empirical("anticoincidence", (shots as usize - same) as f64 / shots as f64, shots);
    }
    Ok(report.finish())
}
