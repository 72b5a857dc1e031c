//! Electron phase carried to photons and positrons by local pair
//! annihilation.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Exec;
use crate::fock::{build_register, prepare_superposition, ModeRegister, ModeSpec, PartialTrace, Site, StateVector};
use crate::measurement::{
    born_probabilities, joint_distribution, post_select, sample_indices, tally, vacuum_one_superposition_basis,
    vacuum_test, JointDistribution, MeasurementSpec,
};
use crate::operators::{pair_annihilation_coupler, Propagator};
use crate::protocols::report::ExperimentReport;
use crate::protocols::{
    canonical_phase, create_from_vacuum, creation_combination, outcome_key, record_frequencies, relative_phase,
    split_creation, SWAP_TIME,
};
use crate::rng::derive_seed;
use crate::C64;

pub const PHOTON_A: &str = "photon_A";
pub const PHOTON_B: &str = "photon_B";
pub const ELECTRON_A: &str = "electron_A";
pub const ELECTRON_B: &str = "electron_B";
pub const POSITRON_A: &str = "positron_A";
pub const POSITRON_B: &str = "positron_B";

const LEPTONS: [&str; 4] = [ELECTRON_A, ELECTRON_B, POSITRON_A, POSITRON_B];
const PHOTON_OUTCOMES: [(&str, &str); 4] = [("+", "+"), ("+", "-"), ("-", "+"), ("-", "-")];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainOrdering {
    /// photons, then electrons, then positrons
    BySpecies,
    /// everything at A, then everything at B
    BySite,
}

impl ChainOrdering {
    fn labels(self) -> [&'static str; 6] {
        match self {
            ChainOrdering::BySpecies => [PHOTON_A, PHOTON_B, ELECTRON_A, ELECTRON_B, POSITRON_A, POSITRON_B],
            ChainOrdering::BySite => [PHOTON_A, ELECTRON_A, POSITRON_A, PHOTON_B, ELECTRON_B, POSITRON_B],
        }
    }
}

/// Register, annihilation propagator and the measurements used by the chain.
pub struct Chain {
    pub register: Arc<ModeRegister>,
    propagator: Propagator,
    photon_a: MeasurementSpec,
    photon_b: MeasurementSpec,
    leptons: MeasurementSpec,
}

impl Chain {
    pub fn new(ordering: ChainOrdering) -> Result<Self> {
        let register = build_register(
            ordering
                .labels()
                .iter()
                .map(|&l| {
                    let site = if l.ends_with('A') { Site::A } else { Site::B };
                    if l.starts_with("photon") {
                        ModeSpec::boson(l, 1, site)
                    } else {
                        ModeSpec::fermion(l, site)
                    }
                })
                .collect(),
        )?;
        let h = &pair_annihilation_coupler(&register, PHOTON_A, ELECTRON_A, POSITRON_A, 1.0)?
            + &pair_annihilation_coupler(&register, PHOTON_B, ELECTRON_B, POSITRON_B, 1.0)?;
        Ok(Chain {
            propagator: Propagator::new(&h)?,
            photon_a: vacuum_one_superposition_basis(&register, PHOTON_A)?.named("A"),
            photon_b: vacuum_one_superposition_basis(&register, PHOTON_B)?.named("B"),
            leptons: vacuum_test(&register, &LEPTONS, "leptons")?,
            register,
        })
    }

    pub fn annihilate(&self, state: &StateVector) -> Result<StateVector> {
        self.propagator.evolve(state, SWAP_TIME)
    }

    /// Joint `±` outcome law of the two photon measurements.
    pub fn photon_statistics(&self, state: &StateVector) -> Result<JointDistribution> {
        joint_distribution(state, &[&self.photon_a, &self.photon_b])
    }

    /// Keeps the runs with no electron or positron left anywhere.
    pub fn without_leptons(&self, state: &StateVector) -> Result<(StateVector, f64)> {
        post_select(state, &self.leptons, "none")
    }

    /// Keeps the runs where the photon measurements gave `(s, t)`.
    pub fn photon_outcome(&self, state: &StateVector, s: &str, t: &str) -> Result<(StateVector, f64)> {
        let (after_a, pa) = post_select(state, &self.photon_a, s)?;
        let (after_b, pb) = post_select(&after_a, &self.photon_b, t)?;
        Ok((after_b, pa * pb))
    }

    /// Single-positron amplitudes `(at A, at B)` of a state whose positron
    /// is unentangled with everything else.
    pub fn positron_amplitudes(&self, state: &StateVector) -> Result<((C64, C64), f64)> {
        let rho = state.partial_trace(&[POSITRON_A, POSITRON_B])?;
        let sub = rho.register().clone();
        let at_a = sub.index_of(&occupation(&sub, POSITRON_A))?;
        let at_b = sub.index_of(&occupation(&sub, POSITRON_B))?;
        let m = rho.elements();
        let pivot = if m[(at_a, at_a)].re >= m[(at_b, at_b)].re { at_a } else { at_b };
        let scale = m[(pivot, pivot)].re.sqrt();
        Ok(((m[(at_a, pivot)] / scale, m[(at_b, pivot)] / scale), rho.purity()))
    }

    /// `ψ_e†(φ) χ† |0⟩` with `χ† = c_A p_A† + c_B p_B†`.
    pub fn electron_meets_positron(&self, phi: f64, positron: (C64, C64)) -> Result<StateVector> {
        let electron = split_creation(&self.register, ELECTRON_A, ELECTRON_B, phi)?;
        let chi = creation_combination(&self.register, &[(POSITRON_A, positron.0), (POSITRON_B, positron.1)])?;
        create_from_vacuum(&self.register, &[&electron, &chi])
    }

    /// `ψ_e†(φ) p_A† p_B† |0⟩`.
    pub fn electron_and_two_positrons(&self, phi: f64) -> Result<StateVector> {
        let electron = split_creation(&self.register, ELECTRON_A, ELECTRON_B, phi)?;
        let pa = creation_combination(&self.register, &[(POSITRON_A, C64::from(1.0))])?;
        let pb = creation_combination(&self.register, &[(POSITRON_B, C64::from(1.0))])?;
        create_from_vacuum(&self.register, &[&electron, &pa, &pb])
    }

    /// `(γ_A† p_B† + sign·e^{iφ} γ_B† p_A†)/√2 |0⟩`.
    pub fn photon_positron_pair(&self, phi: f64, sign: f64) -> Result<StateVector> {
        let r = &self.register;
        let one = C64::from(1.0);
        let ga = creation_combination(r, &[(PHOTON_A, one)])?;
        let gb = creation_combination(r, &[(PHOTON_B, one)])?;
        let pa = creation_combination(r, &[(POSITRON_A, one)])?;
        let pb = creation_combination(r, &[(POSITRON_B, one)])?;
        let first = &ga * &pb;
        let second = (&gb * &pa).scale(C64::from_polar(sign, phi));
        create_from_vacuum(r, &[&(&first + &second)])
    }
}

fn occupation(sub: &ModeRegister, occupied: &str) -> crate::fock::OccupationState {
    sub.modes().iter().map(|m| usize::from(m.label == occupied)).collect::<Vec<_>>().into()
}

/// Fidelity of positron amplitudes with `(p_B† + e^{iφ} p_A†)/√2`.
fn posit_fidelity(amps: (C64, C64), phi: f64) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let target = (C64::from_polar(h, phi), C64::from(h));
    (target.0.conj() * amps.0 + target.1.conj() * amps.1).norm_sqr()
}

/// Photon `±` statistics for `(γ_A† + e^{iθ} γ_B†)/√2`: `|s + t e^{iθ}|²/8`.
pub fn photon_pair_probability(theta: f64, s: f64, t: f64) -> f64 {
    (C64::from(s) + C64::from_polar(t, theta)).norm_sqr() / 8.0
}

fn sign_of(label: &str) -> f64 {
    if label == "+" {
        1.0
    } else {
        -1.0
    }
}

/// Photon state left by stage three, and its statistics, after stage two
/// kept photon outcome `(s, t)`.
fn third_stage(chain: &Chain, phi: f64, s: &str, t: &str) -> Result<(StateVector, f64, JointDistribution)> {
    let first = chain.annihilate(&chain.electron_and_two_positrons(phi)?)?;
    let (kept, _) = chain.photon_outcome(&first, s, t)?;
    let (positron, _) = chain.positron_amplitudes(&kept)?;
    let third = chain.annihilate(&chain.electron_meets_positron(phi, positron)?)?;
    let (photons, p) = chain.without_leptons(&third)?;
    let stats = chain.photon_statistics(&photons)?;
    Ok((photons, p, stats))
}

fn photon_phase(chain: &Chain, photons: &StateVector) -> Result<f64> {
    let r = &chain.register;
    let only = |label: &str| -> crate::fock::OccupationState {
        r.modes().iter().map(|m| usize::from(m.label == label)).collect::<Vec<_>>().into()
    };
    Ok(relative_phase(photons.amplitude(&only(PHOTON_A))?, photons.amplitude(&only(PHOTON_B))?))
}

pub fn collective_chain(phi: f64, shots: u64, seed: u64) -> Result<ExperimentReport> {
    collective_chain_ordered(phi, ChainOrdering::BySpecies, shots, seed)
}

pub fn collective_chain_ordered(phi: f64, ordering: ChainOrdering, shots: u64, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("collective-chain", seed, shots);
    report.phase_param("phi", phi);
    let chain = Chain::new(ordering)?;
    let exec = Exec::default();

    // electron and positron both delocalized
    let electron = split_creation(&chain.register, ELECTRON_A, ELECTRON_B, phi)?;
    let positron = split_creation(&chain.register, POSITRON_A, POSITRON_B, 0.0)?;
    let direct = chain.annihilate(&create_from_vacuum(&chain.register, &[&electron, &positron])?)?;
    report.analytic("direct.no_leptons", 0.5);
    let leptons = born_probabilities(&direct, &chain.leptons)?;
    if shots > 0 {
        let joint = joint_distribution(&direct, &[&chain.leptons])?;
        let counts = tally(&sample_indices(&joint, shots as usize, derive_seed(seed, 0), exec), joint.len());
        report.empirical("direct.no_leptons", counts[0] as f64 / shots as f64, shots);
    }
    let (photons, p_none) = chain.without_leptons(&direct)?;
    report.check_close("direct.no_leptons", p_none, leptons.get("none").unwrap_or(0.0), 1e-12);
    report.check_close("direct.no_leptons", p_none, 0.5, 1e-10);
    let target = prepare_superposition(&chain.register, PHOTON_A, PHOTON_B, phi)?;
    let direct_fidelity = photons.fidelity(&target)?;
    report.exact("direct.photon_fidelity", direct_fidelity);
    report.check_close("direct.photon_fidelity", direct_fidelity, 1.0, 1e-9);
    report.exact("direct.photon_phase", photon_phase(&chain, &photons)?);

    // electron against one positron at each site
    let first = chain.annihilate(&chain.electron_and_two_positrons(phi)?)?;
    let unsigned = first.fidelity(&chain.photon_positron_pair(phi, 1.0)?)?;
    let exchanged = first.fidelity(&chain.photon_positron_pair(phi, -1.0)?)?;
    report.exact("stage1.fidelity", unsigned);
    report.exact("stage1.exchange_fidelity", exchanged);
    report.check_close("stage1.exchange_fidelity", exchanged, 1.0, 1e-9);

    let photon_joint = chain.photon_statistics(&first)?;
    for (s, t) in PHOTON_OUTCOMES {
        let key = outcome_key("stage2.prob", &[s, t]);
        report.analytic(&key, 0.25);
        report.check_close(&key, photon_joint.prob(&[s, t]).unwrap_or(0.0), 0.25, 1e-10);
        let (kept, _) = chain.photon_outcome(&first, s, t)?;
        let (amps, purity) = chain.positron_amplitudes(&kept)?;
        report.check_close(&format!("stage2.purity({s},{t})"), purity, 1.0, 1e-10);
        report.exact(&outcome_key("stage2.posit_fidelity", &[s, t]), posit_fidelity(amps, phi));
        report.exact(&outcome_key("stage2.positron_phase", &[s, t]), relative_phase(amps.1, amps.0));
    }
    if shots > 0 {
        let counts = tally(&sample_indices(&photon_joint, shots as usize, derive_seed(seed, 1), exec), photon_joint.len());
        record_frequencies(&mut report, "stage2.prob", &photon_joint, &counts);
    }
    report.exact("stage2.posit_fidelity", report.get("stage2.posit_fidelity(+,+)").unwrap_or(f64::NAN));

    // the new positron against a fresh delocalized electron
    for (k, (s, t)) in [("+", "+"), ("+", "-")].into_iter().enumerate() {
        let (photons, p, stats) = third_stage(&chain, phi, s, t)?;
        let tag = format!("stage3({s},{t})");
        report.exact(&format!("{tag}.no_leptons"), p);
        let phase = photon_phase(&chain, &photons)?;
        report.exact(&format!("{tag}.relative_phase"), phase);
        let (_, _, reference) = third_stage(&chain, 0.0, s, t)?;
        let drift = stats.tv_distance(&reference);
        report.exact(&format!("{tag}.phi_dependence"), drift);
        report.check(&format!("{tag}.phi_dependence"), drift < 1e-10);
        let theta = if s == t { PI } else { 0.0 };
        report.check(&format!("{tag}.relative_phase"), {
            let d = (phase - canonical_phase(theta)).abs();
            d.min(std::f64::consts::TAU - d) < 1e-9
        });
        for i in 0..stats.len() {
            let o = stats.outcome(i);
            let key = outcome_key(&format!("{tag}.prob"), &o);
            let predicted = photon_pair_probability(theta, sign_of(o[0]), sign_of(o[1]));
            report.analytic(&key, predicted);
            report.check_close(&key, stats.probs[i], predicted, 1e-10);
        }
        if shots > 0 {
            let idx = sample_indices(&stats, shots as usize, derive_seed(seed, 2 + k as u64), exec);
            record_frequencies(&mut report, &format!("{tag}.prob"), &stats, &tally(&idx, stats.len()));
        }
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn direct_annihilation_keeps_the_phase() {
        let chain = Chain::new(ChainOrdering::BySite).unwrap();
        for phi in [0.0, 1.0, 2.5] {
            let e = split_creation(&chain.register, ELECTRON_A, ELECTRON_B, phi).unwrap();
            let p = split_creation(&chain.register, POSITRON_A, POSITRON_B, 0.0).unwrap();
            let out = chain.annihilate(&create_from_vacuum(&chain.register, &[&e, &p]).unwrap()).unwrap();
            let (photons, prob) = chain.without_leptons(&out).unwrap();
            assert_abs_diff_eq!(prob, 0.5, epsilon = 1e-10);
            assert_abs_diff_eq!(photon_phase(&chain, &photons).unwrap(), canonical_phase(phi), epsilon = 1e-9);
        }
    }

    #[test]
    fn stage_two_positron_phases() {
        // (+,−) leaves (p_B† + e^{iφ}p_A†)/√2; (+,+) flips the sign of the A branch
        for ordering in [ChainOrdering::BySpecies, ChainOrdering::BySite] {
            let chain = Chain::new(ordering).unwrap();
            let phi = PI / 3.0;
            let first = chain.annihilate(&chain.electron_and_two_positrons(phi).unwrap()).unwrap();
            let (kept, _) = chain.photon_outcome(&first, "+", "-").unwrap();
            let (amps, _) = chain.positron_amplitudes(&kept).unwrap();
            assert_abs_diff_eq!(posit_fidelity(amps, phi), 1.0, epsilon = 1e-10);
            let (kept, _) = chain.photon_outcome(&first, "+", "+").unwrap();
            let (amps, _) = chain.positron_amplitudes(&kept).unwrap();
            assert_abs_diff_eq!(posit_fidelity(amps, phi + PI), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn orderings_agree() {
        let a = collective_chain_ordered(0.8, ChainOrdering::BySpecies, 0, 1).unwrap();
        let b = collective_chain_ordered(0.8, ChainOrdering::BySite, 0, 1).unwrap();
        for (k, v) in &a.analytic {
            assert_abs_diff_eq!(*v, b.analytic[k], epsilon = 1e-9);
        }
    }

    #[test]
    fn report_passes() {
        let r = collective_chain(PI / 3.0, 2000, 5).unwrap();
        assert!(r.pass, "{:?}", r.failures);
    }
}
