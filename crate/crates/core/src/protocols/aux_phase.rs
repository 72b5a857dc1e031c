//! Phase of a delocalized particle read out against an auxiliary particle of
//! known phase.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Exec;
use crate::fock::{build_register, ModeRegister, ModeSpec, Site, StateVector};
use crate::measurement::{joint_distribution, plus_minus_basis, sample_indices, tally, JointDistribution};
use crate::protocols::report::ExperimentReport;
use crate::protocols::{create_from_vacuum, outcome_key, split_creation, Statistics};
use crate::C64;

pub const TEST_A: &str = "a";
pub const AUX_A: &str = "a'";
pub const TEST_B: &str = "b";
pub const AUX_B: &str = "b'";

/// Declaration order of the four modes; only fermion signs depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeOrdering {
    /// `a, a′, b, b′`
    Grouped,
    /// `a, b, a′, b′`
    Interleaved,
}

impl ModeOrdering {
    pub fn labels(self) -> [&'static str; 4] {
        match self {
            ModeOrdering::Grouped => [TEST_A, AUX_A, TEST_B, AUX_B],
            ModeOrdering::Interleaved => [TEST_A, TEST_B, AUX_A, AUX_B],
        }
    }
}

pub fn aux_register(statistics: Statistics, ordering: ModeOrdering) -> Result<Arc<ModeRegister>> {
    build_register(
        ordering
            .labels()
            .iter()
            .map(|&l| {
                let site = if l.starts_with('a') { Site::A } else { Site::B };
                ModeSpec::new(l, statistics.kind(), 1, site)
            })
            .collect(),
    )
}

/// `ψ†(φ) ψ′†(0) |0⟩` with the test particle split over `a, b` and the
/// auxiliary particle over `a′, b′`.
pub fn aux_state(register: &Arc<ModeRegister>, phi: f64) -> Result<StateVector> {
    let test = split_creation(register, TEST_A, TEST_B, phi)?;
    let aux = split_creation(register, AUX_A, AUX_B, 0.0)?;
    create_from_vacuum(register, &[&test, &aux])
}

/// Joint `±/other` outcome law at A and B.
pub fn site_statistics(state: &StateVector) -> Result<JointDistribution> {
    let r = state.register();
    let at_a = plus_minus_basis(r, TEST_A, AUX_A)?;
    let at_b = plus_minus_basis(r, TEST_B, AUX_B)?;
    joint_distribution(state, &[&at_a, &at_b])
}

/// Probability of `(s, t)` given one particle at each site, for exchange
/// sign `ε`: `⅛|1 + ε·st·e^{iφ}|²`.
pub fn conditional_probability(phi: f64, exchange_sign: f64, s: f64, t: f64) -> f64 {
    (C64::from(1.0) + C64::from_polar(exchange_sign * s * t, phi)).norm_sqr() / 8.0
}

fn sign_of(label: &str) -> f64 {
    if label == "+" {
        1.0
    } else {
        -1.0
    }
}

fn one_per_site(o: &[&str]) -> bool {
    o.iter().all(|l| *l != "other")
}

/// Conditional `(s, t)` probabilities in the order `++, +−, −+, −−`, and the
/// conditioning probability.
pub fn conditional_table(joint: &JointDistribution) -> ([f64; 4], f64) {
    let cond = joint.prob_where(one_per_site);
    let mut table = [0.0; 4];
    for (k, (s, t)) in [("+", "+"), ("+", "-"), ("-", "+"), ("-", "-")].into_iter().enumerate() {
        table[k] = joint.prob(&[s, t]).unwrap_or(0.0) / cond;
    }
    (table, cond)
}

pub fn aux_particle_phase(phi: f64, statistics: Statistics, shots: u64, seed: u64) -> Result<ExperimentReport> {
    aux_particle_phase_ordered(phi, statistics, ModeOrdering::Grouped, shots, seed)
}

pub fn aux_particle_phase_ordered(
    phi: f64,
    statistics: Statistics,
    ordering: ModeOrdering,
    shots: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("aux-phase", seed, shots);
    report.phase_param("phi", phi);
    report.param("statistics", statistics.name());

    let r = aux_register(statistics, ordering)?;
    let joint = site_statistics(&aux_state(&r, phi)?)?;
    let (table, cond) = conditional_table(&joint);

    report.analytic("conditioning_probability", 0.5);
    report.check_close("conditioning_probability", cond, 0.5, 1e-10);

    let eps = statistics.exchange_sign();
    let mut unsigned_deviation: f64 = 0.0;
    for (k, (s, t)) in [("+", "+"), ("+", "-"), ("-", "+"), ("-", "-")].into_iter().enumerate() {
        let key = outcome_key("conditional", &[s, t]);
        let predicted = conditional_probability(phi, eps, sign_of(s), sign_of(t));
        report.analytic(&key, predicted);
        report.check_close(&key, table[k], predicted, 1e-10);
        let unsigned = conditional_probability(phi, 1.0, sign_of(s), sign_of(t));
        report.exact(&outcome_key("unsigned.conditional", &[s, t]), unsigned);
        unsigned_deviation = unsigned_deviation.max((table[k] - unsigned).abs());
    }
    report.exact("unsigned.max_deviation", unsigned_deviation);
    report.analytic("conditional_coincidence", table[0] + table[3]);

    // the other declaration order must give the same numbers
    let other = match ordering {
        ModeOrdering::Grouped => ModeOrdering::Interleaved,
        ModeOrdering::Interleaved => ModeOrdering::Grouped,
    };
    let r2 = aux_register(statistics, other)?;
    let joint2 = site_statistics(&aux_state(&r2, phi)?)?;
    let ordering_gap = joint.tv_distance(&joint2);
    report.exact("ordering_difference", ordering_gap);
    report.check("ordering_invariance", ordering_gap < 1e-10);

    for i in 0..joint.len() {
        report.exact(&outcome_key("joint", &joint.outcome(i)), joint.probs[i]);
    }

    if shots > 0 {
        let idx = sample_indices(&joint, shots as usize, seed, Exec::default());
        let counts = tally(&idx, joint.len());
        let kept: usize = (0..joint.len()).filter(|&i| one_per_site(&joint.outcome(i))).map(|i| counts[i]).sum();
        report.empirical("conditioning_probability", kept as f64 / shots as f64, shots);
        for (i, &c) in counts.iter().enumerate() {
            let o = joint.outcome(i);
            if one_per_site(&o) {
                let key = outcome_key("conditional", &o);
                report.empirical(&key, c as f64 / kept.max(1) as f64, kept as u64);
            }
        }
        let coincident: usize = (0..joint.len())
            .filter(|&i| {
                let o = joint.outcome(i);
                one_per_site(&o) && o[0] == o[1]
            })
            .map(|i| counts[i])
            .sum();
        report.empirical("conditional_coincidence", coincident as f64 / kept.max(1) as f64, kept as u64);
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn bosons_follow_the_coincidence_law() {
        for phi in [0.0, 0.4, PI / 2.0, PI] {
            let r = aux_register(Statistics::Boson, ModeOrdering::Grouped).unwrap();
            let (table, cond) = conditional_table(&site_statistics(&aux_state(&r, phi).unwrap()).unwrap());
            assert_abs_diff_eq!(cond, 0.5, epsilon = 1e-12);
            let coincidence = (C64::from(1.0) + C64::from_polar(1.0, phi)).norm_sqr() / 4.0;
            assert_abs_diff_eq!(table[0] + table[3], coincidence, epsilon = 1e-12);
        }
    }

    #[test]
    fn fermion_exchange_shifts_the_phase_by_pi() {
        // one-per-site amplitude is the determinant (t − s·e^{iφ})/4
        for phi in [0.0, 1.1, 2.5] {
            let r = aux_register(Statistics::Fermion, ModeOrdering::Interleaved).unwrap();
            let (table, _) = conditional_table(&site_statistics(&aux_state(&r, phi).unwrap()).unwrap());
            for (k, (s, t)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
                let amp = (C64::from(t) - C64::from_polar(s, phi)) / 4.0;
                assert_abs_diff_eq!(table[k], amp.norm_sqr() / 0.5, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn reports_pass_for_both_statistics() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let r = aux_particle_phase(0.7, stats, 4000, 2).unwrap();
            assert!(r.pass, "{stats}: {:?}", r.failures);
        }
        let boson = aux_particle_phase(0.7, Statistics::Boson, 0, 2).unwrap();
        assert!(boson.get("unsigned.max_deviation").unwrap() < 1e-12);
        let fermion = aux_particle_phase(0.0, Statistics::Fermion, 0, 2).unwrap();
        assert_abs_diff_eq!(fermion.get("unsigned.max_deviation").unwrap(), 0.5, epsilon = 1e-12);
    }
}
