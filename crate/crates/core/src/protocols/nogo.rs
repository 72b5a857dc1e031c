//! Local quadratures of a delocalized particle: commuting for bosons,
//! anticommuting for fermions, and the signaling the latter would allow.

use std::sync::Arc;

use crate::error::Result;
use crate::exec::Exec;
use crate::fock::{build_register, prepare_superposition, ModeRegister, ModeSpec, Site, StateVector};
use crate::measurement::{
    born_probabilities, post_select, quadrature_measurement, sample_sequential, signaling_distance, MeasurementSpec,
};
use crate::operators::{annihilation, commutator_norm, creation, quadrature};
use crate::protocols::report::ExperimentReport;
use crate::protocols::Statistics;
use crate::rng::derive_seed;

fn pair_register(statistics: Statistics) -> Result<Arc<ModeRegister>> {
    build_register(vec![
        ModeSpec::new("A", statistics.kind(), 1, Site::A),
        ModeSpec::new("B", statistics.kind(), 1, Site::B),
    ])
}

/// `‖[a_A + a_A†, a_B + a_B†]‖`.
pub fn quadrature_commutator(statistics: Statistics) -> Result<f64> {
    let r = pair_register(statistics)?;
    commutator_norm(&quadrature(&r, "A")?, &quadrature(&r, "B")?)
}

/// Commutator of the fermion pair operators `a a′ + a′† a†` at A and the
/// same at B.
pub fn pair_commutator() -> Result<f64> {
    let r = build_register(vec![
        ModeSpec::fermion("a", Site::A),
        ModeSpec::fermion("a'", Site::A),
        ModeSpec::fermion("b", Site::B),
        ModeSpec::fermion("b'", Site::B),
    ])?;
    let pair = |x: &str, y: &str| -> Result<_> {
        let lower = &annihilation(&r, x)? * &annihilation(&r, y)?;
        let raise = &creation(&r, y)? * &creation(&r, x)?;
        Ok(&lower + &raise)
    };
    commutator_norm(&pair("a", "a'")?, &pair("b", "b'")?)
}

struct SignalingSetup {
    state: StateVector,
    first_b: MeasurementSpec,
    at_a: MeasurementSpec,
    second_b: MeasurementSpec,
}

fn setup(statistics: Statistics) -> Result<SignalingSetup> {
    let r = pair_register(statistics)?;
    let state = prepare_superposition(&r, "A", "B", 0.0)?;
    Ok(SignalingSetup {
        state,
        first_b: quadrature_measurement(&r, "B")?.named("B1"),
        at_a: quadrature_measurement(&r, "A")?.named("A"),
        second_b: quadrature_measurement(&r, "B")?.named("B2"),
    })
}

/// Change in B's quadrature statistics caused by a non-selective quadrature
/// measurement at A: on the bare superposition, and after B has found `+`.
pub fn signaling(statistics: Statistics) -> Result<(f64, f64)> {
    let s = setup(statistics)?;
    let raw = signaling_distance(&s.state, &s.at_a, &s.second_b)?;
    let (prepared, _) = post_select(&s.state, &s.first_b, "+")?;
    let after = signaling_distance(&prepared, &s.at_a, &s.second_b)?;
    Ok((raw, after))
}

fn repeat_probability(statistics: Statistics, with_a: bool) -> Result<f64> {
    let s = setup(statistics)?;
    let (prepared, _) = post_select(&s.state, &s.first_b, "+")?;
    if !with_a {
        return Ok(born_probabilities(&prepared, &s.second_b)?.get("+").unwrap_or(0.0));
    }
    let mut total = 0.0;
    for o in s.at_a.outcomes() {
        if let Ok((branch, p)) = post_select(&prepared, &s.at_a, &o.label) {
            total += p * born_probabilities(&branch, &s.second_b)?.get("+").unwrap_or(0.0);
        }
    }
    Ok(total)
}

/// Among `shots` sequential runs, the fraction of `B1 = +` runs that repeat
/// `+` at B2, and the number of such runs.
fn sampled_repeat(statistics: Statistics, with_a: bool, shots: u64, seed: u64) -> Result<(f64, u64)> {
    let s = setup(statistics)?;
    let specs: Vec<&MeasurementSpec> = if with_a {
        vec![&s.first_b, &s.at_a, &s.second_b]
    } else {
        vec![&s.first_b, &s.second_b]
    };
    let records = sample_sequential(&s.state, &specs, shots as usize, seed, Exec::default())?;
    let kept: Vec<_> = records.iter().filter(|r| r.outcome_labels["B1"] == "+").collect();
    let repeated = kept.iter().filter(|r| r.outcome_labels["B2"] == "+").count();
    Ok((repeated as f64 / kept.len().max(1) as f64, kept.len() as u64))
}

pub fn fermion_nogo(shots: u64, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("fermion-nogo", seed, shots);

    let boson_comm = quadrature_commutator(Statistics::Boson)?;
    let fermion_comm = quadrature_commutator(Statistics::Fermion)?;
    report.exact("commutator.boson", boson_comm);
    report.exact("commutator.fermion", fermion_comm);
    report.check_close("commutator.boson", boson_comm, 0.0, 1e-12);
    report.check("commutator.fermion", fermion_comm >= 0.5);
    let pair = pair_commutator()?;
    report.exact("commutator.pair", pair);
    report.check_close("commutator.pair", pair, 0.0, 1e-12);

    for (k, stats) in [Statistics::Boson, Statistics::Fermion].into_iter().enumerate() {
        let (raw, after) = signaling(stats)?;
        report.exact(&format!("signaling.superposition.{stats}"), raw);
        report.exact(&format!("signaling.{stats}"), after);
        for (j, with_a) in [false, true].into_iter().enumerate() {
            let key = format!("repeat.{stats}.{}", if with_a { "with_A" } else { "without_A" });
            report.analytic(&key, repeat_probability(stats, with_a)?);
            if shots > 0 {
                let (freq, kept) = sampled_repeat(stats, with_a, shots, derive_seed(seed, (2 * k + j) as u64))?;
                report.empirical(&key, freq, kept);
            }
        }
    }
    let boson_signal = report.get("signaling.boson").unwrap_or(f64::NAN);
    let fermion_signal = report.get("signaling.fermion").unwrap_or(f64::NAN);
    report.check("signaling.boson", boson_signal < 1e-10);
    report.check("signaling.fermion", fermion_signal > 0.1);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn commutators() {
        assert_abs_diff_eq!(quadrature_commutator(Statistics::Boson).unwrap(), 0.0);
        assert_abs_diff_eq!(quadrature_commutator(Statistics::Fermion).unwrap(), 2.0, epsilon = 1e-15);
        assert!(pair_commutator().unwrap() < 1e-12);
    }

    #[test]
    fn number_definite_state_hides_the_signal() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            assert!(signaling(stats).unwrap().0 < 1e-12);
        }
    }

    #[test]
    fn prepared_state_signals_for_fermions_only() {
        let (_, boson) = signaling(Statistics::Boson).unwrap();
        let (_, fermion) = signaling(Statistics::Fermion).unwrap();
        assert!(boson < 1e-12);
        assert_abs_diff_eq!(fermion, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(repeat_probability(Statistics::Fermion, true).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(repeat_probability(Statistics::Fermion, false).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn report_passes() {
        let r = fermion_nogo(4000, 3).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!(r.empirical["repeat.boson.with_A"].value, 1.0);
    }
}
