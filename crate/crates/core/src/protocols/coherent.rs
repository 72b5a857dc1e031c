//! A coherent state of a mode split over two regions equals a product of
//! local coherent states.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use crate::error::{QwaveError, Result};
use crate::fock::{build_register, ModeRegister, ModeSpec, Site, StateVector};
use crate::operators::{coherent_amplitudes, number, poisson_tail};
use crate::protocols::report::ExperimentReport;
use crate::protocols::creation_combination;
use crate::C64;

pub const DEFAULT_TAIL_BOUND: f64 = 1e-9;

const LOCAL_A: &str = "a'";
const LOCAL_B: &str = "b'";

pub fn two_site_register(cutoff: usize) -> Result<Arc<ModeRegister>> {
    build_register(vec![ModeSpec::boson(LOCAL_A, cutoff, Site::A), ModeSpec::boson(LOCAL_B, cutoff, Site::B)])
}

/// `e^{−|α|²/2} Σₙ αⁿ (c†)ⁿ/n! |0⟩` with `c = (a′ + b′)/√2`, built by repeated
/// application of `c†`. Components above the cutoff only feed higher ones, so
/// dropping them leaves the kept amplitudes exact. Returned unnormalized.
pub fn delocalized_coherent(register: &Arc<ModeRegister>, alpha: C64) -> Result<nalgebra::DVector<C64>> {
    let h = C64::from(FRAC_1_SQRT_2);
    let raise = creation_combination(register, &[(LOCAL_A, h), (LOCAL_B, h)])?;
    let max_total: usize = register.modes().iter().map(|m| m.cutoff).sum();
    let mut term = StateVector::vacuum(register.clone()).into_amplitudes();
    let mut total = term.clone();
    for n in 0..max_total {
        term = raise.apply_raw(&term) * (alpha / (n as f64 + 1.0));
        total += &term;
    }
    Ok(total * C64::from((-alpha.norm_sqr() / 2.0).exp()))
}

fn check_tail(mean: f64, cutoff: usize, bound: f64) -> Result<()> {
    let tail = poisson_tail(mean, cutoff);
    if tail > bound {
        return Err(QwaveError::TailBoundExceeded { tail, bound, cutoff });
    }
    Ok(())
}

pub fn coherent_factorization(alpha: C64, cutoff: usize) -> Result<ExperimentReport> {
    coherent_factorization_with_bound(alpha, cutoff, DEFAULT_TAIL_BOUND)
}

pub fn coherent_factorization_with_bound(alpha: C64, cutoff: usize, tail_bound: f64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("coherent-factorization", 0, 0);
    report.param("alpha", alpha.norm());
    report.phase_param("alpha_phase", alpha.arg());
    report.param("cutoff", cutoff);
    check_tail(alpha.norm_sqr(), cutoff, tail_bound)?;
    let local = alpha * FRAC_1_SQRT_2;
    check_tail(local.norm_sqr(), cutoff, tail_bound)?;

    let r = two_site_register(cutoff)?;
    let delocalized = StateVector::from_unnormalized(r.clone(), delocalized_coherent(&r, alpha)?)?;
    let factor = coherent_amplitudes(local, cutoff, tail_bound)?;
    let product = StateVector::product(r.clone(), &[(LOCAL_A, factor.clone()), (LOCAL_B, factor)])?;

    let fidelity = product.fidelity(&delocalized)?;
    report.exact("fidelity", fidelity);
    report.exact("fidelity_floor", 1.0 - 10.0 * tail_bound);
    report.check("fidelity", fidelity > 1.0 - 10.0 * tail_bound);
    let expected_mean = local.norm_sqr();
    report.exact("local_mean", expected_mean);
    for (site, mode) in [("A", LOCAL_A), ("B", LOCAL_B)] {
        let mean = number(&r, mode)?.expectation(&delocalized)?.re;
        report.exact(&format!("mean_occupation.{site}"), mean);
        report.check_close(&format!("mean_occupation.{site}"), mean, expected_mean, 1e-6 * expected_mean.max(1.0));
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ln_factorial(n: usize) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn amplitudes_match_the_binomial_expansion() {
        // ⟨k, m| = e^{−|α|²/2} (α/√2)^{k+m} / √(k! m!)
        let alpha = C64::new(1.1, -0.4);
        let r = two_site_register(6).unwrap();
        let v = delocalized_coherent(&r, alpha).unwrap();
        let local = alpha * FRAC_1_SQRT_2;
        for k in 0..=6 {
            for m in 0..=6 {
                let expected = local.powu((k + m) as u32)
                    * (-alpha.norm_sqr() / 2.0 - 0.5 * (ln_factorial(k) + ln_factorial(m))).exp();
                let got = v[r.index_of(&[k, m].into()).unwrap()];
                assert_abs_diff_eq!((got - expected).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn vacuum_case() {
        let rep = coherent_factorization(C64::from(0.0), 3).unwrap();
        assert!(rep.pass);
        assert_abs_diff_eq!(rep.get("fidelity").unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn too_small_cutoff() {
        assert!(matches!(
            coherent_factorization(C64::from(2.0), 8),
            Err(QwaveError::TailBoundExceeded { .. })
        ));
    }

    #[test]
    fn factorizes_at_alpha_two() {
        let rep = coherent_factorization(C64::from(2.0), 24).unwrap();
        assert!(rep.pass, "{:?}", rep.failures);
        assert!(rep.get("fidelity").unwrap() > 1.0 - 1e-8);
        assert_abs_diff_eq!(rep.get("mean_occupation.A").unwrap(), 2.0, epsilon = 1e-6);
    }
}
