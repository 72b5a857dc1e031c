mod common;

use std::sync::Arc;

use common::{random_register, random_state};
use nalgebra::DMatrix;
use qwave_core::fock::{build_register, partial_trace};
use qwave_core::measurement::{occupation_measurement, quadrature_measurement, vacuum_one_superposition_basis};
use qwave_core::{DensityMatrix, MeasurementSpec, ModeKind, ModeRegister, ModeSpec, Site, StateVector, C64};

/// State left by measuring `spec` and forgetting the outcome.
fn dephased(state: &StateVector, spec: &MeasurementSpec) -> DensityMatrix {
    let d = state.register().dim();
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for o in spec.outcomes() {
        let branch = o.projector.apply_raw(state.amplitudes());
        rho += &branch * branch.adjoint();
    }
    DensityMatrix::new(state.register().clone(), rho).unwrap()
}

fn labels_at(register: &Arc<ModeRegister>, site: Site) -> Vec<&str> {
    register.modes().iter().filter(|m| m.site == site).map(|m| m.label.as_str()).collect()
}

/// Largest change of the B-side reduced state caused by `spec`.
fn disturbance_at_b(state: &StateVector, spec: &MeasurementSpec) -> f64 {
    let b = labels_at(state.register(), Site::B);
    let before = partial_trace(state, &b).unwrap();
    let after = partial_trace(&dephased(state, spec), &b).unwrap();
    before.max_abs_diff(&after).unwrap()
}

#[test]
fn bosonic_and_two_level_measurements_at_a_leave_b_alone() {
    let mut checked = 0;
    for seed in 0..200u64 {
        let r = random_register(seed);
        if labels_at(&r, Site::B).is_empty() {
            continue;
        }
        let psi = random_state(&r, seed + 1000);
        for m in r.modes().iter().filter(|m| m.site == Site::A) {
            let mut specs = vec![occupation_measurement(&r, &m.label).unwrap()];
            if m.kind != ModeKind::Fermion {
                specs.push(vacuum_one_superposition_basis(&r, &m.label).unwrap());
            }
            for spec in &specs {
                assert!(disturbance_at_b(&psi, spec) < 1e-12, "seed {seed}, mode {}", m.label);
                assert!(spec.locality_defect().unwrap().unwrap() < 1e-12);
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn fermion_quadrature_at_a_disturbs_b() {
    // b is declared first, so the string of a runs through it
    let r = build_register(vec![ModeSpec::fermion("b", Site::B), ModeSpec::fermion("a", Site::A)]).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = vec![C64::from(h), C64::from(h)];
    let psi = StateVector::product(r.clone(), &[("b", plus.clone()), ("a", plus)]).unwrap();
    let spec = quadrature_measurement(&r, "a").unwrap();
    assert!((disturbance_at_b(&psi, &spec) - 0.5).abs() < 1e-12);
    assert!(spec.locality_defect().unwrap().unwrap() > 0.5);

    // the number measurement at the same mode stays local
    let count = occupation_measurement(&r, "a").unwrap();
    assert!(disturbance_at_b(&psi, &count) < 1e-12);
}

#[test]
fn fermionic_pair_basis_is_local() {
    use qwave_core::measurement::plus_minus_basis;
    use qwave_core::protocols::aux_phase::{aux_register, aux_state};
    use qwave_core::protocols::{ModeOrdering, Statistics};
    for ordering in [ModeOrdering::Grouped, ModeOrdering::Interleaved] {
        let r = aux_register(Statistics::Fermion, ordering).unwrap();
        let at_a = plus_minus_basis(&r, "a", "a'").unwrap();
        assert!(at_a.locality_defect().unwrap().unwrap() < 1e-12);
        assert!(disturbance_at_b(&aux_state(&r, 0.8).unwrap(), &at_a) < 1e-12);
    }
}
