mod common;

use std::f64::consts::TAU;

use common::{canonical_defect, random_hermitian, random_state, register_from, ModeDraw};
use proptest::prelude::*;
use qwave_core::fock::{build_register, partial_trace};
use qwave_core::measurement::{
    born_probabilities, joint_distribution, occupation_measurement, sample_indices, vacuum_one_superposition_basis,
    vacuum_test,
};
use qwave_core::operators::{evolve, number, phase_kick, swap_coupler, OperatorMatrix, Propagator};
use qwave_core::{Exec, ModeSpec, Site, StateVector, C64};

fn draws() -> impl Strategy<Value = Vec<ModeDraw>> {
    prop::collection::vec((0u8..3, 1usize..=3, any::<bool>()), 1..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn index_and_occupation_are_inverse(d in draws()) {
        let r = register_from(&d);
        for i in 0..r.dim() {
            let occ = r.occupation_of(i).unwrap();
            prop_assert_eq!(r.index_of(&occ).unwrap(), i);
        }
        prop_assert!(r.occupation_of(r.dim()).is_err());
    }

    #[test]
    fn canonical_relations_hold(d in draws()) {
        let r = register_from(&d);
        prop_assert!(canonical_defect(&r) < 1e-12);
    }

    #[test]
    fn evolution_preserves_norm(d in draws(), seed in any::<u64>(), t in -3.0f64..3.0) {
        let r = register_from(&d);
        let psi = random_state(&r, seed);
        let h = random_hermitian(&r, seed ^ 0x5eed);
        let out = evolve(&psi, &h, t).unwrap();
        prop_assert!((out.norm_squared() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolution_composes(d in draws(), seed in any::<u64>(), t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let r = register_from(&d);
        let psi = random_state(&r, seed);
        let u = Propagator::new(&random_hermitian(&r, !seed)).unwrap();
        let stepwise = u.evolve(&u.evolve(&psi, t1).unwrap(), t2).unwrap();
        let direct = u.evolve(&psi, t1 + t2).unwrap();
        prop_assert!((stepwise.amplitudes() - direct.amplitudes()).norm() < 1e-9);
    }

    #[test]
    fn phase_kicks_compose(d in draws(), p1 in -7.0f64..7.0, p2 in -7.0f64..7.0, pick in any::<prop::sample::Index>()) {
        let r = register_from(&d);
        let mode = &r.modes()[pick.index(r.len())].label;
        let both = &phase_kick(&r, mode, p1).unwrap() * &phase_kick(&r, mode, p2).unwrap();
        let sum = phase_kick(&r, mode, p1 + p2).unwrap();
        prop_assert!((&both - &sum).max_norm() < 1e-12);
        let full_turn = &phase_kick(&r, mode, TAU).unwrap() - &OperatorMatrix::identity(&r);
        prop_assert!(full_turn.max_norm() < 1e-12);
        let zero = &phase_kick(&r, mode, 0.0).unwrap() - &OperatorMatrix::identity(&r);
        prop_assert_eq!(zero.max_norm(), 0.0);
    }

    #[test]
    fn swap_coupler_conserves_excitations(cutoff in 1usize..=5, spectator in 0u8..3, strength in -2.0f64..2.0) {
        let mut d: Vec<ModeDraw> = vec![(spectator, 2, false)];
        d.push((0, cutoff, true));
        d.push((2, 1, true));
        let r = register_from(&d);
        let h = swap_coupler(&r, "m1", "m2", strength).unwrap();
        let total = &number(&r, "m1").unwrap() + &number(&r, "m2").unwrap();
        prop_assert!(h.commutator(&total).unwrap().max_norm() < 1e-12);
        prop_assert!(h.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn reduced_states_are_density_matrices(d in draws(), seed in any::<u64>(), mask in any::<u8>()) {
        let r = register_from(&d);
        let psi = random_state(&r, seed);
        let keep: Vec<&str> = r
            .modes()
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, m)| m.label.as_str())
            .collect();
        let rho = partial_trace(&psi, &keep).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
        prop_assert!(rho.hermiticity_defect() < 1e-12);
        prop_assert!(rho.min_eigenvalue() > -1e-10);
        // from the full density matrix the result is the same
        let via_density = partial_trace(&psi.to_density(), &keep).unwrap();
        prop_assert!(rho.max_abs_diff(&via_density).unwrap() < 1e-12);
    }

    #[test]
    fn tracing_everything_leaves_one(d in draws(), seed in any::<u64>()) {
        let r = register_from(&d);
        let rho = partial_trace(&random_state(&r, seed), &[]).unwrap();
        prop_assert_eq!(rho.elements().shape(), (1, 1));
        prop_assert!((rho.elements()[(0, 0)] - C64::from(1.0)).norm() < 1e-12);
    }

    #[test]
    fn product_states_reduce_to_pure_states(d in draws(), seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let r = register_from(&d);
        let factors: Vec<(&str, Vec<C64>)> = r
            .modes()
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let local = random_state(&build_register(vec![ModeSpec::new("x", m.kind, m.cutoff, Site::A)]).unwrap(), seed.wrapping_add(k as u64));
                (m.label.as_str(), local.amplitudes().iter().copied().collect())
            })
            .collect();
        let psi = StateVector::product(r.clone(), &factors).unwrap();
        let keep = r.modes()[pick.index(r.len())].label.as_str();
        prop_assert!((partial_trace(&psi, &[keep]).unwrap().purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn born_probabilities_are_complete(d in draws(), seed in any::<u64>()) {
        let r = register_from(&d);
        let psi = random_state(&r, seed);
        let labels: Vec<&str> = r.modes().iter().map(|m| m.label.as_str()).collect();
        let mut specs = vec![vacuum_test(&r, &labels, "vacuum").unwrap()];
        for m in &labels {
            specs.push(occupation_measurement(&r, m).unwrap());
            specs.push(vacuum_one_superposition_basis(&r, m).unwrap());
        }
        for s in &specs {
            let dist = born_probabilities(&psi, s).unwrap();
            prop_assert!((dist.total() - 1.0).abs() < 1e-10);
            prop_assert!(dist.probs.iter().all(|&p| p >= -1e-15));
        }
    }

    #[test]
    fn sampling_is_a_function_of_the_seed(seed in any::<u64>(), shots in 0usize..400) {
        let r = register_from(&[(0, 2, true), (1, 1, false)]);
        let psi = random_state(&r, seed);
        let a = occupation_measurement(&r, "m0").unwrap();
        let b = occupation_measurement(&r, "m1").unwrap();
        let joint = joint_distribution(&psi, &[&a, &b]).unwrap();
        let first = sample_indices(&joint, shots, seed, Exec::Sequential);
        prop_assert_eq!(&first, &sample_indices(&joint, shots, seed, Exec::Sequential));
        prop_assert_eq!(&first, &sample_indices(&joint, shots, seed, Exec::Parallel));
    }
}
