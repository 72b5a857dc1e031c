#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use qwave_core::operators::{annihilation, creation, occupation_projector, OperatorMatrix};
use qwave_core::fock::build_register;
use qwave_core::{ModeKind, ModeRegister, ModeSpec, Site, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mode description drawn by the generators: kind code, boson cutoff, site.
pub type ModeDraw = (u8, usize, bool);

pub fn register_from(draws: &[ModeDraw]) -> Arc<ModeRegister> {
    let specs = draws
        .iter()
        .enumerate()
        .map(|(k, &(kind, cutoff, at_a))| {
            let site = if at_a { Site::A } else { Site::B };
            let label = format!("m{k}");
            match kind % 3 {
                0 => ModeSpec::boson(label, cutoff.max(1), site),
                1 => ModeSpec::fermion(label, site),
                _ => ModeSpec::two_level(label, site),
            }
        })
        .collect();
    build_register(specs).expect("generated register is valid")
}

pub fn random_draws(rng: &mut ChaCha8Rng, max_modes: usize, max_cutoff: usize) -> Vec<ModeDraw> {
    let n = rng.random_range(1..=max_modes);
    (0..n)
        .map(|_| (rng.random_range(0..3u8), rng.random_range(1..=max_cutoff), rng.random_bool(0.5)))
        .collect()
}

pub fn random_register(seed: u64) -> Arc<ModeRegister> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    register_from(&random_draws(&mut rng, 4, 3))
}

pub fn random_state(register: &Arc<ModeRegister>, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = DVector::from_fn(register.dim(), |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    StateVector::from_unnormalized(register.clone(), v).expect("nonzero random vector")
}

pub fn random_hermitian(register: &Arc<ModeRegister>, seed: u64) -> OperatorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = register.dim();
    let m = DMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    OperatorMatrix::new(register.clone(), &m + m.adjoint(), true).expect("hermitian by construction")
}

/// Largest violation of the canonical relations over every ordered pair of
/// modes: anticommutators between fermions, commutators otherwise, with the
/// boson diagonal checked below the cutoff and the two-level diagonal through
/// `{σ₋, σ₊} = 1`.
pub fn canonical_defect(register: &Arc<ModeRegister>) -> f64 {
    let id = OperatorMatrix::identity(register);
    let mut worst: f64 = 0.0;
    for (i, mi) in register.modes().iter().enumerate() {
        for (j, mj) in register.modes().iter().enumerate() {
            let ai = annihilation(register, &mi.label).unwrap();
            let aj = annihilation(register, &mj.label).unwrap();
            let aj_dag = creation(register, &mj.label).unwrap();
            let both_fermions = mi.kind == ModeKind::Fermion && mj.kind == ModeKind::Fermion;
            let (mixed, same) = if both_fermions || (i == j && mi.kind == ModeKind::TwoLevel) {
                (ai.anticommutator(&aj_dag).unwrap(), ai.anticommutator(&aj).unwrap())
            } else {
                (ai.commutator(&aj_dag).unwrap(), ai.commutator(&aj).unwrap())
            };
            let mut mixed_defect = if i == j { &mixed - &id } else { mixed };
            if i == j && mi.kind == ModeKind::Boson {
                let below = &id - &occupation_projector(register, &mi.label, mi.cutoff).unwrap();
                mixed_defect = &mixed_defect * &below;
            }
            worst = worst.max(mixed_defect.max_norm()).max(same.max_norm());
        }
    }
    worst
}
