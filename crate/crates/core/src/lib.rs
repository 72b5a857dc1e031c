//! Exact state-vector simulation of second-quantized registers built from
//! bosonic, fermionic and two-level modes.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`] declares registers, basis indexing, pure states and reduced
//!   density matrices.
//! * [`operators`] builds ladder operators with Jordan-Wigner signs, the
//!   swap-type couplers, coherent states, phase kicks and exact evolution.
//! * [`measurement`] holds projective measurements, Born probabilities,
//!   seeded sampling and post-selection.
//! * [`protocols`] runs the single-particle nonlocality experiments and
//!   returns [`ExperimentReport`]s.
//!
//! Shot sampling and the hidden-variable enumeration run on rayon when the
//! `parallel` feature is enabled (the default); [`Exec`] selects the path at
//! call sites that expose it.

pub mod error;
pub mod exec;
pub mod fock;
pub mod measurement;
pub mod operators;
pub mod protocols;
pub mod rng;

pub use error::{QwaveError, Result};
pub use exec::Exec;
pub use fock::{
    DensityMatrix, ModeKind, ModeRegister, ModeSpec, OccupationState, PartialTrace, Site,
    StateVector,
};
pub use measurement::{JointDistribution, MeasurementSpec, OutcomeDistribution, ShotRecord};
pub use operators::{CoherentSpec, OperatorMatrix, Propagator};
pub use protocols::report::{EmpiricalValue, ExperimentReport, ParamValue};

/// Complex scalar used for every amplitude and matrix element.
pub type C64 = num_complex::Complex64;

/// Largest element modulus.
pub(crate) trait MaxAbs {
    fn max_abs(&self) -> f64;
}

impl<R: nalgebra::Dim, Cc: nalgebra::Dim, S: nalgebra::RawStorage<C64, R, Cc>> MaxAbs
    for nalgebra::Matrix<C64, R, Cc, S>
{
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}
