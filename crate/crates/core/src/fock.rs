//! Composite Hilbert space of heterogeneous modes.
//!
//! Basis states are occupation patterns flattened with a mixed-radix code in
//! which the first declared mode is the most significant digit. The same
//! declaration order fixes the Jordan-Wigner string used by
//! [`crate::operators::annihilation`].

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::MaxAbs;
use crate::error::{QwaveError, Result};
use crate::C64;

/// Tolerance on the squared norm of public states.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeKind {
    Boson,
    Fermion,
    /// Two-level system; occupation 0 is the ground state `|g⟩`, 1 is `|e⟩`.
    TwoLevel,
}

impl ModeKind {
    pub fn name(self) -> &'static str {
        match self {
            ModeKind::Boson => "Boson",
            ModeKind::Fermion => "Fermion",
            ModeKind::TwoLevel => "TwoLevel",
        }
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Spatial region a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Site {
    A,
    B,
    O,
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeSpec {
    pub label: String,
    pub kind: ModeKind,
    pub cutoff: usize,
    pub site: Site,
}

impl ModeSpec {
    pub fn new(label: impl Into<String>, kind: ModeKind, cutoff: usize, site: Site) -> Self {
        ModeSpec {
            label: label.into(),
            kind,
            cutoff,
            site,
        }
    }

    pub fn boson(label: impl Into<String>, cutoff: usize, site: Site) -> Self {
        Self::new(label, ModeKind::Boson, cutoff, site)
    }

    pub fn fermion(label: impl Into<String>, site: Site) -> Self {
        Self::new(label, ModeKind::Fermion, 1, site)
    }

    pub fn two_level(label: impl Into<String>, site: Site) -> Self {
        Self::new(label, ModeKind::TwoLevel, 1, site)
    }

    /// Local Hilbert-space dimension, `cutoff + 1`.
    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }
}

/// Occupation numbers, one entry per declared mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OccupationState(pub Vec<usize>);

impl OccupationState {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for OccupationState {
    fn from(v: Vec<usize>) -> Self {
        OccupationState(v)
    }
}

impl<const N: usize> From<[usize; N]> for OccupationState {
    fn from(v: [usize; N]) -> Self {
        OccupationState(v.to_vec())
    }
}

/// Ordered set of modes. The order is never changed after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeRegister {
    modes: Vec<ModeSpec>,
    strides: Vec<usize>,
    dim: usize,
}

impl ModeRegister {
    /// Validates labels and cutoffs and fixes the basis ordering.
    pub fn new(specs: Vec<ModeSpec>) -> Result<Arc<Self>> {
        if specs.is_empty() {
            return Err(QwaveError::EmptyRegister);
        }
        let mut seen = HashSet::new();
        for spec in &specs {
            if !seen.insert(spec.label.as_str()) {
                return Err(QwaveError::DuplicateLabel(spec.label.clone()));
            }
            match spec.kind {
                ModeKind::Fermion | ModeKind::TwoLevel if spec.cutoff != 1 => {
                    return Err(QwaveError::InvalidCutoff {
                        label: spec.label.clone(),
                        cutoff: spec.cutoff,
                        reason: "fermion and two-level modes have cutoff 1",
                    })
                }
                ModeKind::Boson if spec.cutoff == 0 => {
                    return Err(QwaveError::InvalidCutoff {
                        label: spec.label.clone(),
                        cutoff: 0,
                        reason: "boson cutoff must be at least 1",
                    })
                }
                _ => {}
            }
        }
        let mut strides = vec![0; specs.len()];
        let mut dim = 1usize;
        for (k, spec) in specs.iter().enumerate().rev() {
            strides[k] = dim;
            dim = dim
                .checked_mul(spec.dim())
                .ok_or(QwaveError::InvalidParameter {
                    name: "specs",
                    reason: "register dimension overflows usize".into(),
                })?;
        }
        Ok(Arc::new(ModeRegister {
            modes: specs,
            strides,
            dim,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Position of `label` in declaration order.
    pub fn position(&self, label: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| QwaveError::UnknownMode(label.to_string()))
    }

    pub fn mode(&self, label: &str) -> Result<&ModeSpec> {
        self.position(label).map(|k| &self.modes[k])
    }

    pub fn stride(&self, position: usize) -> usize {
        self.strides[position]
    }

    /// Occupation of the mode at `position` in basis state `index`.
    #[inline]
    pub fn occupation_at(&self, index: usize, position: usize) -> usize {
        (index / self.strides[position]) % self.modes[position].dim()
    }

    pub fn index_of(&self, occ: &OccupationState) -> Result<usize> {
        if occ.0.len() != self.modes.len() {
            return Err(QwaveError::OccupationLength {
                expected: self.modes.len(),
                got: occ.0.len(),
            });
        }
        let mut index = 0;
        for ((&n, spec), &stride) in occ.0.iter().zip(&self.modes).zip(&self.strides) {
            if n > spec.cutoff {
                return Err(QwaveError::OccupationOutOfRange {
                    label: spec.label.clone(),
                    value: n,
                    cutoff: spec.cutoff,
                });
            }
            index += n * stride;
        }
        Ok(index)
    }

    pub fn occupation_of(&self, index: usize) -> Result<OccupationState> {
        if index >= self.dim {
            return Err(QwaveError::IndexOutOfRange {
                index,
                dim: self.dim,
            });
        }
        Ok(OccupationState(
            (0..self.modes.len())
                .map(|k| self.occupation_at(index, k))
                .collect(),
        ))
    }

    /// Register made of the listed modes, kept in their original relative order.
    pub fn sub_register(&self, keep: &[&str]) -> Result<(Arc<Self>, Vec<usize>)> {
        let mut positions = keep
            .iter()
            .map(|l| self.position(l))
            .collect::<Result<Vec<_>>>()?;
        positions.sort_unstable();
        positions.dedup();
        let specs = positions.iter().map(|&k| self.modes[k].clone()).collect();
        Ok((ModeRegister::new(specs)?, positions))
    }
}

/// Builds a register from mode declarations.
pub fn build_register(specs: Vec<ModeSpec>) -> Result<Arc<ModeRegister>> {
    ModeRegister::new(specs)
}

fn check_same_register(a: &ModeRegister, b: &ModeRegister) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(QwaveError::RegisterMismatch)
    }
}

/// Normalized pure state over a register's occupation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    register: Arc<ModeRegister>,
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn new(register: Arc<ModeRegister>, amplitudes: DVector<C64>) -> Result<Self> {
        check_len(&register, amplitudes.len())?;
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QwaveError::NotNormalized(norm));
        }
        Ok(StateVector {
            register,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes`; only for explicit preparation or post-selection.
    pub fn from_unnormalized(register: Arc<ModeRegister>, amplitudes: DVector<C64>) -> Result<Self> {
        check_len(&register, amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm < 1e-300 {
            return Err(QwaveError::ZeroNorm);
        }
        Ok(StateVector {
            register,
            amplitudes: amplitudes / C64::from(norm),
        })
    }

    pub fn basis(register: Arc<ModeRegister>, occ: &OccupationState) -> Result<Self> {
        let index = register.index_of(occ)?;
        let mut amplitudes = DVector::zeros(register.dim());
        amplitudes[index] = C64::from(1.0);
        Ok(StateVector {
            register,
            amplitudes,
        })
    }

    pub fn vacuum(register: Arc<ModeRegister>) -> Self {
        let mut amplitudes = DVector::zeros(register.dim());
        amplitudes[0] = C64::from(1.0);
        StateVector {
            register,
            amplitudes,
        }
    }

    /// Product of per-mode amplitude vectors; modes not listed are in vacuum.
    ///
    /// Each factor is normalized independently.
    pub fn product(register: Arc<ModeRegister>, factors: &[(&str, Vec<C64>)]) -> Result<Self> {
        let mut local: Vec<Option<&[C64]>> = vec![None; register.len()];
        for (label, amps) in factors {
            let k = register.position(label)?;
            let spec = &register.modes()[k];
            if amps.len() != spec.dim() {
                return Err(QwaveError::InvalidParameter {
                    name: "factors",
                    reason: format!(
                        "mode `{label}` expects {} amplitudes, got {}",
                        spec.dim(),
                        amps.len()
                    ),
                });
            }
            local[k] = Some(amps);
        }
        let amplitudes = DVector::from_fn(register.dim(), |i, _| {
            local
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    let n = register.occupation_at(i, k);
                    match f {
                        Some(a) => a[n],
                        None if n == 0 => C64::from(1.0),
                        None => C64::from(0.0),
                    }
                })
                .product()
        });
        StateVector::from_unnormalized(register, amplitudes)
    }

    pub fn register(&self) -> &Arc<ModeRegister> {
        &self.register
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, occ: &OccupationState) -> Result<C64> {
        Ok(self.amplitudes[self.register.index_of(occ)?])
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_same_register(&self.register, &other.register)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        self.inner(other).map(|z| z.norm_sqr())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            register: self.register.clone(),
            elements: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

fn check_len(register: &ModeRegister, len: usize) -> Result<()> {
    if len != register.dim() {
        return Err(QwaveError::ShapeMismatch {
            rows: len,
            cols: 1,
            dim: register.dim(),
        });
    }
    Ok(())
}

/// `(|1⟩_a|0⟩_b + e^{iφ}|0⟩_a|1⟩_b)/√2` with every other mode in vacuum.
///
/// Single-particle kets carry no Jordan-Wigner sign, so the same amplitudes
/// serve all three mode kinds.
pub fn prepare_superposition(
    register: &Arc<ModeRegister>,
    mode_a: &str,
    mode_b: &str,
    phi: f64,
) -> Result<StateVector> {
    let ka = register.position(mode_a)?;
    let kb = register.position(mode_b)?;
    if ka == kb {
        return Err(QwaveError::InvalidParameter {
            name: "mode_b",
            reason: "the two branches must use different modes".into(),
        });
    }
    let mut amplitudes = DVector::zeros(register.dim());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    amplitudes[register.stride(ka)] = C64::from(h);
    amplitudes[register.stride(kb)] = C64::from_polar(h, phi);
    Ok(StateVector {
        register: register.clone(),
        amplitudes,
    })
}

/// Density matrix over a (sub-)register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    register: Arc<ModeRegister>,
    elements: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity within `1e-10`.
    pub fn new(register: Arc<ModeRegister>, elements: DMatrix<C64>) -> Result<Self> {
        if elements.nrows() != register.dim() || elements.ncols() != register.dim() {
            return Err(QwaveError::ShapeMismatch {
                rows: elements.nrows(),
                cols: elements.ncols(),
                dim: register.dim(),
            });
        }
        let rho = DensityMatrix { register, elements };
        let herm = rho.hermiticity_defect();
        if herm > 1e-10 {
            return Err(QwaveError::NotHermitian(herm));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(QwaveError::NotNormalized(tr));
        }
        if rho.min_eigenvalue() < -1e-10 {
            return Err(QwaveError::InvalidParameter {
                name: "elements",
                reason: "density matrix has a negative eigenvalue".into(),
            });
        }
        Ok(rho)
    }

    pub fn register(&self) -> &Arc<ModeRegister> {
        &self.register
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn trace(&self) -> f64 {
        self.elements.trace().re
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ_ij |ρ_ij|² for hermitian ρ
        self.elements.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.elements - self.elements.adjoint()).max_abs()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.elements + self.elements.adjoint()) * C64::from(0.5);
        let mut ev: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        check_same_register(&self.register, &other.register)?;
        Ok((&self.elements - &other.elements).max_abs())
    }
}

/// Reduction to a subset of modes.
pub trait PartialTrace {
    /// Traces out every mode not in `keep`. An empty `keep` traces out all
    /// modes and yields the 1×1 matrix holding the trace.
    fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix>;
}

/// Splits every full basis index into (kept index, traced index).
fn split_indices(register: &ModeRegister, kept: &[usize]) -> (Vec<usize>, Vec<usize>, usize, usize) {
    let traced: Vec<usize> = (0..register.len()).filter(|k| !kept.contains(k)).collect();
    let radix = |positions: &[usize], i: usize| {
        positions.iter().fold(0usize, |acc, &k| {
            acc * register.modes()[k].dim() + register.occupation_at(i, k)
        })
    };
    let kdim: usize = kept.iter().map(|&k| register.modes()[k].dim()).product();
    let tdim: usize = traced.iter().map(|&k| register.modes()[k].dim()).product();
    let (ki, ti) = (0..register.dim())
        .map(|i| (radix(kept, i), radix(&traced, i)))
        .unzip();
    (ki, ti, kdim, tdim)
}

fn reduced_register(register: &ModeRegister, keep: &[&str]) -> Result<(Option<Arc<ModeRegister>>, Vec<usize>)> {
    if keep.is_empty() {
        return Ok((None, Vec::new()));
    }
    let (sub, positions) = register.sub_register(keep)?;
    Ok((Some(sub), positions))
}

/// Register standing in for "no modes left": a single one-state placeholder.
fn scalar_register() -> Arc<ModeRegister> {
    // A boson with cutoff 0 is rejected by the public constructor, so build
    // the trivial register by hand.
    Arc::new(ModeRegister {
        modes: Vec::new(),
        strides: Vec::new(),
        dim: 1,
    })
}

impl PartialTrace for StateVector {
    fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let (sub, kept) = reduced_register(&self.register, keep)?;
        let (ki, ti, kdim, tdim) = split_indices(&self.register, &kept);
        // ρ = M M† with M[kept, traced] = ψ
        let mut m = DMatrix::<C64>::zeros(kdim, tdim);
        for (i, amp) in self.amplitudes.iter().enumerate() {
            m[(ki[i], ti[i])] = *amp;
        }
        Ok(DensityMatrix {
            register: sub.unwrap_or_else(scalar_register),
            elements: &m * m.adjoint(),
        })
    }
}

impl PartialTrace for DensityMatrix {
    fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let (sub, kept) = reduced_register(&self.register, keep)?;
        let (ki, ti, kdim, _) = split_indices(&self.register, &kept);
        let mut out = DMatrix::<C64>::zeros(kdim, kdim);
        let dim = self.register.dim();
        for i in 0..dim {
            for j in 0..dim {
                if ti[i] == ti[j] {
                    out[(ki[i], ki[j])] += self.elements[(i, j)];
                }
            }
        }
        Ok(DensityMatrix {
            register: sub.unwrap_or_else(scalar_register),
            elements: out,
        })
    }
}

/// Free-function form of [`PartialTrace::partial_trace`].
pub fn partial_trace<S: PartialTrace>(state: &S, keep: &[&str]) -> Result<DensityMatrix> {
    state.partial_trace(keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn two_site() -> Arc<ModeRegister> {
        build_register(vec![
            ModeSpec::boson("a", 1, Site::A),
            ModeSpec::boson("b", 1, Site::B),
        ])
        .unwrap()
    }

    #[test]
    fn register_dimensions() {
        assert_eq!(two_site().dim(), 4);
        let r = build_register(vec![ModeSpec::boson("a", 3, Site::A)]).unwrap();
        assert_eq!(r.dim(), 4);
        let r = build_register(vec![
            ModeSpec::fermion("a", Site::A),
            ModeSpec::fermion("b", Site::B),
            ModeSpec::fermion("a'", Site::A),
            ModeSpec::fermion("b'", Site::B),
        ])
        .unwrap();
        assert_eq!(r.dim(), 16);
    }

    #[test]
    fn register_errors() {
        let dup = build_register(vec![
            ModeSpec::boson("a", 1, Site::A),
            ModeSpec::fermion("a", Site::B),
        ]);
        assert_eq!(dup, Err(QwaveError::DuplicateLabel("a".into())));
        let bad = build_register(vec![ModeSpec::new("f", ModeKind::Fermion, 2, Site::A)]);
        assert!(matches!(bad, Err(QwaveError::InvalidCutoff { .. })));
        let bad = build_register(vec![ModeSpec::new("q", ModeKind::TwoLevel, 3, Site::A)]);
        assert!(matches!(bad, Err(QwaveError::InvalidCutoff { .. })));
        let bad = build_register(vec![ModeSpec::boson("z", 0, Site::A)]);
        assert!(matches!(bad, Err(QwaveError::InvalidCutoff { .. })));
        assert_eq!(build_register(vec![]), Err(QwaveError::EmptyRegister));
    }

    #[test]
    fn first_mode_is_most_significant() {
        let r = build_register(vec![
            ModeSpec::two_level("p", Site::A),
            ModeSpec::two_level("q", Site::B),
        ])
        .unwrap();
        assert_eq!(r.index_of(&[0, 0].into()).unwrap(), 0);
        assert_eq!(r.index_of(&[1, 0].into()).unwrap(), 2);
        assert_eq!(r.index_of(&[0, 1].into()).unwrap(), 1);
        assert!(matches!(
            r.index_of(&[2, 0].into()),
            Err(QwaveError::OccupationOutOfRange { .. })
        ));
        assert!(matches!(
            r.occupation_of(4),
            Err(QwaveError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn superposition_amplitudes() {
        let r = two_site();
        let s0 = prepare_superposition(&r, "a", "b", 0.0).unwrap();
        assert_abs_diff_eq!(s0.amplitude(&[1, 0].into()).unwrap().re, FRAC_1_SQRT_2);
        assert_abs_diff_eq!(s0.amplitude(&[0, 1].into()).unwrap().re, FRAC_1_SQRT_2);
        let spi = prepare_superposition(&r, "a", "b", PI).unwrap();
        assert_abs_diff_eq!(spi.amplitude(&[0, 1].into()).unwrap().re, -FRAC_1_SQRT_2, epsilon = 1e-15);
        // ⟨ψ(0)|ψ(π/2)⟩ = (1 + i)/2
        let shalf = prepare_superposition(&r, "a", "b", PI / 2.0).unwrap();
        let z = s0.inner(&shalf).unwrap();
        assert_abs_diff_eq!(z.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.5, epsilon = 1e-15);
        assert!(matches!(
            prepare_superposition(&r, "a", "c", 0.0),
            Err(QwaveError::UnknownMode(_))
        ));
    }

    #[test]
    fn reduced_states_of_the_delocalized_particle() {
        let r = two_site();
        for phi in [0.0, 0.3, PI] {
            let rho = prepare_superposition(&r, "a", "b", phi)
                .unwrap()
                .partial_trace(&["b"])
                .unwrap();
            assert_abs_diff_eq!(rho.elements()[(0, 0)].re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(rho.elements()[(1, 1)].re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(rho.elements()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        }
        let product = StateVector::basis(r.clone(), &[1, 0].into()).unwrap();
        let rho = product.partial_trace(&["b"]).unwrap();
        assert_abs_diff_eq!(rho.elements()[(0, 0)].re, 1.0);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_over_everything_is_one() {
        let r = two_site();
        let s = prepare_superposition(&r, "a", "b", 1.0).unwrap();
        let rho = s.partial_trace(&[]).unwrap();
        assert_eq!(rho.elements().shape(), (1, 1));
        assert_abs_diff_eq!(rho.elements()[(0, 0)].re, 1.0, epsilon = 1e-14);
        let rho = s.to_density().partial_trace(&[]).unwrap();
        assert_abs_diff_eq!(rho.elements()[(0, 0)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn density_route_matches_vector_route() {
        let r = build_register(vec![
            ModeSpec::boson("x", 2, Site::A),
            ModeSpec::two_level("y", Site::B),
            ModeSpec::fermion("z", Site::B),
        ])
        .unwrap();
        let amps = DVector::from_fn(r.dim(), |i, _| C64::new((i as f64).sin(), (i as f64 * 0.7).cos()));
        let s = StateVector::from_unnormalized(r, amps).unwrap();
        for keep in [&["x"][..], &["y", "z"], &["z", "x"]] {
            let a = s.partial_trace(keep).unwrap();
            let b = s.to_density().partial_trace(keep).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
            let checked = DensityMatrix::new(a.register().clone(), a.elements().clone()).unwrap();
            assert_abs_diff_eq!(checked.trace(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn product_states() {
        let r = two_site();
        let h = FRAC_1_SQRT_2;
        let s = StateVector::product(r, &[("a", vec![C64::from(h), C64::from(h)])]).unwrap();
        assert_abs_diff_eq!(s.amplitude(&[1, 0].into()).unwrap().re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitude(&[1, 1].into()).unwrap().norm(), 0.0);
    }

    #[test]
    fn unnormalized_inputs_are_rejected() {
        let r = two_site();
        let v = DVector::from_element(4, C64::from(1.0));
        assert!(matches!(
            StateVector::new(r.clone(), v),
            Err(QwaveError::NotNormalized(_))
        ));
        assert_eq!(
            StateVector::from_unnormalized(r, DVector::zeros(4)),
            Err(QwaveError::ZeroNorm)
        );
    }
}
