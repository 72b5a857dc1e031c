//! Ladder operators, couplers, coherent states and exact time evolution.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::MaxAbs;
use crate::error::{QwaveError, Result};
use crate::fock::{ModeKind, ModeRegister, StateVector};
use crate::C64;

/// Hermiticity tolerance (max-norm of `M − M†`).
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Dense operator on a register's Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    register: Arc<ModeRegister>,
    elements: DMatrix<C64>,
    hermitian_hint: bool,
}

impl OperatorMatrix {
    pub fn new(register: Arc<ModeRegister>, elements: DMatrix<C64>, hermitian_hint: bool) -> Result<Self> {
        let dim = register.dim();
        if elements.nrows() != dim || elements.ncols() != dim {
            return Err(QwaveError::ShapeMismatch {
                rows: elements.nrows(),
                cols: elements.ncols(),
                dim,
            });
        }
        let op = OperatorMatrix {
            register,
            elements,
            hermitian_hint,
        };
        if hermitian_hint {
            let d = op.hermiticity_defect();
            if d >= HERMITIAN_TOL {
                return Err(QwaveError::NotHermitian(d));
            }
        }
        Ok(op)
    }

    pub(crate) fn from_parts(register: Arc<ModeRegister>, elements: DMatrix<C64>, hermitian_hint: bool) -> Self {
        OperatorMatrix {
            register,
            elements,
            hermitian_hint,
        }
    }

    pub fn identity(register: &Arc<ModeRegister>) -> Self {
        let dim = register.dim();
        Self::from_parts(register.clone(), DMatrix::identity(dim, dim), true)
    }

    pub fn zeros(register: &Arc<ModeRegister>) -> Self {
        let dim = register.dim();
        Self::from_parts(register.clone(), DMatrix::zeros(dim, dim), true)
    }

    /// Diagonal operator with entries `f(basis index)`.
    pub fn diagonal(register: &Arc<ModeRegister>, f: impl Fn(usize) -> C64) -> Self {
        let dim = register.dim();
        let diag = DVector::from_fn(dim, |i, _| f(i));
        let hermitian = diag.iter().all(|z| z.im == 0.0);
        Self::from_parts(register.clone(), DMatrix::from_diagonal(&diag), hermitian)
    }

    pub fn register(&self) -> &Arc<ModeRegister> {
        &self.register
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.elements - self.elements.adjoint()).max_abs()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.register.clone(), self.elements.adjoint(), self.hermitian_hint)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let hermitian = self.hermitian_hint && factor.im == 0.0;
        Self::from_parts(self.register.clone(), &self.elements * factor, hermitian)
    }

    /// Largest absolute matrix element.
    pub fn max_norm(&self) -> f64 {
        self.elements.max_abs()
    }

    fn check_register(&self, other: &OperatorMatrix) -> Result<()> {
        if self.register == other.register {
            Ok(())
        } else {
            Err(QwaveError::RegisterMismatch)
        }
    }

    pub fn try_mul(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_register(other)?;
        Ok(Self::from_parts(
            self.register.clone(),
            &self.elements * &other.elements,
            false,
        ))
    }

    pub fn try_add(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_register(other)?;
        Ok(Self::from_parts(
            self.register.clone(),
            &self.elements + &other.elements,
            self.hermitian_hint && other.hermitian_hint,
        ))
    }

    /// `XY − YX`.
    pub fn commutator(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_register(other)?;
        Ok(Self::from_parts(
            self.register.clone(),
            &self.elements * &other.elements - &other.elements * &self.elements,
            false,
        ))
    }

    /// `XY + YX`.
    pub fn anticommutator(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_register(other)?;
        Ok(Self::from_parts(
            self.register.clone(),
            &self.elements * &other.elements + &other.elements * &self.elements,
            false,
        ))
    }

    /// Matrix-vector product without renormalization.
    pub fn apply_raw(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.elements * v
    }

    /// Applies the operator to a state that must stay normalized (a unitary,
    /// or a projector the state already lies in).
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if **state.register() != *self.register {
            return Err(QwaveError::RegisterMismatch);
        }
        StateVector::new(self.register.clone(), self.apply_raw(state.amplitudes()))
    }

    /// `⟨ψ|M|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<C64> {
        if **state.register() != *self.register {
            return Err(QwaveError::RegisterMismatch);
        }
        Ok(state.amplitudes().dotc(&self.apply_raw(state.amplitudes())))
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    /// # Panics
    /// If the operands live on different registers.
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_mul(rhs).expect("operator product across registers")
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_add(rhs).expect("operator sum across registers")
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_add(&rhs.scale(C64::from(-1.0)))
            .expect("operator difference across registers")
    }
}

/// `(−1)^(number of occupied fermion modes declared before position k)`.
fn jordan_wigner_sign(register: &ModeRegister, index: usize, k: usize) -> f64 {
    let parity = register.modes()[..k]
        .iter()
        .enumerate()
        .filter(|(_, m)| m.kind == ModeKind::Fermion)
        .map(|(l, _)| register.occupation_at(index, l))
        .sum::<usize>();
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Annihilation operator of `mode`.
///
/// Bosons get `√n` matrix elements, two-level modes the lowering operator
/// `|g⟩⟨e|`, and fermions the Jordan-Wigner string over the fermion modes
/// declared earlier. Bosonic and two-level modes never enter a string, so
/// operators of different statistics commute.
pub fn annihilation(register: &Arc<ModeRegister>, mode: &str) -> Result<OperatorMatrix> {
    let k = register.position(mode)?;
    let kind = register.modes()[k].kind;
    let stride = register.stride(k);
    let dim = register.dim();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        let n = register.occupation_at(i, k);
        if n == 0 {
            continue;
        }
        let value = match kind {
            ModeKind::Boson => (n as f64).sqrt(),
            ModeKind::TwoLevel => 1.0,
            ModeKind::Fermion => jordan_wigner_sign(register, i, k),
        };
        m[(i - stride, i)] = C64::from(value);
    }
    Ok(OperatorMatrix::from_parts(register.clone(), m, false))
}

pub fn creation(register: &Arc<ModeRegister>, mode: &str) -> Result<OperatorMatrix> {
    annihilation(register, mode).map(|a| a.adjoint())
}

/// Occupation-number operator `n` of `mode`.
pub fn number(register: &Arc<ModeRegister>, mode: &str) -> Result<OperatorMatrix> {
    let k = register.position(mode)?;
    Ok(OperatorMatrix::diagonal(register, |i| {
        C64::from(register.occupation_at(i, k) as f64)
    }))
}

/// Projector onto occupation `n` of `mode`.
pub fn occupation_projector(register: &Arc<ModeRegister>, mode: &str, n: usize) -> Result<OperatorMatrix> {
    let k = register.position(mode)?;
    Ok(OperatorMatrix::diagonal(register, |i| {
        C64::from(if register.occupation_at(i, k) == n { 1.0 } else { 0.0 })
    }))
}

/// Quadrature `a + a†` of `mode` (Jordan-Wigner signed for fermions).
pub fn quadrature(register: &Arc<ModeRegister>, mode: &str) -> Result<OperatorMatrix> {
    let a = annihilation(register, mode)?;
    let mut q = &a + &a.adjoint();
    q.hermitian_hint = true;
    Ok(q)
}

fn require_kind(register: &ModeRegister, mode: &str, expected: ModeKind) -> Result<()> {
    let spec = register.mode(mode)?;
    if spec.kind != expected {
        return Err(QwaveError::KindMismatch {
            label: mode.to_string(),
            expected: expected.name(),
            found: spec.kind.name(),
        });
    }
    Ok(())
}

fn hermitian_sum(term: OperatorMatrix) -> OperatorMatrix {
    let mut h = &term + &term.adjoint();
    h.hermitian_hint = true;
    h
}

/// `strength · (a† |g⟩⟨e| + a |e⟩⟨g|)` between a boson and a two-level mode.
pub fn swap_coupler(
    register: &Arc<ModeRegister>,
    boson_mode: &str,
    twolevel_mode: &str,
    strength: f64,
) -> Result<OperatorMatrix> {
    require_kind(register, boson_mode, ModeKind::Boson)?;
    require_kind(register, twolevel_mode, ModeKind::TwoLevel)?;
    let a = annihilation(register, boson_mode)?;
    let lower = annihilation(register, twolevel_mode)?;
    Ok(hermitian_sum((&a.adjoint() * &lower).scale(C64::from(strength))))
}

/// Nucleon level stored at occupation 0 of the two-level mode.
pub const PROTON: usize = 0;
/// Nucleon level stored at occupation 1 of the two-level mode.
pub const NEUTRON: usize = 1;

/// `strength · (a_m† |p⟩⟨n| + a_m |n⟩⟨p|)`: a neutron emits the meson and
/// becomes a proton, and the reverse. With `p` at occupation 0 this has the
/// same matrix as [`swap_coupler`].
pub fn nucleon_coupler(
    register: &Arc<ModeRegister>,
    meson_mode: &str,
    nucleon_mode: &str,
    strength: f64,
) -> Result<OperatorMatrix> {
    require_kind(register, meson_mode, ModeKind::Boson)?;
    require_kind(register, nucleon_mode, ModeKind::TwoLevel)?;
    let meson = annihilation(register, meson_mode)?;
    // |p⟩⟨n| lowers occupation 1 → 0
    let n_to_p = annihilation(register, nucleon_mode)?;
    Ok(hermitian_sum((&meson.adjoint() * &n_to_p).scale(C64::from(strength))))
}

/// `strength · (c_γ† c_− c_+ + h.c.)`: an electron and a positron in the
/// same region annihilate into a photon.
pub fn pair_annihilation_coupler(
    register: &Arc<ModeRegister>,
    photon_mode: &str,
    electron_mode: &str,
    positron_mode: &str,
    strength: f64,
) -> Result<OperatorMatrix> {
    require_kind(register, photon_mode, ModeKind::Boson)?;
    require_kind(register, electron_mode, ModeKind::Fermion)?;
    require_kind(register, positron_mode, ModeKind::Fermion)?;
    let photon_up = creation(register, photon_mode)?;
    let electron = annihilation(register, electron_mode)?;
    let positron = annihilation(register, positron_mode)?;
    let term = &(&photon_up * &electron) * &positron;
    Ok(hermitian_sum(term.scale(C64::from(strength))))
}

/// Diagonal kick `e^{iφn}` on `mode`; models a potential step acting on the
/// charge carried by that mode.
pub fn phase_kick(register: &Arc<ModeRegister>, mode: &str, phi: f64) -> Result<OperatorMatrix> {
    let k = register.position(mode)?;
    Ok(OperatorMatrix::diagonal(register, |i| {
        C64::from_polar(1.0, phi * register.occupation_at(i, k) as f64)
    }))
}

/// Max-norm of `XY − YX`.
pub fn commutator_norm(x: &OperatorMatrix, y: &OperatorMatrix) -> Result<f64> {
    x.commutator(y).map(|c| c.max_norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentSpec {
    pub alpha: C64,
    pub mode: String,
    /// Probability mass allowed above the mode cutoff.
    pub cutoff_tail_bound: f64,
}

impl CoherentSpec {
    pub fn new(mode: impl Into<String>, alpha: C64, cutoff_tail_bound: f64) -> Self {
        CoherentSpec {
            alpha,
            mode: mode.into(),
            cutoff_tail_bound,
        }
    }
}

/// `ln n!` for every `n ≤ max`.
fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for n in 1..=max {
        acc += (n as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson weight `e^{−μ} μⁿ / n!`.
fn poisson_weight(mean: f64, n: usize, ln_fact: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-mean + n as f64 * mean.ln() - ln_fact).exp()
}

/// Poisson probability mass strictly above `cutoff`.
pub fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    if (cutoff as f64) < mean {
        let lf = ln_factorials(cutoff);
        let head: f64 = (0..=cutoff).map(|n| poisson_weight(mean, n, lf[n])).sum();
        return (1.0 - head).max(0.0);
    }
    // Summing upward keeps tiny tails accurate.
    let mut n = cutoff + 1;
    let mut ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let mut tail = 0.0;
    loop {
        let term = poisson_weight(mean, n, ln_fact);
        tail += term;
        if term < tail * 1e-17 || term < 1e-320 {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    tail
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n ≤ cutoff`,
/// renormalized after checking the truncated tail against `tail_bound`.
pub fn coherent_amplitudes(alpha: C64, cutoff: usize, tail_bound: f64) -> Result<Vec<C64>> {
    let mean = alpha.norm_sqr();
    let tail = poisson_tail(mean, cutoff);
    if tail > tail_bound {
        return Err(QwaveError::TailBoundExceeded {
            tail,
            bound: tail_bound,
            cutoff,
        });
    }
    let lf = ln_factorials(cutoff);
    let arg = alpha.arg();
    let mut amps: Vec<C64> = (0..=cutoff)
        .map(|n| C64::from_polar(poisson_weight(mean, n, lf[n]).sqrt(), arg * n as f64))
        .collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut amps {
        *z /= norm;
    }
    Ok(amps)
}

/// Coherent state of `spec.mode` with every other mode in vacuum.
pub fn coherent_state(register: &Arc<ModeRegister>, spec: &CoherentSpec) -> Result<StateVector> {
    require_kind(register, &spec.mode, ModeKind::Boson)?;
    let cutoff = register.mode(&spec.mode)?.cutoff;
    let amps = coherent_amplitudes(spec.alpha, cutoff, spec.cutoff_tail_bound)?;
    StateVector::product(register.clone(), &[(spec.mode.as_str(), amps)])
}

/// Eigendecomposition of a hermitian operator, reusable across times.
#[derive(Debug, Clone)]
pub struct Propagator {
    register: Arc<ModeRegister>,
    energies: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl Propagator {
    pub fn new(hamiltonian: &OperatorMatrix) -> Result<Self> {
        let defect = hamiltonian.hermiticity_defect();
        if defect >= HERMITIAN_TOL {
            return Err(QwaveError::NotHermitian(defect));
        }
        let sym = (&hamiltonian.elements + hamiltonian.elements.adjoint()) * C64::from(0.5);
        let eig = sym.symmetric_eigen();
        Ok(Propagator {
            register: hamiltonian.register.clone(),
            energies: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// `e^{−iHt}|ψ⟩`.
    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        if **state.register() != *self.register {
            return Err(QwaveError::RegisterMismatch);
        }
        let mut coeffs = self.eigenvectors.ad_mul(state.amplitudes());
        for (c, &e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= C64::from_polar(1.0, -e * t);
        }
        let out = &self.eigenvectors * coeffs;
        let norm = out.norm_squared();
        debug_assert!((norm - 1.0).abs() < 1e-9, "evolution lost unitarity: {norm}");
        StateVector::new(self.register.clone(), out).map_err(|_| QwaveError::NotNormalized(norm))
    }

    /// `e^{−iHt}` as a matrix.
    pub fn unitary(&self, t: f64) -> OperatorMatrix {
        let phases = DVector::from_iterator(
            self.energies.len(),
            self.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)),
        );
        let scaled = DMatrix::from_fn(self.eigenvectors.nrows(), self.eigenvectors.ncols(), |i, j| {
            self.eigenvectors[(i, j)] * phases[j]
        });
        OperatorMatrix::from_parts(self.register.clone(), scaled * self.eigenvectors.adjoint(), false)
    }
}

/// Exact `e^{−iHt}|ψ⟩` by spectral decomposition.
pub fn evolve(state: &StateVector, hamiltonian: &OperatorMatrix, t: f64) -> Result<StateVector> {
    Propagator::new(hamiltonian)?.evolve(state, t)
}
