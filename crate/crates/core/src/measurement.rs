//! Projective measurements, Born probabilities, seeded sampling and
//! post-selection.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::MaxAbs;
use crate::error::{QwaveError, Result};
use crate::exec::Exec;
use crate::fock::{ModeKind, ModeRegister, Site, StateVector};
use crate::operators::{annihilation, commutator_norm, number, occupation_projector, OperatorMatrix};
use crate::rng;
use crate::C64;

/// Tolerance for idempotence, orthogonality, completeness and commutation.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Outcomes below this probability cannot be post-selected.
pub const MIN_POSTSELECT_PROB: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub projector: OperatorMatrix,
}

/// Complete set of orthogonal projectors with outcome labels.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSpec {
    name: String,
    outcomes: Vec<Outcome>,
    site: Option<Site>,
}

impl MeasurementSpec {
    /// Checks idempotence, mutual orthogonality and completeness within
    /// [`PROJECTOR_TOL`].
    pub fn new(name: impl Into<String>, outcomes: Vec<(String, OperatorMatrix)>, site: Option<Site>) -> Result<Self> {
        let name = name.into();
        let invalid = |msg: String| QwaveError::InvalidMeasurement(format!("{name}: {msg}"));
        let first = outcomes.first().ok_or_else(|| invalid("no outcomes".into()))?;
        let register = first.1.register().clone();
        let dim = register.dim();
        let mut sum = DMatrix::<C64>::zeros(dim, dim);
        for (i, (label, p)) in outcomes.iter().enumerate() {
            if **p.register() != *register {
                return Err(QwaveError::RegisterMismatch);
            }
            if outcomes[..i].iter().any(|(l, _)| l == label) {
                return Err(invalid(format!("duplicate outcome `{label}`")));
            }
            let idem = (p.elements() * p.elements() - p.elements()).max_abs();
            if idem > PROJECTOR_TOL {
                return Err(invalid(format!("`{label}` is not idempotent ({idem:e})")));
            }
            for (other, q) in &outcomes[..i] {
                let overlap = (p.elements() * q.elements()).max_abs();
                if overlap > PROJECTOR_TOL {
                    return Err(invalid(format!("`{label}` and `{other}` overlap ({overlap:e})")));
                }
            }
            sum += p.elements();
        }
        let completeness = (sum - DMatrix::<C64>::identity(dim, dim)).max_abs();
        if completeness > PROJECTOR_TOL {
            return Err(invalid(format!("projectors do not sum to identity ({completeness:e})")));
        }
        Ok(MeasurementSpec {
            name,
            outcomes: outcomes
                .into_iter()
                .map(|(label, projector)| Outcome { label, projector })
                .collect(),
            site,
        })
    }

    /// Same measurement under a different name.
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn site(&self) -> Option<Site> {
        self.site
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn labels(&self) -> Vec<&str> {
        self.outcomes.iter().map(|o| o.label.as_str()).collect()
    }

    pub fn register(&self) -> &Arc<ModeRegister> {
        self.outcomes[0].projector.register()
    }

    pub fn outcome(&self, label: &str) -> Result<&Outcome> {
        self.outcomes
            .iter()
            .find(|o| o.label == label)
            .ok_or_else(|| QwaveError::UnknownOutcome(label.to_string()))
    }

    /// Largest commutator between a projector and a single-mode operator
    /// (`n`, `a + a†`, `i(a† − a)`) on any mode outside the tagged site.
    /// `None` when the measurement carries no site.
    pub fn locality_defect(&self) -> Result<Option<f64>> {
        let Some(site) = self.site else {
            return Ok(None);
        };
        let register = self.register();
        let mut worst: f64 = 0.0;
        for mode in register.modes().iter().filter(|m| m.site != site) {
            let a = annihilation(register, &mode.label)?;
            let probes = [
                number(register, &mode.label)?,
                &a + &a.adjoint(),
                (&a.adjoint() - &a).scale(C64::i()),
            ];
            for outcome in &self.outcomes {
                for probe in &probes {
                    worst = worst.max(commutator_norm(&outcome.projector, probe)?);
                }
            }
        }
        Ok(Some(worst))
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if **state.register() != **self.register() {
            Err(QwaveError::RegisterMismatch)
        } else {
            Ok(())
        }
    }
}

/// Outcome probabilities in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub labels: Vec<String>,
    pub probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.probs[i])
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Total-variation distance; both distributions must share labels.
    pub fn tv_distance(&self, other: &OutcomeDistribution) -> f64 {
        debug_assert_eq!(self.labels, other.labels);
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }
}

/// Joint outcome law of several measurements, indexed lexicographically with
/// the first measurement most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub names: Vec<String>,
    pub labels: Vec<Vec<String>>,
    pub probs: Vec<f64>,
}

impl JointDistribution {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Per-measurement outcome indices of joint index `index`.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.labels.len()];
        for (k, labels) in self.labels.iter().enumerate().rev() {
            out[k] = index % labels.len();
            index /= labels.len();
        }
        out
    }

    pub fn outcome(&self, index: usize) -> Vec<&str> {
        self.digits(index)
            .into_iter()
            .enumerate()
            .map(|(k, d)| self.labels[k][d].as_str())
            .collect()
    }

    pub fn index_of(&self, outcome: &[&str]) -> Option<usize> {
        if outcome.len() != self.labels.len() {
            return None;
        }
        outcome.iter().zip(&self.labels).try_fold(0usize, |acc, (o, labels)| {
            labels.iter().position(|l| l == o).map(|d| acc * labels.len() + d)
        })
    }

    pub fn prob(&self, outcome: &[&str]) -> Option<f64> {
        self.index_of(outcome).map(|i| self.probs[i])
    }

    /// Probability of the event selected by `pred` over outcome labels.
    pub fn prob_where(&self, pred: impl Fn(&[&str]) -> bool) -> f64 {
        (0..self.len())
            .filter(|&i| pred(&self.outcome(i)))
            .map(|i| self.probs[i])
            .sum()
    }

    pub fn marginal(&self, k: usize) -> OutcomeDistribution {
        let mut probs = vec![0.0; self.labels[k].len()];
        for (i, p) in self.probs.iter().enumerate() {
            probs[self.digits(i)[k]] += p;
        }
        OutcomeDistribution {
            labels: self.labels[k].clone(),
            probs,
        }
    }

    pub fn tv_distance(&self, other: &JointDistribution) -> f64 {
        debug_assert_eq!(self.labels, other.labels);
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }

    /// Outcome index drawn by cumulative inversion of `u ∈ [0, 1)`.
    pub fn invert(&self, u: f64) -> usize {
        invert_cdf(&self.probs, u)
    }
}

fn invert_cdf(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the accumulated mass
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// One sampled shot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    /// Measurement name → outcome label.
    pub outcome_labels: BTreeMap<String, String>,
    /// Seed of the generator that produced this shot.
    pub pre_measurement_seed: u64,
}

/// Operator acting as `local` on mode `k` and identity elsewhere. No
/// Jordan-Wigner string is attached, so odd fermionic operators must not be
/// built this way.
fn embed_local(register: &Arc<ModeRegister>, k: usize, local: &DMatrix<C64>) -> OperatorMatrix {
    let dim = register.dim();
    let stride = register.stride(k);
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        let n = register.occupation_at(i, k);
        let base = i - n * stride;
        for n2 in 0..local.nrows() {
            let v = local[(n2, n)];
            if v != C64::from(0.0) {
                m[(base + n2 * stride, i)] = v;
            }
        }
    }
    OperatorMatrix::from_parts(register.clone(), m, true)
}

fn complement(register: &Arc<ModeRegister>, parts: &[&OperatorMatrix]) -> OperatorMatrix {
    let mut rest = OperatorMatrix::identity(register).elements().clone();
    for p in parts {
        rest -= p.elements();
    }
    OperatorMatrix::from_parts(register.clone(), rest, true)
}

fn site_name(site: Site) -> &'static str {
    match site {
        Site::A => "A",
        Site::B => "B",
        Site::O => "O",
        Site::Global => "Global",
    }
}

/// Eigenprojectors of `σ(θ) = cos θ σ_z + sin θ σ_x` with `|↑⟩` the excited
/// level; outcomes `+1` and `-1`.
pub fn spin_direction_measurement(register: &Arc<ModeRegister>, twolevel_mode: &str, theta: f64) -> Result<MeasurementSpec> {
    let k = register.position(twolevel_mode)?;
    let spec = &register.modes()[k];
    if spec.kind != ModeKind::TwoLevel {
        return Err(QwaveError::KindMismatch {
            label: twolevel_mode.to_string(),
            expected: ModeKind::TwoLevel.name(),
            found: spec.kind.name(),
        });
    }
    let (s, c) = (theta / 2.0).sin_cos();
    // basis order (|↓⟩, |↑⟩) = occupation (0, 1)
    let up = [s, c];
    let down = [c, -s];
    let outer = |v: [f64; 2]| DMatrix::from_fn(2, 2, |i, j| C64::from(v[i] * v[j]));
    MeasurementSpec::new(
        twolevel_mode,
        vec![
            ("+1".into(), embed_local(register, k, &outer(up))),
            ("-1".into(), embed_local(register, k, &outer(down))),
        ],
        Some(spec.site),
    )
}

/// Projectors onto one particle at the site in `(|10⟩ ± |01⟩)/√2` of the
/// mode pair, plus `other` (zero or two particles there).
///
/// The projectors are built as `A±† Π₀ A±` from the signed ladder operators,
/// with `A± = (a₁ ± a₂)/√2` and `Π₀` the empty-pair projector. They are
/// even in the fermion operators and therefore independent of mode ordering.
pub fn plus_minus_basis(register: &Arc<ModeRegister>, mode1: &str, mode2: &str) -> Result<MeasurementSpec> {
    let m1 = register.mode(mode1)?;
    let m2 = register.mode(mode2)?;
    if m1.site != m2.site {
        return Err(QwaveError::SiteMismatch {
            first: mode1.to_string(),
            second: mode2.to_string(),
        });
    }
    for m in [m1, m2] {
        if m.cutoff != 1 {
            return Err(QwaveError::InvalidCutoff {
                label: m.label.clone(),
                cutoff: m.cutoff,
                reason: "plus/minus basis needs cutoff-1 modes",
            });
        }
    }
    let site = m1.site;
    let a1 = annihilation(register, mode1)?;
    let a2 = annihilation(register, mode2)?;
    let empty = &occupation_projector(register, mode1, 0)? * &occupation_projector(register, mode2, 0)?;
    let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    let build = |sign: f64| {
        let lower = (&a1 + &a2.scale(C64::from(sign))).scale(h);
        let mut p = &(&lower.adjoint() * &empty) * &lower;
        p = OperatorMatrix::from_parts(register.clone(), p.elements().clone(), true);
        p
    };
    let plus = build(1.0);
    let minus = build(-1.0);
    let other = complement(register, &[&plus, &minus]);
    MeasurementSpec::new(
        site_name(site),
        vec![("+".into(), plus), ("-".into(), minus), ("other".into(), other)],
        Some(site),
    )
}

/// Projectors onto `(|0⟩ ± |1⟩)/√2` of `mode`, plus `other` for occupations
/// of two or more (omitted for cutoff-1 modes).
///
/// The off-diagonal part is `Π₀a + a†Π₀` with the signed ladder operator, so
/// on a fermion mode this is the eigenbasis of the quadrature `a + a†`.
pub fn vacuum_one_superposition_basis(register: &Arc<ModeRegister>, mode: &str) -> Result<MeasurementSpec> {
    let spec = register.mode(mode)?.clone();
    let a = annihilation(register, mode)?;
    let p0 = occupation_projector(register, mode, 0)?;
    let p1 = occupation_projector(register, mode, 1)?;
    let hop = &(&p0 * &a) + &(&a.adjoint() * &p0);
    let diag = &p0 + &p1;
    let build = |sign: f64| {
        let p = (&diag + &hop.scale(C64::from(sign))).scale(C64::from(0.5));
        OperatorMatrix::from_parts(register.clone(), p.elements().clone(), true)
    };
    let plus = build(1.0);
    let minus = build(-1.0);
    let mut outcomes = Vec::with_capacity(3);
    if spec.cutoff > 1 {
        let other = complement(register, &[&plus, &minus]);
        outcomes.push(("+".into(), plus));
        outcomes.push(("-".into(), minus));
        outcomes.push(("other".into(), other));
    } else {
        outcomes.push(("+".into(), plus));
        outcomes.push(("-".into(), minus));
    }
    MeasurementSpec::new(mode, outcomes, Some(spec.site))
}

/// Eigenbasis of the quadrature `a + a†` of a cutoff-1 mode.
pub fn quadrature_measurement(register: &Arc<ModeRegister>, mode: &str) -> Result<MeasurementSpec> {
    let spec = register.mode(mode)?;
    if spec.cutoff != 1 {
        return Err(QwaveError::InvalidCutoff {
            label: spec.label.clone(),
            cutoff: spec.cutoff,
            reason: "quadrature eigenbasis needs a cutoff-1 mode",
        });
    }
    vacuum_one_superposition_basis(register, mode)
}

/// `found` (at least one quantum in `mode`) or `empty`.
pub fn occupation_measurement(register: &Arc<ModeRegister>, mode: &str) -> Result<MeasurementSpec> {
    let site = register.mode(mode)?.site;
    let empty = occupation_projector(register, mode, 0)?;
    let found = complement(register, &[&empty]);
    MeasurementSpec::new(mode, vec![("found".into(), found), ("empty".into(), empty)], Some(site))
}

/// `none` when every listed mode is empty, `some` otherwise.
pub fn vacuum_test(register: &Arc<ModeRegister>, modes: &[&str], name: &str) -> Result<MeasurementSpec> {
    let positions = modes.iter().map(|m| register.position(m)).collect::<Result<Vec<_>>>()?;
    let none = OperatorMatrix::diagonal(register, |i| {
        let empty = positions.iter().all(|&k| register.occupation_at(i, k) == 0);
        C64::from(if empty { 1.0 } else { 0.0 })
    });
    let some = complement(register, &[&none]);
    MeasurementSpec::new(name, vec![("none".into(), none), ("some".into(), some)], None)
}

/// Single outcome `all`.
pub fn trivial_measurement(register: &Arc<ModeRegister>) -> Result<MeasurementSpec> {
    MeasurementSpec::new("all", vec![("all".into(), OperatorMatrix::identity(register))], None)
}

/// `⟨ψ|P|ψ⟩` for every outcome, computed as `‖Pψ‖²`.
pub fn born_probabilities(state: &StateVector, spec: &MeasurementSpec) -> Result<OutcomeDistribution> {
    spec.check_state(state)?;
    let probs = spec
        .outcomes
        .iter()
        .map(|o| o.projector.apply_raw(state.amplitudes()).norm_squared())
        .collect();
    Ok(OutcomeDistribution {
        labels: spec.outcomes.iter().map(|o| o.label.clone()).collect(),
        probs,
    })
}

/// Projects onto `outcome` and renormalizes. Returns the state and the Born
/// probability of the outcome.
pub fn post_select(state: &StateVector, spec: &MeasurementSpec, outcome: &str) -> Result<(StateVector, f64)> {
    spec.check_state(state)?;
    let o = spec.outcome(outcome)?;
    let projected = o.projector.apply_raw(state.amplitudes());
    let probability = projected.norm_squared();
    if probability < MIN_POSTSELECT_PROB {
        return Err(QwaveError::ImpossibleOutcome {
            outcome: outcome.to_string(),
            probability,
        });
    }
    Ok((StateVector::from_unnormalized(state.register().clone(), projected)?, probability))
}

/// Total-variation distance between `receiver`'s outcome law on `state` and
/// on the ensemble left by a non-selective `sender` measurement.
pub fn signaling_distance(state: &StateVector, sender: &MeasurementSpec, receiver: &MeasurementSpec) -> Result<f64> {
    sender.check_state(state)?;
    let before = born_probabilities(state, receiver)?;
    let mut after = vec![0.0; receiver.outcomes.len()];
    for s in &sender.outcomes {
        let branch = s.projector.apply_raw(state.amplitudes());
        for (acc, r) in after.iter_mut().zip(&receiver.outcomes) {
            *acc += r.projector.apply_raw(&branch).norm_squared();
        }
    }
    let after = OutcomeDistribution {
        labels: before.labels.clone(),
        probs: after,
    };
    Ok(before.tv_distance(&after))
}

fn check_commuting(specs: &[&MeasurementSpec]) -> Result<()> {
    for (i, a) in specs.iter().enumerate() {
        for b in &specs[i + 1..] {
            for pa in &a.outcomes {
                for pb in &b.outcomes {
                    if commutator_norm(&pa.projector, &pb.projector)? >= PROJECTOR_TOL {
                        return Err(QwaveError::NonCommutingSpecs(a.name.clone(), b.name.clone()));
                    }
                }
            }
        }
    }
    Ok(())
}

fn empty_joint(specs: &[&MeasurementSpec]) -> JointDistribution {
    JointDistribution {
        names: specs.iter().map(|s| s.name.clone()).collect(),
        labels: specs
            .iter()
            .map(|s| s.outcomes.iter().map(|o| o.label.clone()).collect())
            .collect(),
        probs: Vec::new(),
    }
}

fn chain_probs(v: &DVector<C64>, specs: &[&MeasurementSpec], out: &mut Vec<f64>) {
    match specs.split_first() {
        None => out.push(v.norm_squared()),
        Some((first, rest)) => {
            for o in &first.outcomes {
                chain_probs(&o.projector.apply_raw(v), rest, out);
            }
        }
    }
}

/// Joint Born law `‖P_k ⋯ P_1 ψ‖²` of mutually commuting measurements.
pub fn joint_distribution(state: &StateVector, specs: &[&MeasurementSpec]) -> Result<JointDistribution> {
    for s in specs {
        s.check_state(state)?;
    }
    check_commuting(specs)?;
    let mut joint = empty_joint(specs);
    chain_probs(state.amplitudes(), specs, &mut joint.probs);
    Ok(joint)
}

fn record(joint: &JointDistribution, index: usize, seed: u64) -> ShotRecord {
    ShotRecord {
        outcome_labels: joint
            .names
            .iter()
            .cloned()
            .zip(joint.outcome(index).into_iter().map(String::from))
            .collect(),
        pre_measurement_seed: seed,
    }
}

/// Joint outcome indices for `shots` independent draws. Shot `k` uses stream
/// `k` of `seed`, so the result does not depend on `exec`.
pub fn sample_indices(joint: &JointDistribution, shots: usize, seed: u64, exec: Exec) -> Vec<usize> {
    exec.map_range(shots, |k| {
        let u: f64 = rng::stream_rng(seed, k as u64).random();
        joint.invert(u)
    })
}

/// Counts of each joint outcome index.
pub fn tally(indices: &[usize], outcomes: usize) -> Vec<usize> {
    let mut counts = vec![0; outcomes];
    for &i in indices {
        counts[i] += 1;
    }
    counts
}

/// `shots` draws from the joint law of commuting measurements.
pub fn sample(state: &StateVector, specs: &[&MeasurementSpec], shots: usize, seed: u64) -> Result<Vec<ShotRecord>> {
    sample_with(state, specs, shots, seed, Exec::default())
}

pub fn sample_with(
    state: &StateVector,
    specs: &[&MeasurementSpec],
    shots: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<ShotRecord>> {
    let joint = joint_distribution(state, specs)?;
    let indices = sample_indices(&joint, shots, seed, exec);
    Ok(indices
        .into_iter()
        .enumerate()
        .map(|(k, i)| record(&joint, i, rng::derive_seed(seed, k as u64)))
        .collect())
}

/// Conditional outcome tree of a measurement sequence with collapse after
/// every step.
struct CollapseNode {
    probs: Vec<f64>,
    children: Vec<Option<usize>>,
}

fn build_tree(state: &StateVector, specs: &[&MeasurementSpec], nodes: &mut Vec<CollapseNode>) -> Result<usize> {
    let (first, rest) = specs.split_first().expect("non-empty measurement sequence");
    let dist = born_probabilities(state, first)?;
    let id = nodes.len();
    nodes.push(CollapseNode {
        probs: dist.probs.clone(),
        children: vec![None; dist.probs.len()],
    });
    if !rest.is_empty() {
        for (i, o) in first.outcomes.iter().enumerate() {
            if dist.probs[i] < MIN_POSTSELECT_PROB {
                continue;
            }
            let (collapsed, _) = post_select(state, first, &o.label)?;
            let child = build_tree(&collapsed, rest, nodes)?;
            nodes[id].children[i] = Some(child);
        }
    }
    Ok(id)
}

/// Measures `specs` one after another, collapsing the state between steps.
/// The measurements need not commute; each shot draws one uniform per step
/// from its own stream.
pub fn sample_sequential(
    state: &StateVector,
    specs: &[&MeasurementSpec],
    shots: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<ShotRecord>> {
    for s in specs {
        s.check_state(state)?;
    }
    if specs.is_empty() || shots == 0 {
        return Ok(Vec::new());
    }
    let mut nodes = Vec::new();
    build_tree(state, specs, &mut nodes)?;
    let joint = empty_joint(specs);
    Ok(exec.map_range(shots, |k| {
        let shot_seed = rng::derive_seed(seed, k as u64);
        let mut r = rng::stream_rng(seed, k as u64);
        let mut node = Some(0);
        let mut index = 0;
        for labels in &joint.labels {
            let n = &nodes[node.expect("tree covers every reachable outcome")];
            let pick = invert_cdf(&n.probs, r.random());
            index = index * labels.len() + pick;
            node = n.children[pick];
        }
        record(&joint, index, shot_seed)
    }))
}

/// Empirical frequency of each joint outcome in `records`.
pub fn frequencies(joint: &JointDistribution, records: &[ShotRecord]) -> Vec<f64> {
    let mut counts = vec![0usize; joint.len().max(1)];
    for r in records {
        let outcome: Vec<&str> = joint.names.iter().map(|n| r.outcome_labels[n].as_str()).collect();
        if let Some(i) = joint.index_of(&outcome) {
            counts[i] += 1;
        }
    }
    counts.iter().map(|&c| c as f64 / records.len().max(1) as f64).collect()
}
