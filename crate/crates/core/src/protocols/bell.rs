//! Chain of spin-correlation relations on the singlet and the exhaustive
//! local-hidden-variable count.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QwaveError, Result};
use crate::exec::Exec;
use crate::fock::{build_register, ModeRegister, ModeSpec, Site, StateVector};
use crate::measurement::{joint_distribution, sample_indices, spin_direction_measurement, tally};
use crate::protocols::report::ExperimentReport;
use crate::rng::derive_seed;
use crate::C64;

pub const MIN_N: usize = 2;
pub const MAX_N: usize = 8;

/// Direction `θᵢ = iπ/(2N)` from the z axis.
pub fn direction(n: usize, i: usize) -> f64 {
    i as f64 * PI / (2 * n) as f64
}

/// `(A index, B index)` of relation `k`; each asserts `σ_A = −σ_B`.
pub fn relation(k: usize) -> (usize, usize) {
    let m = k / 2;
    if k.is_multiple_of(2) {
        (2 * m, 2 * m + 1)
    } else {
        (2 * m + 2, 2 * m + 1)
    }
}

/// Probability that a single relation holds, `cos²(π/4N)`.
pub fn relation_probability(n: usize) -> f64 {
    (PI / (4 * n) as f64).cos().powi(2)
}

/// `2N(1 − p)`: upper bound on the probability that any relation fails.
pub fn union_bound(n: usize) -> f64 {
    2.0 * n as f64 * (1.0 - relation_probability(n))
}

/// Large-N form of [`union_bound`], `π²/(8N)`.
pub fn union_bound_asymptote(n: usize) -> f64 {
    PI * PI / (8 * n) as f64
}

/// ±1 outcome for every direction of the chain: even `i ≤ 2N` at A, odd `i`
/// at B. The A value at `2N` is the negated value at 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhvStrategy {
    n: usize,
    a: Vec<i8>,
    b: Vec<i8>,
}

impl LhvStrategy {
    /// Strategy number `index < 2^(2N)`: bit `m` sets A at `2m`, bit `N + m`
    /// sets B at `2m + 1`.
    pub fn from_index(n: usize, index: u64) -> Self {
        let bit = |k: usize| if index >> k & 1 == 1 { -1 } else { 1 };
        LhvStrategy {
            n,
            a: (0..n).map(bit).collect(),
            b: (0..n).map(|m| bit(n + m)).collect(),
        }
    }

    pub fn count(n: usize) -> u64 {
        1u64 << (2 * n)
    }

    pub fn value_a(&self, i: usize) -> i8 {
        assert!(i.is_multiple_of(2) && i <= 2 * self.n, "A directions are even i ≤ 2N");
        if i == 2 * self.n {
            -self.a[0]
        } else {
            self.a[i / 2]
        }
    }

    pub fn value_b(&self, i: usize) -> i8 {
        assert!(i % 2 == 1 && i < 2 * self.n, "B directions are odd i < 2N");
        self.b[i / 2]
    }

    /// Number of the `2N` relations this assignment satisfies.
    pub fn satisfied(&self) -> usize {
        (0..2 * self.n)
            .filter(|&k| {
                let (ia, ib) = relation(k);
                self.value_a(ia) == -self.value_b(ib)
            })
            .count()
    }
}

/// Largest number of relations any local assignment satisfies.
pub fn max_satisfiable(n: usize, exec: Exec) -> Result<usize> {
    validate_n(n)?;
    let total = LhvStrategy::count(n) as usize;
    Ok(exec
        .max_range(total, |idx| LhvStrategy::from_index(n, idx as u64).satisfied())
        .unwrap_or(0))
}

fn validate_n(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(QwaveError::NTooLarge(n));
    }
    if n < MIN_N {
        return Err(QwaveError::InvalidParameter {
            name: "n",
            reason: format!("the chain needs N ≥ {MIN_N}, got {n}"),
        });
    }
    Ok(())
}

const SPIN_A: &str = "spin_A";
const SPIN_B: &str = "spin_B";

/// `(|↑↓⟩ − |↓↑⟩)/√2` with `↑` the excited level.
pub fn singlet() -> Result<(Arc<ModeRegister>, StateVector)> {
    let r = build_register(vec![ModeSpec::two_level(SPIN_A, Site::A), ModeSpec::two_level(SPIN_B, Site::B)])?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = nalgebra::DVector::zeros(r.dim());
    v[r.index_of(&[1, 0].into())?] = C64::from(h);
    v[r.index_of(&[0, 1].into())?] = C64::from(-h);
    Ok((r.clone(), StateVector::new(r, v)?))
}

pub fn bell_chain(n: usize, shots: u64, seed: u64) -> Result<ExperimentReport> {
    bell_chain_with(n, shots, seed, Exec::default())
}

pub fn bell_chain_with(n: usize, shots: u64, seed: u64, exec: Exec) -> Result<ExperimentReport> {
    validate_n(n)?;
    let mut report = ExperimentReport::new("bell-chain", seed, shots);
    report.param("n", n);
    let p = relation_probability(n);
    report.exact("p", p);

    let (r, state) = singlet()?;
    for k in 0..2 * n {
        let (ia, ib) = relation(k);
        let ma = spin_direction_measurement(&r, SPIN_A, direction(n, ia))?.named("A");
        let mb = spin_direction_measurement(&r, SPIN_B, direction(n, ib))?.named("B");
        let joint = joint_distribution(&state, &[&ma, &mb])?;
        let opposite = joint.prob_where(|o| o[0] != o[1]);
        let key = format!("relation[{k}].satisfied");
        report.analytic(&key, p);
        report.check_close(&key, opposite, p, 1e-12);
        if shots > 0 {
            let counts = tally(&sample_indices(&joint, shots as usize, derive_seed(seed, k as u64), exec), joint.len());
            let hits: usize = (0..joint.len())
                .filter(|&i| joint.outcome(i)[0] != joint.outcome(i)[1])
                .map(|i| counts[i])
                .sum();
            report.empirical(&key, hits as f64 / shots as f64, shots);
        }
    }

    let lhv_max = max_satisfiable(n, exec)?;
    report.exact("lhv.max_satisfied", lhv_max as f64);
    report.exact("lhv.relations", (2 * n) as f64);
    report.check("lhv.max_satisfied", lhv_max == 2 * n - 1);
    let lhv_average = (2 * n - 1) as f64 / (2 * n) as f64;
    report.exact("lhv.average_bound", lhv_average);
    let bound = union_bound(n);
    report.exact("union_bound", bound);
    report.exact("union_bound_asymptote", union_bound_asymptote(n));
    report.exact("union_bound_ratio", bound / union_bound_asymptote(n));
    if bound < 1.0 {
        report.check("quantum_exceeds_lhv", p > lhv_average);
    }
    Ok(report.finish())
}
