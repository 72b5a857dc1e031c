//! Two-level atom driven by a coherent field through the swap coupling.

use std::f64::consts::FRAC_PI_2;

use crate::error::{QwaveError, Result};
use crate::exec::Exec;
use crate::fock::{build_register, ModeSpec, Site, StateVector};
use crate::operators::{coherent_amplitudes, number, swap_coupler, Propagator};
use crate::protocols::report::ExperimentReport;
use crate::C64;

/// Poisson mass allowed above the field cutoff.
pub const RABI_TAIL_BOUND: f64 = 1e-6;
/// Grid points used for the maximum deviation over a quarter period.
pub const DEVIATION_GRID: usize = 401;

const FIELD: &str = "field";
const ATOM: &str = "atom";

/// `points` evenly spaced times over `[0, π/(2|α|)]`.
pub fn rabi_time_grid(alpha: C64, points: usize) -> Vec<f64> {
    let end = FRAC_PI_2 / alpha.norm();
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|k| end * k as f64 / (points - 1) as f64).collect(),
    }
}

/// Large-amplitude prediction `sin²(|α|t)`.
pub fn semiclassical_excitation(alpha: C64, t: f64) -> f64 {
    (alpha.norm() * t).sin().powi(2)
}

/// Exact excited population at each time.
pub fn excited_population(alpha: C64, cutoff: usize, times: &[f64]) -> Result<Vec<f64>> {
    let r = build_register(vec![ModeSpec::boson(FIELD, cutoff, Site::A), ModeSpec::two_level(ATOM, Site::A)])?;
    let field = coherent_amplitudes(alpha, cutoff, RABI_TAIL_BOUND)?;
    let initial = StateVector::product(r.clone(), &[(FIELD, field)])?;
    let propagator = Propagator::new(&swap_coupler(&r, FIELD, ATOM, 1.0)?)?;
    let n_atom = number(&r, ATOM)?;
    let values = Exec::default().map_range(times.len(), |k| {
        propagator
            .evolve(&initial, times[k])
            .and_then(|s| n_atom.expectation(&s))
            .map(|z| z.re)
    });
    values.into_iter().collect()
}

pub fn rabi_rotation(alpha: C64, cutoff: usize, times: &[f64]) -> Result<ExperimentReport> {
    if alpha.norm() == 0.0 || !alpha.norm().is_finite() {
        return Err(QwaveError::InvalidParameter {
            name: "alpha",
            reason: "field amplitude must be nonzero and finite".into(),
        });
    }
    let mut report = ExperimentReport::new("rabi", 0, 0);
    report.param("alpha", alpha.norm());
    report.phase_param("alpha_phase", alpha.arg());
    report.param("cutoff", cutoff);
    report.param("times", times.to_vec());

    let grid = rabi_time_grid(alpha, DEVIATION_GRID);
    let mut all_times = times.to_vec();
    all_times.extend_from_slice(&grid);
    let exact = excited_population(alpha, cutoff, &all_times)?;
    let (at_times, on_grid) = exact.split_at(times.len());

    for (k, (&t, &p)) in times.iter().zip(at_times).enumerate() {
        report.exact(&format!("semiclassical.P_e[{k}]"), semiclassical_excitation(alpha, t));
        report.exact(&format!("exact.P_e[{k}]"), p);
        if t == 0.0 {
            report.check_close("P_e(0)", p, 0.0, 1e-12);
        }
    }
    let max_dev = grid
        .iter()
        .zip(on_grid)
        .map(|(&t, &p)| (p - semiclassical_excitation(alpha, t)).abs())
        .fold(0.0, f64::max);
    report.exact("max_deviation", max_dev);
    report.exact("quarter_period", FRAC_PI_2 / alpha.norm());
    report.exact("exact.P_e(quarter_period)", on_grid[on_grid.len() - 1]);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Sector-wise closed form `Σ pₙ sin²(√n t)`.
    fn sector_sum(alpha: f64, t: f64) -> f64 {
        let mean = alpha * alpha;
        let mut weight = (-mean).exp();
        let mut total = 0.0;
        for n in 0..400 {
            if n > 0 {
                weight *= mean / n as f64;
            }
            total += weight * ((n as f64).sqrt() * t).sin().powi(2);
        }
        total
    }

    #[test]
    fn exact_matches_sector_sum() {
        let times = [0.0, 0.1, 0.3, 0.7];
        let p = excited_population(C64::from(2.0), 30, &times).unwrap();
        for (&t, &v) in times.iter().zip(&p) {
            assert_abs_diff_eq!(v, sector_sum(2.0, t), epsilon = 1e-8);
        }
    }

    #[test]
    fn phase_of_alpha_is_irrelevant() {
        let t = [0.25];
        let a = excited_population(C64::from(2.0), 30, &t).unwrap();
        let b = excited_population(C64::from_polar(2.0, 1.3), 30, &t).unwrap();
        assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-10);
    }

    #[test]
    fn grid_and_errors() {
        let g = rabi_time_grid(C64::from(2.0), 3);
        assert_eq!(g.len(), 3);
        assert_abs_diff_eq!(g[2], FRAC_PI_2 / 2.0);
        assert!(matches!(rabi_rotation(C64::from(0.0), 10, &[0.0]), Err(QwaveError::InvalidParameter { .. })));
        assert!(matches!(
            rabi_rotation(C64::from(10.0), 60, &[0.0]),
            Err(QwaveError::TailBoundExceeded { .. })
        ));
    }

    #[test]
    fn report_starts_in_ground_state() {
        let r = rabi_rotation(C64::from(2.0), 30, &[0.0, 0.5]).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!(r.get("exact.P_e[0]"), Some(0.0));
        assert_abs_diff_eq!(r.get("max_deviation").unwrap(), 0.147, epsilon = 2e-3);
    }
}
