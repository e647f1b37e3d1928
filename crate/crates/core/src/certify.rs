//! Variance-based certification of an annealed energy estimate.
//!
//! If the ground-state population deficit `ε²` of the final state is at
//! most 1/2, then `|<H> - E0| <= sqrt(ΔE²)`. A measured energy strictly
//! below `½(Ẽ0 + Ẽ1) - ½(δM0 + δM1)` guarantees `ε² <= ½` for any true
//! levels consistent with the pre-estimate, so the variance becomes a
//! certified error bar. It improves on the pre-estimate when
//! `sqrt(ΔE²) < δM0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measure::EnergyMoments;
use crate::spectra::{self, PreEstimate, Spectrum};
use crate::state::QuantumState;

/// Slack allowed on margins that are zero in exact arithmetic.
pub const MARGIN_TOL: f64 = 1e-12;

/// `½(Ẽ0 + Ẽ1) - ½(δM0 + δM1)`
pub fn threshold(pre: &PreEstimate) -> f64 {
    0.5 * (pre.e0_approx + pre.e1_approx) - 0.5 * (pre.m0 + pre.m1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificationReport {
    pub measured_energy: f64,
    pub measured_variance: f64,
    pub threshold: f64,
    /// `measured_energy < threshold`
    pub variance_is_bound: bool,
    /// `sqrt(ΔE²)`; only a guaranteed bound when `variance_is_bound`.
    pub error_bar: f64,
    /// `variance_is_bound && error_bar < δM0`
    pub improves_preestimate: bool,
    pub shots: Option<u64>,
}

pub fn certify(moments: &EnergyMoments, pre: &PreEstimate) -> CertificationReport {
    let threshold = threshold(pre);
    let variance_is_bound = moments.mean < threshold;
    let error_bar = moments.std_dev();
    CertificationReport {
        measured_energy: moments.mean,
        measured_variance: moments.variance,
        threshold,
        variance_is_bound,
        error_bar,
        improves_preestimate: variance_is_bound && error_bar < pre.m0,
        shots: moments.shots,
    }
}

/// Variance and squared estimation error from eigenbasis populations.
///
/// Both are computed relative to `energies[0]`:
/// error = Σ p_m (E_m - E0), variance = Σ p_m (E_m - E0)² - error².
pub fn variance_and_error(energies: &[f64], populations: &[f64]) -> (f64, f64) {
    let e0 = energies[0];
    let mut first = 0.0;
    let mut second = 0.0;
    for (e, p) in energies.iter().zip(populations).skip(1) {
        let d = e - e0;
        first += p * d;
        second += p * d * d;
    }
    (second - first * first, first * first)
}

/// `(variance, error²)` for `√(1-ε²)|φ0> + ε|φ1>` with level spacing `gap`.
pub fn two_level(epsilon_squared: f64, gap: f64) -> (f64, f64) {
    variance_and_error(&[0.0, gap], &[1.0 - epsilon_squared, epsilon_squared])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremCheck {
    pub trials: usize,
    /// Smallest `ΔE² - error²` over all random trials.
    pub min_margin: f64,
    /// Margin for the two-level state with `ε² = ½` and unit gap.
    pub boundary_margin: f64,
    /// `(variance, error²)` for a two-level state with `ε² = 0.9`.
    pub counterexample: (f64, f64),
}

/// Brute-force check of `ΔE² >= (<H> - E0)²` whenever `ε² <= ½`.
///
/// Each trial draws a spectrum of dimension 2..=16 with energies in
/// [-2, 2] and populations with ground weight in [½, 1].
pub fn verify_theorem1(trials: usize, seed: u64) -> Result<TheoremCheck> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_margin = f64::INFINITY;
    let mut energies = Vec::with_capacity(16);
    let mut populations = Vec::with_capacity(16);
    for _ in 0..trials {
        let dim = rng.random_range(2..=16usize);
        energies.clear();
        energies.extend((0..dim).map(|_| rng.random_range(-2.0..=2.0f64)));
        energies.sort_by(f64::total_cmp);

        let ground = rng.random_range(0.5..=1.0f64);
        populations.clear();
        populations.push(ground);
        let weights: Vec<f64> = (1..dim).map(|_| rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        populations.extend(weights.iter().map(|w| (1.0 - ground) * w / total));

        let (variance, error_sq) = variance_and_error(&energies, &populations);
        let margin = variance - error_sq;
        if margin < -MARGIN_TOL {
            return Err(Error::TheoremViolation(margin));
        }
        min_margin = min_margin.min(margin);
    }
    let (v, e) = two_level(0.5, 1.0);
    let boundary_margin = v - e;
    if boundary_margin.abs() > MARGIN_TOL {
        return Err(Error::TheoremViolation(boundary_margin));
    }
    Ok(TheoremCheck { trials, min_margin, boundary_margin, counterexample: two_level(0.9, 1.0) })
}

/// True unless the state has `<H> <= (E0 + E1)/2` yet `ε² > ½`.
pub fn verify_sufficiency<S: QuantumState + ?Sized>(spectrum: &Spectrum, state: &S) -> Result<bool> {
    let (e0, e1) = spectra::first_gap(spectrum, spectra::DEGENERACY_TOL)?;
    let d = spectra::decompose(state, spectrum)?;
    let below_midpoint = d.mean_energy(spectrum) <= 0.5 * (e0 + e1);
    Ok(!below_midpoint || d.epsilon_squared <= 0.5 + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pre(e0: f64, e1: f64, m0: f64, m1: f64) -> PreEstimate {
        PreEstimate::new(e0, e1, m0, m1).unwrap()
    }

    #[test]
    fn threshold_arithmetic() {
        assert!((threshold(&pre(-1.0, -0.5, 0.05, 0.05)) + 0.8).abs() < 1e-15);
        assert_eq!(threshold(&pre(-1.0, 0.0, 0.0, 0.0)), -0.5);
        assert!((threshold(&pre(-1.0, 0.0, 0.1, 0.1)) + 0.6).abs() < 1e-15);
    }

    #[test]
    fn wide_error_bars_put_threshold_below_ground() {
        // (δM0+δM1)/2 >= (Ẽ1-Ẽ0)/2 puts the threshold at or below Ẽ0
        let p = pre(-1.0, -0.5, 0.25, 0.25);
        assert!(threshold(&p) <= p.e0_approx);
    }

    #[test]
    fn certify_examples() {
        let p = pre(-1.0, -0.5, 0.05, 0.05);
        let r = certify(&EnergyMoments::exact(-0.9, 0.01), &p);
        assert!(r.variance_is_bound);
        assert!((r.error_bar - 0.1).abs() < 1e-15);
        assert!(!r.improves_preestimate);

        let r = certify(&EnergyMoments::exact(-0.75, 1e-4), &p);
        assert!(!r.variance_is_bound);
        assert!(!r.improves_preestimate);

        let r = certify(&EnergyMoments::exact(-0.9, 1e-4), &p);
        assert!(r.improves_preestimate);
    }

    #[test]
    fn boundary_energy_is_not_certified() {
        let p = pre(-1.0, -0.5, 0.05, 0.05);
        let r = certify(&EnergyMoments::exact(threshold(&p), 0.0), &p);
        assert!(!r.variance_is_bound);
    }

    #[test]
    fn two_level_cases() {
        let (v, e) = two_level(0.5, 1.0);
        assert_eq!((v, e), (0.25, 0.25));
        let (v, e) = two_level(0.9, 1.0);
        assert!((v - 0.09).abs() < 1e-15 && (e - 0.81).abs() < 1e-15);
        assert!(v < e);
    }

    #[test]
    fn theorem_small_run() {
        let r = verify_theorem1(1000, 1).unwrap();
        assert!(r.min_margin >= -MARGIN_TOL);
        assert_eq!(r.boundary_margin, 0.0);
        assert!(verify_theorem1(0, 1).is_err());
    }
}
