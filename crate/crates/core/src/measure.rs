//! Energy mean and variance of a state, computed term by term from the
//! Pauli decomposition of `H` and of the symbolically expanded `H²`.
//!
//! `sample_moments` models repeated single-qubit measurements: each
//! non-identity Pauli term is measured `shots_per_term` times on a fresh
//! copy of the state. Outcome counts are drawn from the exact binomial law
//! using ChaCha8, one independent stream per term index, so results depend
//! only on the seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::pauli::PauliHamiltonian;
use crate::state::QuantumState;

/// Exact variances down to this value are rounding noise and clamped to 0.
pub const VARIANCE_CLAMP: f64 = -1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyMoments {
    /// `<H>` in GHz.
    pub mean: f64,
    /// `<H²> - <H>²` in GHz².
    pub variance: f64,
    /// Shots per Pauli term; `None` for exact moments.
    pub shots: Option<u64>,
    /// Standard error of the sampled mean.
    pub std_error: Option<f64>,
}

impl EnergyMoments {
    pub fn exact(mean: f64, variance: f64) -> Self {
        Self { mean, variance, shots: None, std_error: None }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.max(0.0).sqrt()
    }
}

fn check_dim<S: QuantumState + ?Sized>(state: &S, h: &PauliHamiltonian) -> Result<()> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: state.dim() });
    }
    Ok(())
}

/// `Σ_j c_j <P_j>`
pub fn expectation<S: QuantumState + ?Sized>(state: &S, h: &PauliHamiltonian) -> Result<f64> {
    check_dim(state, h)?;
    Ok(h.terms().iter().map(|t| t.coefficient * state.pauli_expectation(&t.string)).sum())
}

/// A Hamiltonian together with its cached expansion of `H²`.
#[derive(Clone, Debug)]
pub struct EnergyObservable {
    h: PauliHamiltonian,
    h_squared: PauliHamiltonian,
}

impl EnergyObservable {
    pub fn new(h: PauliHamiltonian) -> Result<Self> {
        let h_squared = h.square()?;
        Ok(Self { h, h_squared })
    }

    pub fn hamiltonian(&self) -> &PauliHamiltonian {
        &self.h
    }

    pub fn squared(&self) -> &PauliHamiltonian {
        &self.h_squared
    }

    pub fn moments<S: QuantumState + ?Sized>(&self, state: &S) -> Result<EnergyMoments> {
        let mean = expectation(state, &self.h)?;
        let second = expectation(state, &self.h_squared)?;
        let variance = second - mean * mean;
        if variance < VARIANCE_CLAMP {
            return Err(Error::NotPositive(variance));
        }
        Ok(EnergyMoments::exact(mean, variance.max(0.0)))
    }

    pub fn sample<S: QuantumState + ?Sized>(
        &self,
        state: &S,
        shots_per_term: u64,
        seed: u64,
    ) -> Result<EnergyMoments> {
        check_dim(state, &self.h)?;
        if shots_per_term == 0 {
            return Err(Error::InvalidConfig("shots per term must be >= 1".into()));
        }
        let mut stream = 0u64;
        let mut estimate = |h: &PauliHamiltonian| -> Result<(f64, f64)> {
            let mut total = 0.0;
            let mut err_sq = 0.0;
            for t in h.terms() {
                let id = stream;
                stream += 1;
                if t.string.is_identity() {
                    total += t.coefficient;
                    continue;
                }
                let avg = sample_term(state.pauli_expectation(&t.string), shots_per_term, seed, id)?;
                total += t.coefficient * avg;
                err_sq += t.coefficient * t.coefficient * (1.0 - avg * avg).max(0.0) / shots_per_term as f64;
            }
            Ok((total, err_sq))
        };
        let (mean, mean_err_sq) = estimate(&self.h)?;
        let (second, _) = estimate(&self.h_squared)?;
        Ok(EnergyMoments {
            mean,
            variance: (second - mean * mean).max(0.0),
            shots: Some(shots_per_term),
            std_error: Some(mean_err_sq.sqrt()),
        })
    }
}

/// Average of `shots` ±1 outcomes whose mean is `expected`.
fn sample_term(expected: f64, shots: u64, seed: u64, stream: u64) -> Result<f64> {
    let p_plus = ((1.0 + expected) / 2.0).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let plus = Binomial::new(shots, p_plus)
        .map_err(|e| Error::InvalidConfig(format!("binomial sampler: {e}")))?
        .sample(&mut rng);
    Ok((2.0 * plus as f64 - shots as f64) / shots as f64)
}

/// Exact moments; expands `H²` on every call (see [`EnergyObservable`] to cache it).
pub fn energy_moments<S: QuantumState + ?Sized>(state: &S, h: &PauliHamiltonian) -> Result<EnergyMoments> {
    EnergyObservable::new(h.clone())?.moments(state)
}

pub fn sample_moments<S: QuantumState + ?Sized>(
    state: &S,
    h: &PauliHamiltonian,
    shots_per_term: u64,
    seed: u64,
) -> Result<EnergyMoments> {
    EnergyObservable::new(h.clone())?.sample(state, shots_per_term, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{default_driver, plus_state};
    use crate::linalg::C64;
    use crate::state::{DensityMatrix, StateVector};

    #[test]
    fn basis_state_z() {
        let h = PauliHamiltonian::parse("1.0 Z0").unwrap();
        assert_eq!(expectation(&StateVector::basis(1, 0), &h).unwrap(), 1.0);
        assert_eq!(expectation(&StateVector::basis(1, 1), &h).unwrap(), -1.0);
    }

    #[test]
    fn plus_state_driver() {
        for n in 1..=4 {
            let e = expectation(&plus_state(n), &default_driver(n)).unwrap();
            assert!((e + n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn two_level_superposition() {
        // H = (1 - Z)/2 has E0 = 0 on |0>, E1 = 1 on |1>.
        let h = PauliHamiltonian::parse("0.5\n-0.5 Z0").unwrap();
        let psi = StateVector::new(vec![C64::new(0.75f64.sqrt(), 0.0), C64::new(0.5, 0.0)]).unwrap();
        let m = energy_moments(&psi, &h).unwrap();
        assert!((m.mean - 0.25).abs() < 1e-15);
        assert!((m.variance - 0.1875).abs() < 1e-15);
        assert_eq!(m.shots, None);
        assert_eq!(m.std_error, None);
    }

    #[test]
    fn dimension_mismatch() {
        let h = PauliHamiltonian::parse("1.0 Z1").unwrap();
        assert!(expectation(&plus_state(1), &h).is_err());
        assert!(energy_moments(&DensityMatrix::maximally_mixed(3), &h).is_err());
    }

    #[test]
    fn sampling_all_z_on_basis_state_is_exact() {
        let h = PauliHamiltonian::parse("0.3 Z0\n-0.7 Z0 Z1\n0.2 Z1\n0.1").unwrap();
        let psi = StateVector::basis(2, 0b10);
        let exact = energy_moments(&psi, &h).unwrap();
        for shots in [1, 7, 1000] {
            let s = sample_moments(&psi, &h, shots, 3).unwrap();
            assert!((s.mean - exact.mean).abs() < 1e-15);
            assert!(s.variance.abs() < 1e-12);
            assert_eq!(s.std_error, Some(0.0));
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let h = PauliHamiltonian::parse("0.3 X0\n-0.7 Y0 Z1\n0.2 Z1").unwrap();
        let psi = plus_state(2);
        let a = sample_moments(&psi, &h, 500, 11).unwrap();
        let b = sample_moments(&psi, &h, 500, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        let c = sample_moments(&psi, &h, 500, 12).unwrap();
        assert_ne!(a, c);
        assert!(sample_moments(&psi, &h, 0, 1).is_err());
    }
}
