//! Pure and mixed states on `n` qubits.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, C64};
use crate::pauli::PauliString;

/// Tolerance on `‖ψ‖ = 1` and `tr ρ = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// Shared view of a state for measurement and spectral decomposition.
pub trait QuantumState {
    fn dim(&self) -> usize;

    /// `<P>` for a Pauli string (real for Hermitian `P`).
    fn pauli_expectation(&self, p: &PauliString) -> f64;

    /// `<v|ρ|v>` for a unit vector `v`.
    fn population(&self, v: &[C64]) -> f64;
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes, checking the length is a power of two and the norm is 1.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        check_power_of_two(amplitudes.len())?;
        let n = linalg::norm(&amplitudes);
        if (n - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NormDrift(n - 1.0));
        }
        Ok(Self { amplitudes })
    }

    /// Scales to unit norm; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        check_power_of_two(amplitudes.len())?;
        let n = linalg::norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NormDrift(f64::NAN));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(Self { amplitudes })
    }

    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![linalg::ZERO; 1 << num_qubits];
        amplitudes[index] = linalg::ONE;
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn overlap(&self, other: &StateVector) -> C64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.overlap(other).norm_sqr()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { entries: Matrix::projector(&self.amplitudes) }
    }
}

impl QuantumState for StateVector {
    fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    fn pauli_expectation(&self, p: &PauliString) -> f64 {
        // <ψ|P|ψ> = Σ_b conj(ψ[b']) phase(b) ψ[b] with P|b> = phase(b)|b'>
        let mut acc = C64::new(0.0, 0.0);
        for (b, &amp) in self.amplitudes.iter().enumerate() {
            let (target, ph) = p.apply(b);
            acc += self.amplitudes[target].conj() * ph * amp;
        }
        acc.re
    }

    fn population(&self, v: &[C64]) -> f64 {
        linalg::inner(v, &self.amplitudes).norm_sqr()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: Matrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity and unit trace to 1e-8.
    pub fn new(entries: Matrix) -> Result<Self> {
        check_power_of_two(entries.dim())?;
        let defect = entries.hermiticity_defect();
        if defect > NORMALIZATION_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > NORMALIZATION_TOL || tr.im.abs() > NORMALIZATION_TOL {
            return Err(Error::TraceDrift(tr.re - 1.0));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_raw(entries: Matrix) -> Self {
        Self { entries }
    }

    /// I / 2^n
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        Self { entries: Matrix::identity(dim).scale(1.0 / dim as f64) }
    }

    /// Σ_k p_k |k><k| over computational basis states.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_real_diagonal(probabilities))
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn num_qubits(&self) -> usize {
        self.entries.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }
}

impl QuantumState for DensityMatrix {
    fn dim(&self) -> usize {
        self.entries.dim()
    }

    fn pauli_expectation(&self, p: &PauliString) -> f64 {
        // tr(ρP) = Σ_b phase(b) ρ[b', b]
        let mut acc = C64::new(0.0, 0.0);
        for b in 0..self.entries.dim() {
            let (target, ph) = p.apply(b);
            acc += ph * self.entries[(b, target)];
        }
        acc.re
    }

    fn population(&self, v: &[C64]) -> f64 {
        let rv = self.entries.mul_vec(v);
        linalg::inner(v, &rv).re
    }
}

fn check_power_of_two(len: usize) -> Result<()> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::DimensionMismatch { expected: len.next_power_of_two().max(2), got: len });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;

    #[test]
    fn rejects_unnormalized() {
        assert!(StateVector::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(StateVector::new(vec![C64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn pure_and_projector_agree() {
        let psi = StateVector::normalized(vec![
            C64::new(0.3, 0.1),
            C64::new(-0.2, 0.5),
            C64::new(0.0, -0.7),
            C64::new(0.4, 0.0),
        ])
        .unwrap();
        let rho = psi.to_density();
        for axes in [[Axis::X, Axis::Y], [Axis::Y, Axis::Z], [Axis::Z, Axis::X], [Axis::Y, Axis::Y]] {
            let p = PauliString::from_factors(&[(0, axes[0]), (1, axes[1])]).unwrap();
            assert!((psi.pauli_expectation(&p) - rho.pauli_expectation(&p)).abs() < 1e-14);
        }
    }
}
