//! Exact diagonalization of small Hermitian matrices, populations in the
//! energy eigenbasis, and synthetic classical pre-estimates.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, C64};
use crate::state::QuantumState;

/// Eigenvalues closer than this (GHz) are treated as one level.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Input matrices must satisfy `max |A - A^dag| <= HERMITIAN_TOL`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Cyclic Jacobi sweep cap.
pub const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<C64>>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector `i`, matching `eigenvalues()[i]`.
    pub fn eigenvector(&self, i: usize) -> &[C64] {
        &self.eigenvectors[i]
    }

    pub fn eigenvectors(&self) -> &[Vec<C64>] {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Largest |λ|, i.e. the spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs()))
    }

    /// Number of levels within `tol` of the ground energy.
    pub fn ground_degeneracy(&self, tol: f64) -> usize {
        let e0 = self.eigenvalues[0];
        self.eigenvalues.iter().take_while(|&&e| e - e0 <= tol).count()
    }

    /// `V diag(λ) V^dag`
    pub fn reconstruct(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.eigenvectors[k][i] * self.eigenvectors[k][j].conj() * self.eigenvalues[k])
                .sum()
        })
    }
}

/// Cyclic complex Jacobi diagonalization.
///
/// Degenerate clusters are re-orthonormalized by Gram-Schmidt in index
/// order and every eigenvector is phased so its first largest component is
/// real and positive, so output is a pure function of the input bits.
pub fn diagonalize(m: &Matrix) -> Result<Spectrum> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.dim();
    let mut a = Matrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = Matrix::identity(n);

    let scale = a.as_slice().iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let target = 1e-15 * scale.max(f64::MIN_POSITIVE);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        let off = off_diagonal_norm(&a);
        converged = off <= target;
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] <= DEGENERACY_TOL {
            end += 1;
        }
        gram_schmidt(&mut eigenvectors[start..end]);
        start = end;
    }
    for vec in &mut eigenvectors {
        fix_phase(vec);
    }

    Ok(Spectrum { eigenvalues, eigenvectors })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation zeroing `a[p][q]`: `A <- U^dag A U`, `V <- V U`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase the pair so the coupling is real, then a real rotation.
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[(p, q)] = linalg::ZERO;
    a[(q, p)] = linalg::ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
}

fn gram_schmidt(vectors: &mut [Vec<C64>]) {
    for i in 0..vectors.len() {
        let (done, rest) = vectors.split_at_mut(i);
        let cur = &mut rest[0];
        for prev in done.iter() {
            let proj = linalg::inner(prev, cur);
            for (c, p) in cur.iter_mut().zip(prev) {
                *c -= proj * p;
            }
        }
        let n = linalg::norm(cur);
        cur.iter_mut().for_each(|c| *c /= n);
    }
}

fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
    if let Some(lead) = v.iter().find(|x| x.norm() >= max * (1.0 - 1e-12)).copied() {
        let rot = lead.conj() / lead.norm();
        v.iter_mut().for_each(|x| *x *= rot);
    }
}

/// Ground energy and the first level above it by more than `degeneracy_tol`.
pub fn first_gap(s: &Spectrum, degeneracy_tol: f64) -> Result<(f64, f64)> {
    let e0 = *s.eigenvalues.first().ok_or(Error::DegenerateSpectrum(degeneracy_tol))?;
    let e1 = s
        .eigenvalues
        .iter()
        .copied()
        .find(|&e| e > e0 + degeneracy_tol)
        .ok_or(Error::DegenerateSpectrum(degeneracy_tol))?;
    Ok((e0, e1))
}

/// Populations of a state over the eigenbasis of a spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationDecomposition {
    pub populations: Vec<f64>,
    /// Population outside the (near-)degenerate ground space.
    pub epsilon_squared: f64,
}

impl PopulationDecomposition {
    /// `Σ_m p_m E_m`
    pub fn mean_energy(&self, s: &Spectrum) -> f64 {
        self.populations.iter().zip(&s.eigenvalues).map(|(p, e)| p * e).sum()
    }
}

/// Negative populations down to this value are rounding noise and clamped.
pub const POPULATION_CLAMP: f64 = -1e-6;

pub fn decompose<S: QuantumState + ?Sized>(state: &S, s: &Spectrum) -> Result<PopulationDecomposition> {
    decompose_with_tol(state, s, DEGENERACY_TOL)
}

pub fn decompose_with_tol<S: QuantumState + ?Sized>(
    state: &S,
    s: &Spectrum,
    degeneracy_tol: f64,
) -> Result<PopulationDecomposition> {
    if state.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: state.dim() });
    }
    let mut populations = Vec::with_capacity(s.dim());
    for v in &s.eigenvectors {
        let p = state.population(v);
        if p < POPULATION_CLAMP {
            return Err(Error::NotPositive(p));
        }
        populations.push(p.max(0.0));
    }
    let ground: f64 = populations[..s.ground_degeneracy(degeneracy_tol)].iter().sum();
    Ok(PopulationDecomposition { populations, epsilon_squared: 1.0 - ground })
}

/// Classical pre-estimate of the two lowest energies with error bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreEstimate {
    pub e0_approx: f64,
    pub e1_approx: f64,
    pub m0: f64,
    pub m1: f64,
}

impl PreEstimate {
    pub fn new(e0_approx: f64, e1_approx: f64, m0: f64, m1: f64) -> Result<Self> {
        let all_finite = [e0_approx, e1_approx, m0, m1].iter().all(|x| x.is_finite());
        if !all_finite || m0 < 0.0 || m1 < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "pre-estimate bounds must be finite and non-negative (m0={m0}, m1={m1})"
            )));
        }
        if e0_approx - m0 > e1_approx + m1 {
            return Err(Error::InvalidConfig(format!(
                "pre-estimate ranges are inverted: e0-m0={} > e1+m1={}",
                e0_approx - m0,
                e1_approx + m1
            )));
        }
        Ok(Self { e0_approx, e1_approx, m0, m1 })
    }
}

/// Placement of the synthetic estimates relative to the true levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OffsetMode {
    /// Estimates equal the true energies.
    #[default]
    Centered,
    /// Estimates pushed toward each other by their full error bound.
    WorstCaseShift,
}

impl std::str::FromStr for OffsetMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "centered" => Ok(Self::Centered),
            "worst_case_shift" | "worst-case-shift" => Ok(Self::WorstCaseShift),
            other => Err(format!("unknown offset mode '{other}' (centered|worst_case_shift)")),
        }
    }
}

pub fn synthesize_preestimate(s: &Spectrum, m0: f64, m1: f64, mode: OffsetMode) -> Result<PreEstimate> {
    let (e0, e1) = first_gap(s, DEGENERACY_TOL)?;
    match mode {
        OffsetMode::Centered => PreEstimate::new(e0, e1, m0, m1),
        OffsetMode::WorstCaseShift => PreEstimate::new(e0 + m0, e1 - m1, m0, m1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::state::{DensityMatrix, StateVector};

    fn residual(m: &Matrix, s: &Spectrum, i: usize) -> f64 {
        let v = s.eigenvector(i);
        let mv = m.mul_vec(v);
        mv.iter().zip(v).map(|(a, b)| (a - b * s.eigenvalues()[i]).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn diagonal_input() {
        let s = diagonalize(&Matrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        assert_eq!(s.eigenvalues(), &[-1.0, 1.0]);
    }

    #[test]
    fn pauli_x() {
        let x = Matrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO });
        let s = diagonalize(&x).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-14);
        let h = 0.5f64.sqrt();
        let minus = [C64::new(h, 0.0), C64::new(-h, 0.0)];
        assert!((linalg::inner(&minus, s.eigenvector(0)).norm() - 1.0).abs() < 1e-14);
        for i in 0..2 {
            assert!(residual(&x, &s, i) < 1e-14);
        }
    }

    #[test]
    fn complex_hermitian() {
        let m = Matrix::from_fn(3, |i, j| match (i, j) {
            (0, 0) => C64::new(2.0, 0.0),
            (1, 1) => C64::new(-1.0, 0.0),
            (2, 2) => C64::new(0.5, 0.0),
            (0, 1) => C64::new(0.3, 0.7),
            (1, 0) => C64::new(0.3, -0.7),
            (1, 2) => C64::new(0.0, -1.1),
            (2, 1) => C64::new(0.0, 1.1),
            _ => ZERO,
        });
        let s = diagonalize(&m).unwrap();
        for i in 0..3 {
            assert!(residual(&m, &s, i) < 1e-12);
        }
        assert!(s.reconstruct().max_abs_diff(&m) < 1e-12);
        let trace: f64 = s.eigenvalues().iter().sum();
        assert!((trace - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::from_fn(2, |i, j| if i < j { ONE } else { ZERO });
        assert!(matches!(diagonalize(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn degenerate_vectors_orthonormal() {
        let m = Matrix::identity(4).scale(2.0);
        let s = diagonalize(&m).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let ip = linalg::inner(s.eigenvector(i), s.eigenvector(j));
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip.re - expect).abs() < 1e-14 && ip.im.abs() < 1e-14);
            }
        }
    }

    fn spectrum_of(values: &[f64]) -> Spectrum {
        diagonalize(&Matrix::from_real_diagonal(values)).unwrap()
    }

    #[test]
    fn gap_skips_near_degenerate_level() {
        let s = spectrum_of(&[-1.0, -1.0 + 1e-12, 0.5]);
        assert_eq!(first_gap(&s, 1e-9).unwrap(), (-1.0, 0.5));
        assert_eq!(first_gap(&spectrum_of(&[0.0, 1.0]), 1e-9).unwrap(), (0.0, 1.0));
        assert!(first_gap(&spectrum_of(&[0.3, 0.3]), 1e-9).is_err());
    }

    #[test]
    fn decompose_ground_and_mixed() {
        let s = spectrum_of(&[0.0, 1.0, 2.0, 3.0]);
        let ground = StateVector::new(s.eigenvector(0).to_vec()).unwrap();
        let d = decompose(&ground, &s).unwrap();
        assert!((d.populations[0] - 1.0).abs() < 1e-14);
        assert!(d.epsilon_squared.abs() < 1e-14);

        let mixed = DensityMatrix::maximally_mixed(2);
        let d = decompose(&mixed, &s).unwrap();
        for p in d.populations {
            assert!((p - 0.25).abs() < 1e-15);
        }
        assert!(decompose(&DensityMatrix::maximally_mixed(1), &s).is_err());
    }

    #[test]
    fn preestimate_modes() {
        let s = spectrum_of(&[-1.0, 0.0, 2.0]);
        let c = synthesize_preestimate(&s, 0.1, 0.1, OffsetMode::Centered).unwrap();
        assert_eq!(c, PreEstimate { e0_approx: -1.0, e1_approx: 0.0, m0: 0.1, m1: 0.1 });
        let w = synthesize_preestimate(&s, 0.1, 0.1, OffsetMode::WorstCaseShift).unwrap();
        assert!((w.e0_approx + 0.9).abs() < 1e-15 && (w.e1_approx + 0.1).abs() < 1e-15);
        assert!(PreEstimate::new(0.0, 1.0, -0.1, 0.0).is_err());
        assert!(PreEstimate::new(2.0, 1.0, 0.1, 0.1).is_err());
    }
}
