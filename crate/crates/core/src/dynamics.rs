//! Linear annealing schedule `H(t) = (t/T) H_P + (1 - t/T) H_D` started
//! from `|+...+>`, evolved either as a pure state or under a Lindblad
//! master equation with uniform single-qubit dephasing.
//!
//! Units: coefficients in GHz are used directly as angular frequencies
//! (rad/ns) and times are in ns, so the equations read `dψ/dt = -i H ψ`.
//! Both integrators are fixed-step classical RK4.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64, ZERO};
use crate::pauli::{Axis, PauliHamiltonian, PauliString, PauliTerm};
use crate::spectra;
use crate::state::{DensityMatrix, StateVector};

/// Default step-size rule: `max ‖H(t)‖ · Δt <= MAX_PHASE_PER_STEP`.
pub const MAX_PHASE_PER_STEP: f64 = 0.05;

/// Norm or trace drift beyond this is reported as an integrator failure.
pub const DRIFT_TOL: f64 = 1e-6;

/// Most negative eigenvalue tolerated in a final density matrix.
pub const POSITIVITY_TOL: f64 = -1e-6;

pub const MIN_STEPS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealConfig {
    /// T in ns.
    pub annealing_time: f64,
    /// Dephasing rate γ in GHz.
    pub gamma: f64,
    pub steps: usize,
    pub lindblad_axis: Axis,
}

impl AnnealConfig {
    pub fn new(annealing_time: f64, gamma: f64, steps: usize) -> Result<Self> {
        let cfg = Self { annealing_time, gamma, steps, lindblad_axis: Axis::Z };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config whose step count follows the default phase-per-step rule.
    pub fn with_default_steps(annealing_time: f64, gamma: f64, schedule: &Schedule) -> Result<Self> {
        Self::new(annealing_time, gamma, schedule.default_steps(annealing_time))
    }

    pub fn with_axis(mut self, axis: Axis) -> Self {
        self.lindblad_axis = axis;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.annealing_time > 0.0 && self.annealing_time.is_finite()) {
            return Err(Error::InvalidConfig(format!("annealing time must be > 0, got {}", self.annealing_time)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if self.steps < MIN_STEPS {
            return Err(Error::InvalidConfig(format!("steps must be >= {MIN_STEPS}, got {}", self.steps)));
        }
        Ok(())
    }
}

/// `-Σ_i σ^x_i`
pub fn default_driver(n: usize) -> PauliHamiltonian {
    PauliHamiltonian::new(
        n,
        (0..n).map(|q| PauliTerm { coefficient: -1.0, string: PauliString::single(q, Axis::X) }),
    )
    .expect("driver terms are valid")
}

/// `|+...+>`, uniform amplitudes `2^{-n/2}`.
pub fn plus_state(n: usize) -> StateVector {
    let dim = 1usize << n;
    StateVector::from_raw(vec![C64::new((dim as f64).sqrt().recip(), 0.0); dim])
}

/// Dense `H(t)` for `0 <= t <= T`.
pub fn schedule_hamiltonian(hp: &PauliHamiltonian, hd: &PauliHamiltonian, t: f64, total: f64) -> Result<Matrix> {
    if !(0.0..=total).contains(&t) {
        return Err(Error::TimeOutOfRange { t, total });
    }
    Ok(Schedule::new(hp, hd)?.matrix_at(t / total))
}

/// Sparse, precomputed form of the two schedule endpoints.
///
/// Rows store the union of the non-zero patterns of `H_P` and `H_D`, so
/// `H(s)` is rebuilt per RK4 stage from two coefficient arrays.
#[derive(Clone, Debug)]
pub struct Schedule {
    num_qubits: usize,
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    problem: Vec<C64>,
    driver: Vec<C64>,
    norm_bound: f64,
    real: bool,
}

impl Schedule {
    pub fn new(hp: &PauliHamiltonian, hd: &PauliHamiltonian) -> Result<Self> {
        if hp.num_qubits() != hd.num_qubits() {
            return Err(Error::DimensionMismatch { expected: hp.num_qubits(), got: hd.num_qubits() });
        }
        let p = hp.to_matrix()?;
        let d = hd.to_matrix()?;
        let norm_bound = spectra::diagonalize(&p)?.spectral_norm().max(spectra::diagonalize(&d)?.spectral_norm());
        Ok(Self::from_matrices(hp.num_qubits(), &p, &d, norm_bound))
    }

    fn from_matrices(num_qubits: usize, p: &Matrix, d: &Matrix, norm_bound: f64) -> Self {
        let dim = p.dim();
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut problem = Vec::new();
        let mut driver = Vec::new();
        for i in 0..dim {
            row_start.push(cols.len());
            for j in 0..dim {
                if p[(i, j)] != ZERO || d[(i, j)] != ZERO {
                    cols.push(j);
                    problem.push(p[(i, j)]);
                    driver.push(d[(i, j)]);
                }
            }
        }
        row_start.push(cols.len());
        let real = problem.iter().chain(&driver).all(|c| c.im == 0.0);
        Self { num_qubits, dim, row_start, cols, problem, driver, norm_bound, real }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper bound on `‖H(s)‖` over the schedule (convexity of the norm).
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn default_steps(&self, annealing_time: f64) -> usize {
        let steps = (annealing_time * self.norm_bound / MAX_PHASE_PER_STEP).ceil();
        (steps as usize).max(MIN_STEPS)
    }

    /// Dense `H(s) = s H_P + (1 - s) H_D`.
    pub fn matrix_at(&self, s: f64) -> Matrix {
        let r = 1.0 - s;
        let mut m = Matrix::zeros(self.dim);
        for i in 0..self.dim {
            for k in self.row_start[i]..self.row_start[i + 1] {
                m[(i, self.cols[k])] = self.problem[k] * s + self.driver[k] * r;
            }
        }
        m
    }

    fn workspace(&self) -> Coefficients {
        if self.real {
            Coefficients::Real(vec![0.0; self.cols.len()])
        } else {
            Coefficients::Complex(vec![ZERO; self.cols.len()])
        }
    }

    fn coefficients_at(&self, s: f64, out: &mut Coefficients) {
        let r = 1.0 - s;
        match out {
            Coefficients::Real(out) => {
                for ((o, p), d) in out.iter_mut().zip(&self.problem).zip(&self.driver) {
                    *o = p.re * s + d.re * r;
                }
            }
            Coefficients::Complex(out) => {
                for ((o, p), d) in out.iter_mut().zip(&self.problem).zip(&self.driver) {
                    *o = p * s + d * r;
                }
            }
        }
    }

    /// `out = H ρ` for a row-major `dim x dim` operand.
    #[inline]
    fn left_multiply(&self, coef: &Coefficients, rho: &[C64], out: &mut [C64]) {
        let n = self.dim;
        out.fill(ZERO);
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in self.row_start[i]..self.row_start[i + 1] {
                let src = &rho[self.cols[k] * n..(self.cols[k] + 1) * n];
                match coef {
                    Coefficients::Real(c) => {
                        let h = c[k];
                        for (o, r) in out_row.iter_mut().zip(src) {
                            o.re += h * r.re;
                            o.im += h * r.im;
                        }
                    }
                    Coefficients::Complex(c) => {
                        let h = c[k];
                        for (o, r) in out_row.iter_mut().zip(src) {
                            *o += h * r;
                        }
                    }
                }
            }
        }
    }

    /// `out = H ψ`
    #[inline]
    fn apply(&self, coef: &Coefficients, psi: &[C64], out: &mut [C64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_start[i]..self.row_start[i + 1] {
                acc += match coef {
                    Coefficients::Real(c) => psi[self.cols[k]] * c[k],
                    Coefficients::Complex(c) => c[k] * psi[self.cols[k]],
                };
            }
            *o = acc;
        }
    }
}

/// `H(s)` entries in the sparse pattern of a [`Schedule`].
#[derive(Clone, Debug)]
enum Coefficients {
    Real(Vec<f64>),
    Complex(Vec<C64>),
}

/// `γ Σ_n (L_n ρ L_n - ρ)` for a single-qubit Pauli `L_n` on every qubit.
#[derive(Clone, Debug)]
enum Dissipator {
    None,
    /// Diagonal jump operators act entrywise with these weights.
    Diagonal(Vec<f64>),
    General { gamma: f64, ops: Vec<PauliString> },
}

impl Dissipator {
    fn new(num_qubits: usize, gamma: f64, axis: Axis) -> Self {
        if gamma == 0.0 {
            return Dissipator::None;
        }
        let dim = 1usize << num_qubits;
        let ops: Vec<PauliString> = (0..num_qubits).map(|q| PauliString::single(q, axis)).collect();
        if axis == Axis::Z {
            // σ^z_n ρ σ^z_n - ρ multiplies ρ_ab by (s_n(a) s_n(b) - 1) = -2 [bit n differs]
            let weights = (0..dim * dim)
                .map(|idx| {
                    let (a, b) = (idx / dim, idx % dim);
                    -2.0 * gamma * (a ^ b).count_ones() as f64
                })
                .collect();
            Dissipator::Diagonal(weights)
        } else {
            Dissipator::General { gamma, ops }
        }
    }

    #[inline]
    fn accumulate(&self, dim: usize, rho: &[C64], out: &mut [C64]) {
        match self {
            Dissipator::None => {}
            Dissipator::Diagonal(w) => {
                for ((o, r), w) in out.iter_mut().zip(rho).zip(w) {
                    *o += r * w;
                }
            }
            Dissipator::General { gamma, ops } => {
                for op in ops {
                    let m = op.flip_mask();
                    for a in 0..dim {
                        // (PρP)_ab = φ(a^m) conj(φ(b^m)) ρ[a^m][b^m], P|c> = φ(c)|c^m>
                        let (_, pa) = op.apply(a ^ m);
                        for b in 0..dim {
                            let (_, pb) = op.apply(b ^ m);
                            out[a * dim + b] += (pa * pb.conj() * rho[(a ^ m) * dim + (b ^ m)] - rho[a * dim + b]) * *gamma;
                        }
                    }
                }
            }
        }
    }
}

struct LindbladWorkspace {
    coef: Coefficients,
    product: Vec<C64>,
}

impl LindbladWorkspace {
    /// `out = -i[H(s), ρ] + D(ρ)` using `[H, ρ] = Hρ - (Hρ)^dag` for Hermitian ρ.
    #[inline]
    fn rhs(&mut self, schedule: &Schedule, dissipator: &Dissipator, s: f64, rho: &[C64], out: &mut [C64]) {
        let n = schedule.dim;
        schedule.coefficients_at(s, &mut self.coef);
        schedule.left_multiply(&self.coef, rho, &mut self.product);
        let m = &self.product;
        for a in 0..n {
            for b in 0..n {
                let z = m[a * n + b] - m[b * n + a].conj();
                out[a * n + b] = C64::new(z.im, -z.re);
            }
        }
        dissipator.accumulate(n, rho, out);
    }
}

/// Classical RK4 over a flat complex state.
fn rk4<F>(y: &mut [C64], steps: usize, total: f64, mut rhs: F)
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let len = y.len();
    let dt = total / steps as f64;
    let mut k1 = vec![ZERO; len];
    let mut k2 = vec![ZERO; len];
    let mut k3 = vec![ZERO; len];
    let mut k4 = vec![ZERO; len];
    let mut tmp = vec![ZERO; len];
    let half = 0.5 * dt;
    let sixth = dt / 6.0;
    for step in 0..steps {
        let s0 = step as f64 / steps as f64;
        let s_mid = (step as f64 + 0.5) / steps as f64;
        let s1 = (step + 1) as f64 / steps as f64;
        rhs(s0, y, &mut k1);
        for ((t, y), k) in tmp.iter_mut().zip(y.iter()).zip(&k1) {
            *t = y + k * half;
        }
        rhs(s_mid, &tmp, &mut k2);
        for ((t, y), k) in tmp.iter_mut().zip(y.iter()).zip(&k2) {
            *t = y + k * half;
        }
        rhs(s_mid, &tmp, &mut k3);
        for ((t, y), k) in tmp.iter_mut().zip(y.iter()).zip(&k3) {
            *t = y + k * dt;
        }
        rhs(s1, &tmp, &mut k4);
        for i in 0..len {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * sixth;
        }
    }
}

/// Final-state diagnostics reported alongside an evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    /// `‖ψ‖ - 1` (closed) or `tr ρ - 1` (open) before renormalization.
    pub drift: f64,
    /// Smallest eigenvalue of ρ (open runs only).
    pub min_eigenvalue: Option<f64>,
    /// `max |ρ - ρ^dag|` (open runs only).
    pub hermiticity_defect: Option<f64>,
}

/// Closed-system anneal from `|+...+>`; requires `gamma == 0`.
pub fn evolve_closed(hp: &PauliHamiltonian, hd: &PauliHamiltonian, cfg: &AnnealConfig) -> Result<StateVector> {
    let schedule = Schedule::new(hp, hd)?;
    evolve_closed_on(&schedule, cfg).map(|(s, _)| s)
}

pub fn evolve_closed_on(schedule: &Schedule, cfg: &AnnealConfig) -> Result<(StateVector, Diagnostics)> {
    evolve_closed_from(schedule, cfg, &plus_state(schedule.num_qubits))
}

/// Closed-system evolution of an arbitrary initial state.
pub fn evolve_closed_from(
    schedule: &Schedule,
    cfg: &AnnealConfig,
    initial: &StateVector,
) -> Result<(StateVector, Diagnostics)> {
    cfg.validate()?;
    if cfg.gamma != 0.0 {
        return Err(Error::InvalidConfig(format!(
            "closed evolution requires gamma = 0 (got {}); use the open integrator",
            cfg.gamma
        )));
    }
    if initial.amplitudes().len() != schedule.dim {
        return Err(Error::DimensionMismatch { expected: schedule.dim, got: initial.amplitudes().len() });
    }
    let mut psi = initial.amplitudes().to_vec();
    let mut coef = schedule.workspace();
    // Each step integrates dψ/dt = -i (H - c) ψ with c = <ψ|H|ψ> at the
    // step start, which only changes the global phase. RK4 damps an
    // eigencomponent by ~ (λ Δt)^6 / 72 per step; measuring λ from the
    // state's own energy keeps that loss negligible over long anneals.
    // The phase Σ c Δt is restored at the end.
    let mut stage = 0usize;
    let mut shift = 0.0;
    let mut phase_sum = 0.0;
    rk4(&mut psi, cfg.steps, cfg.annealing_time, |s, y, out| {
        schedule.coefficients_at(s, &mut coef);
        schedule.apply(&coef, y, out);
        if stage.is_multiple_of(4) {
            let norm_sq: f64 = y.iter().map(|a| a.norm_sqr()).sum();
            shift = crate::linalg::inner(y, out).re / norm_sq;
            phase_sum += shift;
        }
        stage += 1;
        for (o, p) in out.iter_mut().zip(y) {
            let a = *o - p * shift;
            *o = C64::new(a.im, -a.re);
        }
    });
    let phase = C64::from_polar(1.0, -phase_sum * cfg.annealing_time / cfg.steps as f64);
    psi.iter_mut().for_each(|a| *a *= phase);
    let norm = crate::linalg::norm(&psi);
    let drift = norm - 1.0;
    if drift.abs() > DRIFT_TOL || !norm.is_finite() {
        return Err(Error::NormDrift(drift));
    }
    psi.iter_mut().for_each(|a| *a /= norm);
    let diag = Diagnostics { drift, min_eigenvalue: None, hermiticity_defect: None };
    Ok((StateVector::from_raw(psi), diag))
}

/// Lindblad anneal from `|+...+><+...+|` with dephasing on every qubit.
pub fn evolve_open(hp: &PauliHamiltonian, hd: &PauliHamiltonian, cfg: &AnnealConfig) -> Result<DensityMatrix> {
    let schedule = Schedule::new(hp, hd)?;
    evolve_open_on(&schedule, cfg).map(|(r, _)| r)
}

pub fn evolve_open_on(schedule: &Schedule, cfg: &AnnealConfig) -> Result<(DensityMatrix, Diagnostics)> {
    evolve_open_from(schedule, cfg, &plus_state(schedule.num_qubits).to_density())
}

/// Open-system evolution of an arbitrary initial density matrix.
///
/// The final state is checked for trace drift and positivity, then divided
/// by its trace.
pub fn evolve_open_from(
    schedule: &Schedule,
    cfg: &AnnealConfig,
    initial: &DensityMatrix,
) -> Result<(DensityMatrix, Diagnostics)> {
    cfg.validate()?;
    let dim = schedule.dim;
    if initial.entries().dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: initial.entries().dim() });
    }
    let dissipator = Dissipator::new(schedule.num_qubits, cfg.gamma, cfg.lindblad_axis);
    let mut ws = LindbladWorkspace { coef: schedule.workspace(), product: vec![ZERO; dim * dim] };
    let mut rho = Matrix::clone(initial.entries());
    rk4(rho.as_mut_slice(), cfg.steps, cfg.annealing_time, |s, y, out| {
        ws.rhs(schedule, &dissipator, s, y, out);
    });

    let trace = rho.trace();
    let drift = trace.re - 1.0;
    if drift.abs() > DRIFT_TOL || trace.im.abs() > DRIFT_TOL || !drift.is_finite() {
        return Err(Error::TraceDrift(drift));
    }
    let hermiticity_defect = rho.hermiticity_defect();
    let min_eigenvalue = spectra::diagonalize(&rho)?.eigenvalues()[0];
    if min_eigenvalue < POSITIVITY_TOL {
        return Err(Error::NotPositive(min_eigenvalue));
    }
    let rho = rho.scale(1.0 / trace.re);
    let diag = Diagnostics {
        drift,
        min_eigenvalue: Some(min_eigenvalue),
        hermiticity_defect: Some(hermiticity_defect),
    };
    Ok((DensityMatrix::from_raw(rho), diag))
}

/// Self-convergence defect: `|<O>(steps) - <O>(2 steps)|` for the final
/// state of the open evolution (closed when `gamma == 0`).
///
/// Costs three times a single run, so it is a separate check rather than
/// part of every evolution.
pub fn self_convergence(schedule: &Schedule, cfg: &AnnealConfig, observable: &PauliHamiltonian) -> Result<f64> {
    let fine = AnnealConfig { steps: 2 * cfg.steps, ..*cfg };
    let value = |c: &AnnealConfig| -> Result<f64> {
        if c.gamma == 0.0 {
            crate::measure::expectation(&evolve_closed_on(schedule, c)?.0, observable)
        } else {
            crate::measure::expectation(&evolve_open_on(schedule, c)?.0, observable)
        }
    };
    Ok((value(cfg)? - value(&fine)?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::QuantumState;

    fn h(text: &str) -> PauliHamiltonian {
        PauliHamiltonian::parse(text).unwrap()
    }

    #[test]
    fn schedule_endpoints_and_midpoint() {
        let hp = h("qubits 2\n0.5 Z0 Z1\n-0.3 Y0\n0.2");
        let hd = default_driver(2);
        let p = hp.to_matrix().unwrap();
        let d = hd.to_matrix().unwrap();
        assert!(schedule_hamiltonian(&hp, &hd, 0.0, 7.0).unwrap().max_abs_diff(&d) < 1e-15);
        assert!(schedule_hamiltonian(&hp, &hd, 7.0, 7.0).unwrap().max_abs_diff(&p) < 1e-15);
        let mid = schedule_hamiltonian(&hp, &hd, 3.5, 7.0).unwrap();
        assert!(mid.max_abs_diff(&p.add_scaled(1.0, &d).scale(0.5)) < 1e-15);
        assert!(matches!(schedule_hamiltonian(&hp, &hd, 7.5, 7.0), Err(Error::TimeOutOfRange { .. })));
        assert!(schedule_hamiltonian(&hp, &default_driver(3), 1.0, 2.0).is_err());
    }

    #[test]
    fn driver_ground_state_is_plus() {
        let s1 = spectra::diagonalize(&default_driver(1).to_matrix().unwrap()).unwrap();
        assert!((s1.ground_energy() + 1.0).abs() < 1e-14);
        let s4 = spectra::diagonalize(&default_driver(4).to_matrix().unwrap()).unwrap();
        assert!((s4.ground_energy() + 4.0).abs() < 1e-12);
        let ground = StateVector::new(s4.eigenvector(0).to_vec()).unwrap();
        assert!(ground.fidelity(&plus_state(4)) > 1.0 - 1e-12);
    }

    #[test]
    fn plus_state_amplitudes() {
        let p1 = plus_state(1);
        assert!(p1.amplitudes().iter().all(|a| (a.re - 0.5f64.sqrt()).abs() < 1e-15));
        assert!(plus_state(2).amplitudes().iter().all(|a| *a == C64::new(0.5, 0.0)));
        for n in 1..=4 {
            let e: f64 = default_driver(n)
                .terms()
                .iter()
                .map(|t| t.coefficient * plus_state(n).pauli_expectation(&t.string))
                .sum();
            assert!((e + n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn config_validation() {
        assert!(AnnealConfig::new(0.0, 0.0, 100).is_err());
        assert!(AnnealConfig::new(1.0, -1e-3, 100).is_err());
        assert!(AnnealConfig::new(1.0, 0.0, 9).is_err());
        assert!(AnnealConfig::new(1.0, 0.0, 10).is_ok());
    }

    #[test]
    fn closed_rejects_dephasing() {
        let cfg = AnnealConfig::new(1.0, 1e-3, 100).unwrap();
        assert!(evolve_closed(&default_driver(1), &default_driver(1), &cfg).is_err());
    }

    #[test]
    fn coarse_steps_report_drift() {
        let hp = h("3.0 Z0\n2.0 X1");
        let cfg = AnnealConfig::new(50.0, 0.0, 10).unwrap();
        assert!(matches!(evolve_closed(&hp, &default_driver(2), &cfg), Err(Error::NormDrift(_))));
    }

    #[test]
    fn x_dephasing_leaves_plus_state_alone() {
        let zero = PauliHamiltonian::new(1, []).unwrap();
        let schedule = Schedule::new(&zero, &zero).unwrap();
        let cfg = AnnealConfig::new(2.0, 0.3, 200).unwrap().with_axis(Axis::X);
        let (rho, _) = evolve_open_on(&schedule, &cfg).unwrap();
        assert!(rho.entries().max_abs_diff(&plus_state(1).to_density().entries().clone()) < 1e-14);
        // Y dephasing decays <X> as e^{-2γt}
        let cfg = cfg.with_axis(Axis::Y);
        let (rho, _) = evolve_open_on(&schedule, &cfg).unwrap();
        let x = rho.pauli_expectation(&PauliString::single(0, Axis::X));
        assert!((x - (-2.0f64 * 0.3 * 2.0).exp()).abs() < 1e-8);
    }
}
