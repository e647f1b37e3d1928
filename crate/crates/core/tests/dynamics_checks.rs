use anneal_certify::dynamics::{self, AnnealConfig, Schedule};
use anneal_certify::linalg::{Matrix, C64};
use anneal_certify::pauli::{Axis, PauliHamiltonian};
use anneal_certify::state::{QuantumState, StateVector};
use nalgebra::DMatrix;

fn h2_schedule() -> Schedule {
    let hp = anneal_certify::h2_hamiltonian();
    Schedule::new(&hp, &dynamics::default_driver(4)).unwrap()
}

fn closed(schedule: &Schedule, t: f64, steps: usize) -> StateVector {
    let cfg = AnnealConfig::new(t, 0.0, steps).unwrap();
    dynamics::evolve_closed_on(schedule, &cfg).unwrap().0
}

fn distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Exponential midpoint propagator using nalgebra's symmetric eigensolver;
/// valid because the H2 schedule is real symmetric.
fn oracle_closed(schedule: &Schedule, total: f64, steps: usize) -> Vec<C64> {
    let n = schedule.dim();
    let mut psi = dynamics::plus_state(4).amplitudes().to_vec();
    let dt = total / steps as f64;
    for k in 0..steps {
        let m = schedule.matrix_at((k as f64 + 0.5) / steps as f64);
        let real = DMatrix::from_fn(n, n, |i, j| m[(i, j)].re);
        let eig = real.symmetric_eigen();
        let v = &eig.eigenvectors;
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let proj: C64 = (0..n).map(|i| psi[i] * v[(i, j)]).sum();
            *c = proj * C64::from_polar(1.0, -eig.eigenvalues[j] * dt);
        }
        for (i, p) in psi.iter_mut().enumerate() {
            *p = (0..n).map(|j| coeffs[j] * v[(i, j)]).sum();
        }
    }
    psi
}

#[test]
fn closed_matches_exponential_oracle() {
    let s = h2_schedule();
    let ours = closed(&s, 10.0, s.default_steps(10.0));
    let oracle = oracle_closed(&s, 10.0, 20_000);
    let diff: f64 = ours.amplitudes().iter().zip(&oracle).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    assert!(diff < 1e-6, "diff {diff}");
}

#[test]
fn open_at_zero_gamma_matches_closed() {
    let s = h2_schedule();
    for t in [5.0, 50.0, 300.0] {
        let cfg = AnnealConfig::with_default_steps(t, 0.0, &s).unwrap();
        let psi = dynamics::evolve_closed_on(&s, &cfg).unwrap().0;
        let (rho, diag) = dynamics::evolve_open_on(&s, &cfg).unwrap();
        let diff = rho.entries().max_abs_diff(psi.to_density().entries());
        assert!(diff <= 1e-6, "T={t}: {diff}");
        assert!(diag.drift.abs() < 1e-10);
    }
}

#[test]
fn pure_dephasing_decay() {
    let h = PauliHamiltonian::parse("0.7 Z0").unwrap();
    let s = Schedule::new(&h, &h).unwrap();
    let gamma = 0.1;
    for gt in [0.1, 1.0, 3.0] {
        let t = gt / gamma;
        let cfg = AnnealConfig::new(t, gamma, 4000).unwrap();
        let (rho, _) = dynamics::evolve_open_on(&s, &cfg).unwrap();
        let coherence = rho.entries()[(0, 1)].norm();
        let expected = 0.5 * (-2.0 * gt).exp();
        assert!(((coherence - expected) / expected).abs() < 1e-6, "gt={gt}: {coherence} vs {expected}");
        assert!((rho.entries()[(0, 0)].re - 0.5).abs() < 1e-12);
        // rho_01 picks up exp(-i(E0 - E1)t) with E0 - E1 = 1.4
        let phase = rho.entries()[(0, 1)].arg();
        let want = C64::from_polar(1.0, -2.0 * 0.7 * t).arg();
        assert!((C64::from_polar(1.0, phase) - C64::from_polar(1.0, want)).norm() < 1e-6);
    }
}

#[test]
fn dephasing_acts_on_every_qubit() {
    let h = PauliHamiltonian::parse("qubits 2\n0.3 Z0\n-0.2 Z1").unwrap();
    let s = Schedule::new(&h, &h).unwrap();
    let (gamma, t) = (0.05, 4.0);
    let (rho, _) = dynamics::evolve_open_on(&s, &AnnealConfig::new(t, gamma, 2000).unwrap()).unwrap();
    // |00><11| flips both qubits and decays at 4γ
    let c = rho.entries()[(0, 3)].norm();
    assert!((c - 0.25 * (-4.0 * gamma * t).exp()).abs() < 1e-9);
    let c = rho.entries()[(0, 1)].norm();
    assert!((c - 0.25 * (-2.0 * gamma * t).exp()).abs() < 1e-9);
}

#[test]
fn unitarity_preserves_overlaps() {
    let s = h2_schedule();
    let a = StateVector::basis(4, 3);
    let b = StateVector::normalized(
        (0..16).map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect(),
    )
    .unwrap();
    let before = a.overlap(&b);
    let defect = |steps: usize| {
        let cfg = AnnealConfig::new(20.0, 0.0, steps).unwrap();
        let ea = dynamics::evolve_closed_from(&s, &cfg, &a).unwrap();
        let eb = dynamics::evolve_closed_from(&s, &cfg, &b).unwrap();
        assert!(ea.1.drift.abs() < 1e-6 && eb.1.drift.abs() < 1e-6);
        (ea.0.overlap(&eb.0) - before).norm()
    };
    let coarse = defect(s.default_steps(20.0));
    let fine = defect(4 * s.default_steps(20.0));
    assert!(coarse < dynamics::DRIFT_TOL, "{coarse}");
    assert!(fine < coarse / 64.0, "{fine} vs {coarse}");
}

#[test]
fn rk4_is_fourth_order() {
    let s = h2_schedule();
    let reference = closed(&s, 10.0, 25_600);
    let e1 = distance(&closed(&s, 10.0, 800), &reference);
    let e2 = distance(&closed(&s, 10.0, 1600), &reference);
    let ratio = e1 / e2;
    assert!((12.0..=20.0).contains(&ratio), "closed ratio {ratio}");

    let rho = |steps| dynamics::evolve_open_on(&s, &AnnealConfig::new(10.0, 0.01, steps).unwrap()).unwrap().0;
    let r = rho(25_600);
    let e1 = rho(800).entries().max_abs_diff(r.entries());
    let e2 = rho(1600).entries().max_abs_diff(r.entries());
    let ratio = e1 / e2;
    assert!((12.0..=20.0).contains(&ratio), "open ratio {ratio}");
}

#[test]
fn default_steps_are_self_converged() {
    let s = h2_schedule();
    let hp = anneal_certify::h2_hamiltonian();
    for (t, gamma) in [(10.0, 0.0), (100.0, 0.0), (2000.0, 0.0), (50.0, 1e-3), (300.0, 1e-2)] {
        let cfg = AnnealConfig::with_default_steps(t, gamma, &s).unwrap();
        let d = dynamics::self_convergence(&s, &cfg, &hp).unwrap();
        assert!(d < 1e-7, "T={t} gamma={gamma}: {d}");
    }
}

#[test]
fn trace_is_preserved_at_default_steps() {
    let s = h2_schedule();
    for gamma in [0.0, 1e-3, 1e-1] {
        let cfg = AnnealConfig::with_default_steps(200.0, gamma, &s).unwrap();
        let (_, diag) = dynamics::evolve_open_on(&s, &cfg).unwrap();
        assert!(diag.drift.abs() <= 1e-8, "gamma={gamma}: {}", diag.drift);
    }
}

#[test]
fn open_runs_conserve_trace_hermiticity_positivity() {
    let s = h2_schedule();
    for gamma in [1e-4, 1e-2, 1e-1] {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let cfg = AnnealConfig::with_default_steps(20.0, gamma, &s).unwrap().with_axis(axis);
            let (rho, diag) = dynamics::evolve_open_on(&s, &cfg).unwrap();
            assert!(diag.drift.abs() < 1e-6);
            assert!(diag.hermiticity_defect.unwrap() < 1e-12);
            assert!(diag.min_eigenvalue.unwrap() >= -1e-6);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn too_few_steps_fail_loudly() {
    let s = h2_schedule();
    let cfg = AnnealConfig::new(2000.0, 0.0, 10).unwrap();
    assert!(dynamics::evolve_closed_on(&s, &cfg).is_err());
    let cfg = AnnealConfig::new(2000.0, 1e-3, 10).unwrap();
    assert!(dynamics::evolve_open_on(&s, &cfg).is_err());
}

#[test]
fn schedule_endpoints() {
    let hp = anneal_certify::h2_hamiltonian();
    let hd = dynamics::default_driver(4);
    let s = Schedule::new(&hp, &hd).unwrap();
    let diff = |a: &Matrix, b: &Matrix| a.max_abs_diff(b);
    assert!(diff(&s.matrix_at(0.0), &hd.to_matrix().unwrap()) < 1e-15);
    assert!(diff(&s.matrix_at(1.0), &hp.to_matrix().unwrap()) < 1e-15);
    let mid = dynamics::schedule_hamiltonian(&hp, &hd, 5.0, 10.0).unwrap();
    assert!(diff(&s.matrix_at(0.5), &mid) < 1e-15);
    assert!((s.norm_bound() - 4.0).abs() < 1e-12);
    let plus = dynamics::plus_state(4);
    assert!((plus.pauli_expectation(&anneal_certify::pauli::PauliString::single(2, Axis::X)) - 1.0).abs() < 1e-15);
}
