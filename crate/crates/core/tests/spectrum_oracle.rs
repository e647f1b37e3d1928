//! Eigenvalues checked against nalgebra's symmetric eigensolver applied to
//! the real 2N x 2N embedding [[Re, -Im], [Im, Re]] of each Hermitian
//! matrix. Every eigenvalue of the embedding appears twice.

use anneal_certify::linalg::{Matrix, C64};
use anneal_certify::pauli::PauliHamiltonian;
use anneal_certify::spectra;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn oracle_eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.dim();
    let big = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = big.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.iter().step_by(2).copied().collect()
}

const H2_GOLDEN: [f64; 16] = [
    -1.1299047843229126,
    -0.4953910824341016,
    -0.4953910824341014,
    -0.4020520009256317,
    -0.4020520009256317,
    -0.4020520009256317,
    -0.33997355023023734,
    -0.3399735502302373,
    -0.04941509770521729,
    0.4040924052189857,
    0.4040924052189857,
    0.582276643231182,
    0.582276643231182,
    0.7256453740990829,
    0.8141187860307694,
    1.14772055624683,
];

#[test]
fn h2_spectrum_matches_oracle_and_goldens() {
    let m = anneal_certify::h2_hamiltonian().to_matrix().unwrap();
    let ours = spectra::diagonalize(&m).unwrap();
    let oracle = oracle_eigenvalues(&m);
    for ((a, b), g) in ours.eigenvalues().iter().zip(&oracle).zip(&H2_GOLDEN) {
        assert!((a - b).abs() < 1e-10, "{a} vs oracle {b}");
        assert!((a - g).abs() < 1e-10, "{a} vs golden {g}");
    }
    let (e0, e1) = spectra::first_gap(&ours, spectra::DEGENERACY_TOL).unwrap();
    assert!((e0 - H2_GOLDEN[0]).abs() < 1e-10);
    assert!((e1 - H2_GOLDEN[1]).abs() < 1e-10);
    assert_eq!(ours.ground_degeneracy(spectra::DEGENERACY_TOL), 1);
}

#[test]
fn literal_pairing_file_has_a_different_spectrum() {
    let text = include_str!("../../../data/h2_0.65A_eq17.ham");
    let h = PauliHamiltonian::parse(text).unwrap();
    let s = spectra::diagonalize(&h.to_matrix().unwrap()).unwrap();
    assert!((s.ground_energy() - H2_GOLDEN[0]).abs() > 0.1);
}

fn hermitian(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        let raw = Matrix::from_fn(n, |i, j| C64::new(v[i * n + j].0, v[i * n + j].1));
        raw.add_scaled(1.0, &raw.dagger()).scale(0.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_hermitian_eigenvalues(m in (1usize..=12).prop_flat_map(hermitian)) {
        let s = spectra::diagonalize(&m).unwrap();
        for (a, b) in s.eigenvalues().iter().zip(oracle_eigenvalues(&m)) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!(s.reconstruct().max_abs_diff(&m) < 1e-10);
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let ip = anneal_certify::linalg::inner(s.eigenvector(i), s.eigenvector(j));
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip - C64::new(expected, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_spectra(v in prop::collection::vec(-1.0..1.0f64, 8), reps in 1usize..4) {
        // block-repeated eigenvalues conjugated by a fixed rotation
        let values: Vec<f64> = v.iter().flat_map(|&x| std::iter::repeat_n(x, reps)).take(8).collect();
        let d = Matrix::from_real_diagonal(&values);
        let h = anneal_certify::dynamics::default_driver(3).to_matrix().unwrap();
        let u = spectra::diagonalize(&h).unwrap();
        let q = Matrix::from_fn(8, |i, j| u.eigenvector(j)[i]);
        let m = q.matmul(&d).matmul(&q.dagger());
        let s = spectra::diagonalize(&m).unwrap();
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues().iter().zip(&sorted) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!(s.reconstruct().max_abs_diff(&m) < 1e-10);
    }
}
