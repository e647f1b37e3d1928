use anneal_certify::dynamics::{self, AnnealConfig};
use anneal_certify::measure::EnergyObservable;

#[test]
fn sampled_mean_within_five_sigma() {
    let hp = anneal_certify::h2_hamiltonian();
    let cfg = AnnealConfig::new(5.0, 0.0, 400).unwrap();
    let psi = dynamics::evolve_closed(&hp, &dynamics::default_driver(4), &cfg).unwrap();
    let obs = EnergyObservable::new(hp).unwrap();
    let exact = obs.moments(&psi).unwrap();
    let shots = 1_000_000;
    let mut inside = 0;
    for seed in 0..100 {
        let s = obs.sample(&psi, shots, seed).unwrap();
        assert_eq!(s.shots, Some(shots));
        if (s.mean - exact.mean).abs() <= 5.0 * s.std_error.unwrap() {
            inside += 1;
        }
        assert!((s.variance - exact.variance).abs() < 1e-2);
    }
    assert!(inside >= 99, "{inside} of 100 seeds within 5 sigma");
}

#[test]
fn sampling_error_shrinks_with_shots() {
    let hp = anneal_certify::h2_hamiltonian();
    let psi = dynamics::plus_state(4);
    let obs = EnergyObservable::new(hp).unwrap();
    let small = obs.sample(&psi, 100, 7).unwrap().std_error.unwrap();
    let large = obs.sample(&psi, 10_000, 7).unwrap().std_error.unwrap();
    assert!((small / large - 10.0).abs() < 1.0);
}
