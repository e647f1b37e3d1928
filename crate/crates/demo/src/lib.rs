//! WebAssembly bindings for the static page in `www/`.
//!
//! Each export has a plain-Rust counterpart (`*_impl`) so the logic is
//! testable natively; the exported wrappers only convert errors.

use anneal_certify::certify;
use anneal_certify::experiments::{log_space, AnnealProblem};
use anneal_certify::pauli::PauliHamiltonian;
use anneal_certify::spectra::{self, OffsetMode};
use wasm_bindgen::prelude::*;

/// Longest annealing time the page may request, in ns.
pub const MAX_TIME: f64 = 1000.0;
pub const MAX_POINTS: usize = 60;

fn problem(ham: &str) -> Result<AnnealProblem, String> {
    let h = if ham.trim().is_empty() {
        anneal_certify::h2_hamiltonian()
    } else {
        PauliHamiltonian::parse(ham).map_err(|e| e.to_string())?
    };
    if h.num_qubits() > 6 {
        return Err(format!("{} qubits is too many for the browser demo (max 6)", h.num_qubits()));
    }
    AnnealProblem::with_default_driver(h).map_err(|e| e.to_string())
}

/// Mean energy and error bar against annealing time at one dephasing rate.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct Curve {
    times: Vec<f64>,
    means: Vec<f64>,
    error_bars: Vec<f64>,
    epsilon_squared: Vec<f64>,
    e0: f64,
    e1: f64,
}

#[wasm_bindgen]
impl Curve {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn means(&self) -> Vec<f64> {
        self.means.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn error_bars(&self) -> Vec<f64> {
        self.error_bars.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn epsilon_squared(&self) -> Vec<f64> {
        self.epsilon_squared.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn e0(&self) -> f64 {
        self.e0
    }
    #[wasm_bindgen(getter)]
    pub fn e1(&self) -> f64 {
        self.e1
    }
    /// Index of the lowest mean (first one on ties).
    #[wasm_bindgen(getter)]
    pub fn optimal_index(&self) -> usize {
        let mut best = 0;
        for (i, m) in self.means.iter().enumerate() {
            if *m < self.means[best] {
                best = i;
            }
        }
        best
    }
}

pub fn anneal_curve_impl(ham: &str, gamma: f64, t_min: f64, t_max: f64, points: usize) -> Result<Curve, String> {
    if !(t_min > 0.0 && t_min < t_max && t_max <= MAX_TIME) {
        return Err(format!("need 0 < T_min < T_max <= {MAX_TIME} ns"));
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be in 2..={MAX_POINTS}"));
    }
    let p = problem(ham)?;
    let times = log_space(t_min, t_max, points);
    let cells: Vec<(f64, f64)> = times.iter().map(|&t| (t, gamma)).collect();
    let runs = p.run_all(&cells).map_err(|e| e.to_string())?;
    let (e0, e1) = p.levels();
    Ok(Curve {
        times,
        means: runs.iter().map(|r| r.moments.mean).collect(),
        error_bars: runs.iter().map(|r| r.moments.std_dev()).collect(),
        epsilon_squared: runs.iter().map(|r| r.epsilon_squared).collect(),
        e0,
        e1,
    })
}

/// Anneal curve over `points` log-spaced times in `[t_min, t_max]` ns.
/// An empty `ham` selects the bundled H2 Hamiltonian.
#[wasm_bindgen]
pub fn anneal_curve(ham: &str, gamma: f64, t_min: f64, t_max: f64, points: usize) -> Result<Curve, JsError> {
    anneal_curve_impl(ham, gamma, t_min, t_max, points).map_err(|e| JsError::new(&e))
}

/// Outcome of one anneal checked against a centered pre-estimate.
#[wasm_bindgen]
#[derive(Clone, Copy, Debug)]
pub struct Certification {
    pub mean: f64,
    pub variance: f64,
    pub threshold: f64,
    pub error_bar: f64,
    pub variance_is_bound: bool,
    pub improves_preestimate: bool,
    pub epsilon_squared: f64,
    pub e0: f64,
    pub e1: f64,
}

pub fn certify_point_impl(ham: &str, time: f64, gamma: f64, halfwidth: f64) -> Result<Certification, String> {
    if !(time > 0.0 && time <= MAX_TIME) {
        return Err(format!("need 0 < T <= {MAX_TIME} ns"));
    }
    let p = problem(ham)?;
    let pre = spectra::synthesize_preestimate(p.spectrum(), halfwidth, halfwidth, OffsetMode::Centered)
        .map_err(|e| e.to_string())?;
    let run = p.run(time, gamma).map_err(|e| e.to_string())?;
    let report = certify::certify(&run.moments, &pre);
    let (e0, e1) = p.levels();
    Ok(Certification {
        mean: report.measured_energy,
        variance: report.measured_variance,
        threshold: report.threshold,
        error_bar: report.error_bar,
        variance_is_bound: report.variance_is_bound,
        improves_preestimate: report.improves_preestimate,
        epsilon_squared: run.epsilon_squared,
        e0,
        e1,
    })
}

/// Certify one `(T, γ)` anneal with `δM0 = δM1 = halfwidth` around the exact levels.
#[wasm_bindgen]
pub fn certify_point(ham: &str, time: f64, gamma: f64, halfwidth: f64) -> Result<Certification, JsError> {
    certify_point_impl(ham, time, gamma, halfwidth).map_err(|e| JsError::new(&e))
}

/// `[variance, error²]` of `sqrt(1-ε²)|0> + ε|1>` for levels `0` and `gap`.
#[wasm_bindgen]
pub fn two_level(epsilon_squared: f64, gap: f64) -> Vec<f64> {
    let (v, e) = certify::two_level(epsilon_squared.clamp(0.0, 1.0), gap);
    vec![v, e]
}

pub fn spectrum_impl(ham: &str) -> Result<Vec<f64>, String> {
    Ok(problem(ham)?.spectrum().eigenvalues().to_vec())
}

/// Eigenvalues, ascending.
#[wasm_bindgen]
pub fn spectrum(ham: &str) -> Result<Vec<f64>, JsError> {
    spectrum_impl(ham).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_approaches_ground_energy() {
        let c = anneal_curve_impl("", 0.0, 1.0, 200.0, 6).unwrap();
        assert_eq!(c.times.len(), 6);
        assert_eq!(c.optimal_index(), 5);
        assert!(c.means[5] - c.e0 < 1e-2);
        assert!(c.error_bars.iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn certify_matches_core() {
        let r = certify_point_impl("", 100.0, 0.0, 0.05).unwrap();
        assert!(r.variance_is_bound && r.improves_preestimate);
        assert!(!certify_point_impl("", 100.0, 0.0, 1e-3).unwrap().improves_preestimate);
        assert!(r.mean - r.error_bar <= r.e0 && r.e0 <= r.mean);
        let r = certify_point_impl("", 100.0, 0.0, 0.4).unwrap();
        assert!(!r.variance_is_bound);
    }

    #[test]
    fn custom_hamiltonian_and_errors() {
        let s = spectrum_impl("qubits 1\n0.5 Z0").unwrap();
        assert_eq!(s, vec![-0.5, 0.5]);
        assert!(spectrum_impl("1.0 Q0").is_err());
        assert!(anneal_curve_impl("", 0.0, 10.0, 1.0, 5).is_err());
        assert!(anneal_curve_impl("", 0.0, 1.0, 10.0, 1).is_err());
        assert!(certify_point_impl("", 5000.0, 0.0, 0.1).is_err());
        assert!(spectrum_impl("1.0 Z7").is_err());
    }

    #[test]
    fn two_level_boundary() {
        assert_eq!(two_level(0.5, 1.0), vec![0.25, 0.25]);
        let v = two_level(0.9, 1.0);
        assert!(v[0] < v[1]);
    }
}
