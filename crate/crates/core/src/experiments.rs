//! Parameter sweeps over annealing time and dephasing rate.
//!
//! Every anneal is an open-system run from `|+...+>`; results are cached
//! per `(T, γ)` bit pattern inside an [`AnnealProblem`], so threshold maps
//! and error-bar tables reuse the cells of a time sweep. Cells run in
//! parallel through rayon and are always returned in grid order, so tables
//! do not depend on the thread count.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::certify::{self, CertificationReport};
use crate::dynamics::{self, AnnealConfig, Schedule};
use crate::error::{Error, Result};
use crate::measure::{EnergyMoments, EnergyObservable};
use crate::pauli::{Axis, PauliHamiltonian};
use crate::spectra::{self, OffsetMode, PreEstimate, Spectrum};

/// Relative width at which threshold bisection stops.
pub const BISECTION_REL_TOL: f64 = 1e-2;

/// Hard cap on bisection iterations (reached only when the lower bracket is 0).
pub const MAX_BISECTIONS: usize = 40;

/// Number of `T` grid points in the default sweep, log-spaced over [1, 2000] ns.
pub const DEFAULT_TIME_POINTS: usize = 40;

/// Number of positive `γ` grid points, log-spaced over [1e-5, 1e-1] GHz.
pub const DEFAULT_GAMMA_POINTS: usize = 25;

pub const DEFAULT_HALFWIDTH_POINTS: usize = 30;

/// `n` points from `lo` to `hi` (inclusive) evenly spaced in log10.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)).collect(),
    }
}

/// Parameter grids for the sweeps, all ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub annealing_times: Vec<f64>,
    pub gammas: Vec<f64>,
    pub halfwidths: Vec<f64>,
}

impl SweepGrid {
    /// T: 40 log points in [1, 2000] ns. γ: 0 plus 25 log points in
    /// [1e-5, 1e-1] GHz. Halfwidths: 30 linear points up to 1.2·(E1-E0)/2.
    pub fn default_for(gap: f64) -> Self {
        let mut gammas = vec![0.0];
        gammas.extend(log_space(1e-5, 1e-1, DEFAULT_GAMMA_POINTS));
        let n = DEFAULT_HALFWIDTH_POINTS;
        let halfwidths = (1..=n).map(|k| 0.5 * gap * (1.2 * k as f64 / n as f64)).collect();
        Self { annealing_times: default_times(), gammas, halfwidths }
    }

    pub fn validate(&self) -> Result<()> {
        check_axis("annealing_times", &self.annealing_times, false)?;
        check_axis("gammas", &self.gammas, true)?;
        check_axis("halfwidths", &self.halfwidths, true)
    }
}

pub fn default_times() -> Vec<f64> {
    log_space(1.0, 2000.0, DEFAULT_TIME_POINTS)
}

fn check_axis(name: &str, values: &[f64], allow_zero: bool) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidConfig(format!("{name} grid is empty")));
    }
    for w in values.windows(2) {
        if w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidConfig(format!("{name} grid must be strictly ascending")));
        }
    }
    let ok = |v: f64| v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
    if let Some(bad) = values.iter().find(|&&v| !ok(v)) {
        return Err(Error::InvalidConfig(format!("{name} grid has invalid value {bad}")));
    }
    Ok(())
}

/// How many RK4 steps each anneal uses.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum StepPolicy {
    /// `max ‖H(t)‖ Δt <= 0.05`
    #[default]
    Auto,
    Fixed(usize),
}

/// Outcome of one open-system anneal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunResult {
    pub annealing_time: f64,
    pub gamma: f64,
    pub moments: EnergyMoments,
    /// Ground-population deficit from the exact spectrum.
    pub epsilon_squared: f64,
    /// Sufficiency check: `<H> <= (E0+E1)/2` implies `ε² <= ½` for this state.
    pub sufficiency_holds: bool,
}

/// Problem/driver pair with its exact spectrum and a run cache.
pub struct AnnealProblem {
    problem: PauliHamiltonian,
    schedule: Schedule,
    observable: EnergyObservable,
    spectrum: Spectrum,
    e0: f64,
    e1: f64,
    steps: StepPolicy,
    axis: Axis,
    cache: Mutex<HashMap<(u64, u64), RunResult>>,
}

impl AnnealProblem {
    pub fn new(problem: PauliHamiltonian, driver: &PauliHamiltonian) -> Result<Self> {
        let schedule = Schedule::new(&problem, driver)?;
        let spectrum = spectra::diagonalize(&problem.to_matrix()?)?;
        let (e0, e1) = spectra::first_gap(&spectrum, spectra::DEGENERACY_TOL)?;
        let observable = EnergyObservable::new(problem.clone())?;
        Ok(Self {
            problem,
            schedule,
            observable,
            spectrum,
            e0,
            e1,
            steps: StepPolicy::Auto,
            axis: Axis::Z,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Problem Hamiltonian with the transverse-field driver on the same register.
    pub fn with_default_driver(problem: PauliHamiltonian) -> Result<Self> {
        let driver = dynamics::default_driver(problem.num_qubits());
        Self::new(problem, &driver)
    }

    pub fn with_steps(mut self, steps: StepPolicy) -> Self {
        self.steps = steps;
        self.cache.get_mut().unwrap().clear();
        self
    }

    pub fn with_axis(mut self, axis: Axis) -> Self {
        self.axis = axis;
        self.cache.get_mut().unwrap().clear();
        self
    }

    pub fn problem(&self) -> &PauliHamiltonian {
        &self.problem
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Exact `(E0, E1)`.
    pub fn levels(&self) -> (f64, f64) {
        (self.e0, self.e1)
    }

    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }

    pub fn config(&self, annealing_time: f64, gamma: f64) -> Result<AnnealConfig> {
        let steps = match self.steps {
            StepPolicy::Auto => self.schedule.default_steps(annealing_time),
            StepPolicy::Fixed(n) => n,
        };
        Ok(AnnealConfig::new(annealing_time, gamma, steps)?.with_axis(self.axis))
    }

    /// Number of anneals computed so far.
    pub fn cached_runs(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    pub fn run(&self, annealing_time: f64, gamma: f64) -> Result<RunResult> {
        let key = (annealing_time.to_bits(), gamma.to_bits());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(*hit);
        }
        let result = self.compute(annealing_time, gamma).map_err(|e| Error::Cell {
            gamma,
            time: annealing_time,
            source: Box::new(e),
        })?;
        self.cache.lock().unwrap().insert(key, result);
        Ok(result)
    }

    fn compute(&self, annealing_time: f64, gamma: f64) -> Result<RunResult> {
        let cfg = self.config(annealing_time, gamma)?;
        let (rho, _) = dynamics::evolve_open_on(&self.schedule, &cfg)?;
        let moments = self.observable.moments(&rho)?;
        let decomposition = spectra::decompose(&rho, &self.spectrum)?;
        let sufficiency_holds = certify::verify_sufficiency(&self.spectrum, &rho)?;
        Ok(RunResult {
            annealing_time,
            gamma,
            moments,
            epsilon_squared: decomposition.epsilon_squared,
            sufficiency_holds,
        })
    }

    /// Runs every `(T, γ)` pair, in parallel, returned in input order.
    pub fn run_all(&self, cells: &[(f64, f64)]) -> Result<Vec<RunResult>> {
        cells.par_iter().map(|&(t, g)| self.run(t, g)).collect()
    }

    /// Grid-minimum over `times[window]` of the mean energy at `gamma`.
    ///
    /// When the minimum lands on an edge of the window that is not an edge
    /// of the grid, the window grows one point at a time until the minimum
    /// is interior.
    fn optimal_in_window(&self, gamma: f64, times: &[f64], lo: usize, hi: usize) -> Result<(usize, RunResult)> {
        let (mut lo, mut hi) = (lo, hi.min(times.len() - 1));
        loop {
            let cells: Vec<(f64, f64)> = times[lo..=hi].iter().map(|&t| (t, gamma)).collect();
            let runs = self.run_all(&cells)?;
            let best = argmin_mean(&runs);
            let idx = lo + best;
            if idx == lo && lo > 0 {
                lo -= 1;
            } else if idx == hi && hi + 1 < times.len() {
                hi += 1;
            } else {
                return Ok((idx, runs[best]));
            }
        }
    }
}

/// Index of the smallest mean; ties go to the earlier (smaller-T) entry.
fn argmin_mean(runs: &[RunResult]) -> usize {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.moments.mean < runs[best].moments.mean {
            best = i;
        }
    }
    best
}

/// `time_sweep` output row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepCell {
    pub annealing_time: f64,
    pub gamma: f64,
    pub mean: f64,
    pub variance: f64,
    pub epsilon_squared: f64,
    /// This T minimizes the mean at this γ.
    pub optimal: bool,
}

/// One cell per `(γ, T)`, γ-major, with the optimal T flagged per γ.
pub fn time_sweep(problem: &AnnealProblem, gammas: &[f64], annealing_times: &[f64]) -> Result<Vec<SweepCell>> {
    check_axis("gammas", gammas, true)?;
    check_axis("annealing_times", annealing_times, false)?;
    let cells: Vec<(f64, f64)> =
        gammas.iter().flat_map(|&g| annealing_times.iter().map(move |&t| (t, g))).collect();
    let runs = problem.run_all(&cells)?;
    let mut out = Vec::with_capacity(runs.len());
    for chunk in runs.chunks(annealing_times.len()) {
        let best = argmin_mean(chunk);
        out.extend(chunk.iter().enumerate().map(|(i, r)| SweepCell {
            annealing_time: r.annealing_time,
            gamma: r.gamma,
            mean: r.moments.mean,
            variance: r.moments.variance,
            epsilon_squared: r.epsilon_squared,
            optimal: i == best,
        }));
    }
    Ok(out)
}

/// Optimal-T run for each γ of the grid, in γ order, with its T index.
fn grid_optima(problem: &AnnealProblem, gammas: &[f64], times: &[f64]) -> Result<Vec<(usize, RunResult)>> {
    let sweep = time_sweep(problem, gammas, times)?;
    let mut out = Vec::with_capacity(gammas.len());
    for (gi, chunk) in sweep.chunks(times.len()).enumerate() {
        let idx = chunk.iter().position(|c| c.optimal).expect("one optimal cell per gamma");
        out.push((idx, problem.run(times[idx], gammas[gi])?));
    }
    Ok(out)
}

/// What a threshold map tests at the optimal-T run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    /// The measured energy is below the threshold.
    Applicability,
    /// Applicability, and the error bar is below δM0.
    Improvement,
}

impl MapKind {
    fn passes(self, report: &CertificationReport) -> bool {
        match self {
            MapKind::Applicability => report.variance_is_bound,
            MapKind::Improvement => report.improves_preestimate,
        }
    }
}

impl std::str::FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "applicability" => Ok(Self::Applicability),
            "improvement" => Ok(Self::Improvement),
            other => Err(format!("unknown map kind '{other}' (applicability|improvement)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdStatus {
    Ok,
    /// The threshold sits at or below E0, so no anneal can pass.
    AlwaysFails,
    /// The predicate does not change over the γ grid.
    NotBracketed,
}

impl ThresholdStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdStatus::Ok => "ok",
            ThresholdStatus::AlwaysFails => "always_fails",
            ThresholdStatus::NotBracketed => "not_bracketed",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(Self::Ok),
            "always_fails" => Some(Self::AlwaysFails),
            "not_bracketed" => Some(Self::NotBracketed),
            _ => None,
        }
    }
}

/// Largest dephasing rate at which the scheme still succeeds for one
/// pre-estimate half-width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdPoint {
    pub halfwidth: f64,
    /// `None` when the predicate fails everywhere. For a predicate that
    /// passes on the whole grid this is the largest grid γ (a lower bound).
    pub gamma_threshold: Option<f64>,
    pub status: ThresholdStatus,
}

impl ThresholdPoint {
    /// Threshold as an ordered value: absent thresholds sort below every γ.
    pub fn ordered_value(&self) -> f64 {
        self.gamma_threshold.unwrap_or(f64::NEG_INFINITY)
    }
}

pub fn threshold_map_applicability(
    problem: &AnnealProblem,
    gammas: &[f64],
    annealing_times: &[f64],
    halfwidths: &[f64],
    offset_mode: OffsetMode,
) -> Result<Vec<ThresholdPoint>> {
    threshold_map(problem, gammas, annealing_times, halfwidths, offset_mode, MapKind::Applicability)
}

pub fn threshold_map_improvement(
    problem: &AnnealProblem,
    gammas: &[f64],
    annealing_times: &[f64],
    halfwidths: &[f64],
    offset_mode: OffsetMode,
) -> Result<Vec<ThresholdPoint>> {
    threshold_map(problem, gammas, annealing_times, halfwidths, offset_mode, MapKind::Improvement)
}

/// Threshold γ per half-width `h`, using the pre-estimate synthesized with
/// `δM0 = δM1 = h`.
///
/// The predicate is first evaluated at the optimal T of each grid γ. If it
/// passes on a leading run of the grid and fails on everything after, the
/// crossing is refined by bisection (geometric, or arithmetic when the
/// lower bracket is γ = 0) with fresh simulations until the bracket is
/// narrower than 1% of its upper end. A pass after the first failure
/// breaks the single-crossing assumption, and the grid value is reported
/// without refinement.
pub fn threshold_map(
    problem: &AnnealProblem,
    gammas: &[f64],
    annealing_times: &[f64],
    halfwidths: &[f64],
    offset_mode: OffsetMode,
    kind: MapKind,
) -> Result<Vec<ThresholdPoint>> {
    check_axis("halfwidths", halfwidths, true)?;
    let optima = grid_optima(problem, gammas, annealing_times)?;
    halfwidths
        .par_iter()
        .map(|&h| threshold_for(problem, gammas, annealing_times, &optima, h, offset_mode, kind))
        .collect()
}

fn threshold_for(
    problem: &AnnealProblem,
    gammas: &[f64],
    times: &[f64],
    optima: &[(usize, RunResult)],
    halfwidth: f64,
    offset_mode: OffsetMode,
    kind: MapKind,
) -> Result<ThresholdPoint> {
    let pre = spectra::synthesize_preestimate(problem.spectrum(), halfwidth, halfwidth, offset_mode)?;
    let thr = certify::threshold(&pre);
    let (e0, e1) = problem.levels();
    let centered_out = offset_mode == OffsetMode::Centered && halfwidth >= 0.5 * (e1 - e0);
    if centered_out || thr <= e0 {
        return Ok(ThresholdPoint { halfwidth, gamma_threshold: None, status: ThresholdStatus::AlwaysFails });
    }
    let passes = |r: &RunResult| kind.passes(&certify::certify(&r.moments, &pre));
    let pattern: Vec<bool> = optima.iter().map(|(_, r)| passes(r)).collect();

    let leading = pattern.iter().take_while(|&&p| p).count();
    if leading == 0 {
        return Ok(ThresholdPoint { halfwidth, gamma_threshold: None, status: ThresholdStatus::NotBracketed });
    }
    if leading == pattern.len() {
        return Ok(ThresholdPoint {
            halfwidth,
            gamma_threshold: Some(*gammas.last().unwrap()),
            status: ThresholdStatus::NotBracketed,
        });
    }
    let i = leading - 1;
    if pattern[leading..].iter().any(|&p| p) {
        return Ok(ThresholdPoint { halfwidth, gamma_threshold: Some(gammas[i]), status: ThresholdStatus::Ok });
    }

    let (mut lo, mut hi) = (gammas[i], gammas[i + 1]);
    let (mut idx_lo, mut idx_hi) = (optima[i].0, optima[i + 1].0);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= BISECTION_REL_TOL * hi {
            break;
        }
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
        let (a, b) = (idx_lo.min(idx_hi), idx_lo.max(idx_hi));
        let (idx, run) = problem.optimal_in_window(mid, times, a.saturating_sub(1), b + 1)?;
        if passes(&run) {
            lo = mid;
            idx_lo = idx;
        } else {
            hi = mid;
            idx_hi = idx;
        }
    }
    Ok(ThresholdPoint { halfwidth, gamma_threshold: Some(lo), status: ThresholdStatus::Ok })
}

/// `errorbar_table` output row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorBarRow {
    pub gamma: f64,
    pub optimal_time: f64,
    pub mean: f64,
    pub error_bar: f64,
    pub certified: bool,
    pub e0_exact: f64,
}

/// Tolerance for `mean >= E0` checks on integrated states.
pub const VARIATIONAL_TOL: f64 = 1e-9;

/// Per grid γ at the optimal T: the estimate, its variance-based error bar
/// and whether the pre-estimate certifies it.
///
/// Fails if any row has `mean < E0`, or a certified row has
/// `E0 < mean - error_bar`.
pub fn errorbar_table(
    problem: &AnnealProblem,
    gammas: &[f64],
    annealing_times: &[f64],
    pre: &PreEstimate,
) -> Result<Vec<ErrorBarRow>> {
    let optima = grid_optima(problem, gammas, annealing_times)?;
    let (e0, _) = problem.levels();
    let mut rows = Vec::with_capacity(optima.len());
    for (_, run) in optima {
        let report = certify::certify(&run.moments, pre);
        if run.moments.mean < e0 - VARIATIONAL_TOL {
            return Err(Error::TheoremViolation(run.moments.mean - e0));
        }
        if report.variance_is_bound && run.moments.mean - report.error_bar > e0 + VARIATIONAL_TOL {
            return Err(Error::TheoremViolation(e0 - (run.moments.mean - report.error_bar)));
        }
        rows.push(ErrorBarRow {
            gamma: run.gamma,
            optimal_time: run.annealing_time,
            mean: run.moments.mean,
            error_bar: report.error_bar,
            certified: report.variance_is_bound,
            e0_exact: e0,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// CSV

pub const TIME_SWEEP_HEADER: &str = "gamma_ghz,T_ns,mean_ghz,variance_ghz2,epsilon_squared,optimal";
pub const THRESHOLD_MAP_HEADER: &str = "halfwidth_ghz,gamma_threshold_ghz,status";
pub const ERRORBAR_HEADER: &str = "gamma_ghz,T_ns_opt,mean_ghz,error_bar_ghz,certified,e0_exact_ghz";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub trait CsvTable: Sized {
    const HEADER: &'static str;
    fn write_row(&self, out: &mut String);
    fn parse_row(fields: &[&str]) -> std::result::Result<Self, String>;
}

pub fn to_csv<T: CsvTable>(rows: &[T]) -> String {
    let mut out = String::new();
    out.push_str(T::HEADER);
    out.push('\n');
    for r in rows {
        r.write_row(&mut out);
        out.push('\n');
    }
    out
}

pub fn from_csv<T: CsvTable>(text: &str) -> Result<Vec<T>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == T::HEADER => {}
        _ => return Err(Error::Csv { line: 1, msg: format!("expected header '{}'", T::HEADER) }),
    }
    let columns = T::HEADER.split(',').count();
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns {
            return Err(Error::Csv { line: i + 1, msg: format!("expected {columns} fields, got {}", fields.len()) });
        }
        rows.push(T::parse_row(&fields).map_err(|msg| Error::Csv { line: i + 1, msg })?);
    }
    Ok(rows)
}

fn num(s: &str) -> std::result::Result<f64, String> {
    s.parse().map_err(|_| format!("bad number '{s}'"))
}

fn flag(s: &str) -> std::result::Result<bool, String> {
    s.parse().map_err(|_| format!("bad boolean '{s}'"))
}

impl CsvTable for SweepCell {
    const HEADER: &'static str = TIME_SWEEP_HEADER;

    fn write_row(&self, out: &mut String) {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(self.gamma),
            fmt_f64(self.annealing_time),
            fmt_f64(self.mean),
            fmt_f64(self.variance),
            fmt_f64(self.epsilon_squared),
            self.optimal
        );
    }

    fn parse_row(f: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            gamma: num(f[0])?,
            annealing_time: num(f[1])?,
            mean: num(f[2])?,
            variance: num(f[3])?,
            epsilon_squared: num(f[4])?,
            optimal: flag(f[5])?,
        })
    }
}

impl CsvTable for ThresholdPoint {
    const HEADER: &'static str = THRESHOLD_MAP_HEADER;

    fn write_row(&self, out: &mut String) {
        let g = self.gamma_threshold.map(fmt_f64).unwrap_or_default();
        let _ = write!(out, "{},{},{}", fmt_f64(self.halfwidth), g, self.status.as_str());
    }

    fn parse_row(f: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            halfwidth: num(f[0])?,
            gamma_threshold: if f[1].is_empty() { None } else { Some(num(f[1])?) },
            status: ThresholdStatus::parse(f[2]).ok_or_else(|| format!("bad status '{}'", f[2]))?,
        })
    }
}

impl CsvTable for ErrorBarRow {
    const HEADER: &'static str = ERRORBAR_HEADER;

    fn write_row(&self, out: &mut String) {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(self.gamma),
            fmt_f64(self.optimal_time),
            fmt_f64(self.mean),
            fmt_f64(self.error_bar),
            self.certified,
            fmt_f64(self.e0_exact)
        );
    }

    fn parse_row(f: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            gamma: num(f[0])?,
            optimal_time: num(f[1])?,
            mean: num(f[2])?,
            error_bar: num(f[3])?,
            certified: flag(f[4])?,
            e0_exact: num(f[5])?,
        })
    }
}
