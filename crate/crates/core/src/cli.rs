//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 computation error,
//! 3 certification attempted but not obtained. Errors are reported on
//! stderr as a single `error: <code>: <detail>` line.
//!
//! A `--config FILE` holds `key = value` lines (`#` starts a comment).
//! Keys are long flag names; `flag = true` sets a switch. Values from the
//! file are applied first, so flags given on the command line win.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::certify;
use crate::dynamics::{self, AnnealConfig};
use crate::error::{Error, Result};
use crate::experiments::{self, AnnealProblem, MapKind, StepPolicy};
use crate::measure::EnergyObservable;
use crate::pauli::{Axis, PauliHamiltonian};
use crate::spectra::{self, OffsetMode, PreEstimate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_NOT_CERTIFIED: i32 = 3;

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "ANNEAL_CERTIFY_THREADS";

const SPECTRUM_SCHEMA: &str = "CSV columns:\n  index,energy_ghz\nOne row per eigenvalue, ascending.";

const ANNEAL_SCHEMA: &str = "CSV columns:\n  T_ns,gamma_ghz,steps,mean_ghz,variance_ghz2,epsilon_squared\n\
epsilon_squared is the population outside the ground eigenspace.";

const CERTIFY_SCHEMA: &str = "CSV columns:\n  \
measured_energy_ghz,measured_variance_ghz2,threshold_ghz,variance_is_bound,error_bar_ghz,improves_preestimate,shots\n\
followed by a one-line verdict. shots is empty for exact moments.\n\
Exit code 3 when the measured energy is not below the threshold.";

const SWEEP_SCHEMA: &str = "CSV columns:\n  gamma_ghz,T_ns,mean_ghz,variance_ghz2,epsilon_squared,optimal\n\
One row per (gamma, T), gamma-major. optimal marks the T with the lowest mean at each gamma\n\
(ties go to the smaller T).";

const MAP_SCHEMA: &str = "CSV columns:\n  halfwidth_ghz,gamma_threshold_ghz,status\n\
status is ok, always_fails (threshold at or below E0; gamma_threshold empty) or\n\
not_bracketed (the test fails at every gamma, gamma_threshold empty, or passes at every\n\
gamma, gamma_threshold = largest grid gamma).";

const ERRORBAR_SCHEMA: &str = "CSV columns:\n  gamma_ghz,T_ns_opt,mean_ghz,error_bar_ghz,certified,e0_exact_ghz\n\
One row per grid gamma at its optimal annealing time.";

const THEOREM_SCHEMA: &str = "CSV columns:\n  \
trials,min_margin_ghz2,boundary_margin_ghz2,counterexample_variance_ghz2,counterexample_error_sq_ghz2\n\
Margins are variance minus squared error. The counterexample is a two-level state with\n\
epsilon^2 = 0.9 and unit gap. Exit code 2 if any trial violates the bound.";

#[derive(Parser, Debug)]
#[command(name = "anneal-certify", version, about = "Anneal a qubit Hamiltonian and certify the energy estimate")]
#[command(args_override_self = true, propagate_version = true)]
pub struct Cli {
    /// File of `key = value` defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Worker threads (default: $ANNEAL_CERTIFY_THREADS, else all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact eigenvalues of the Hamiltonian.
    #[command(args_override_self = true, after_help = SPECTRUM_SCHEMA)]
    Spectrum {
        #[command(flatten)]
        ham: HamArgs,
    },
    /// One anneal; prints the final energy moments.
    #[command(args_override_self = true, after_help = ANNEAL_SCHEMA)]
    Anneal {
        #[command(flatten)]
        ham: HamArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// One anneal followed by the variance certificate.
    #[command(args_override_self = true, after_help = CERTIFY_SCHEMA)]
    Certify {
        #[command(flatten)]
        ham: HamArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        pre: PreArgs,
        /// Shots per Pauli term; exact moments when absent.
        #[arg(long)]
        shots: Option<u64>,
        /// Seed for shot sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mean energy over a (gamma, T) grid.
    #[command(args_override_self = true, after_help = SWEEP_SCHEMA)]
    SweepTime {
        #[command(flatten)]
        ham: HamArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Largest dephasing rate at which the certificate applies, per pre-estimate half-width.
    #[command(args_override_self = true, after_help = MAP_SCHEMA)]
    ThresholdMap {
        #[command(flatten)]
        ham: HamArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// applicability: mean below threshold; improvement: also error bar below the half-width.
        #[arg(long, default_value = "applicability")]
        kind: MapKind,
        /// Placement of the synthetic estimates: centered or worst_case_shift.
        #[arg(long, default_value = "centered")]
        offset_mode: OffsetMode,
        /// Comma-separated half-widths in GHz (default: 30 points up to 1.2·(E1-E0)/2).
        #[arg(long, value_delimiter = ',')]
        halfwidths: Option<Vec<f64>>,
        #[arg(long, default_value_t = experiments::DEFAULT_HALFWIDTH_POINTS)]
        halfwidth_points: usize,
    },
    /// Optimal-T estimate and error bar per dephasing rate.
    #[command(args_override_self = true, after_help = ERRORBAR_SCHEMA)]
    ErrorbarTable {
        #[command(flatten)]
        ham: HamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        pre: PreArgs,
    },
    /// Randomized check of the variance bound.
    #[command(name = "verify-theorem1", args_override_self = true, after_help = THEOREM_SCHEMA)]
    VerifyTheorem1 {
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
pub struct HamArgs {
    /// Hamiltonian file: one `coefficient [P<i> ...]` term per line.
    #[arg(long, value_name = "FILE")]
    pub ham: PathBuf,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Annealing time in ns.
    #[arg(long = "T", value_name = "NS")]
    pub annealing_time: f64,
    /// Dephasing rate in GHz.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Args, Debug)]
pub struct IntegratorArgs {
    /// Fixed RK4 step count (default: max ‖H‖·dt <= 0.05).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Dephasing operator: x, y or z.
    #[arg(long, default_value = "z")]
    pub axis: String,
}

#[derive(Args, Debug)]
pub struct PreArgs {
    /// Error bound on the ground-energy estimate, GHz.
    #[arg(long)]
    pub m0: f64,
    /// Error bound on the first-excited estimate, GHz.
    #[arg(long)]
    pub m1: f64,
    /// Ground-energy estimate (default: exact E0; needs --e1 too).
    #[arg(long, requires = "e1", allow_negative_numbers = true)]
    pub e0: Option<f64>,
    /// First-excited estimate (default: exact E1; needs --e0 too).
    #[arg(long, requires = "e0", allow_negative_numbers = true)]
    pub e1: Option<f64>,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Comma-separated annealing times in ns (overrides --t-min/--t-max/--t-points).
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 2000.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = experiments::DEFAULT_TIME_POINTS)]
    pub t_points: usize,
    /// Comma-separated dephasing rates in GHz (overrides the log grid).
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-5)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 1e-1)]
    pub gamma_max: f64,
    /// Positive log-spaced rates; gamma = 0 is always added.
    #[arg(long, default_value_t = experiments::DEFAULT_GAMMA_POINTS)]
    pub gamma_points: usize,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

impl GridArgs {
    fn times(&self) -> Vec<f64> {
        self.times.clone().unwrap_or_else(|| experiments::log_space(self.t_min, self.t_max, self.t_points))
    }

    fn gammas(&self) -> Vec<f64> {
        self.gammas.clone().unwrap_or_else(|| {
            let mut g = vec![0.0];
            g.extend(experiments::log_space(self.gamma_min, self.gamma_max, self.gamma_points));
            g
        })
    }
}

/// `key = value` pairs from a config file, in file order.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected 'key = value', got '{line}'") })?;
        let key = key.trim();
        if key.is_empty() || key == "config" {
            return Err(Error::Parse { line: i + 1, msg: format!("invalid config key '{key}'") });
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn config_flags(pairs: &[(String, String)]) -> Vec<OsString> {
    let mut out = Vec::new();
    for (k, v) in pairs {
        match v.as_str() {
            "true" => out.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{k}").into());
                out.push(v.into());
            }
        }
    }
    out
}

const SUBCOMMANDS: &[&str] =
    &["spectrum", "anneal", "certify", "sweep-time", "threshold-map", "errorbar-table", "verify-theorem1"];

/// Inserts flags from `--config` right after the subcommand name.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = strs.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let Some(sub) = strs.iter().skip(1).position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read config '{path}': {e}")))?;
    let flags = config_flags(&parse_config(&text)?);
    let at = sub + 2;
    let mut out = args[..at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => return report(stderr, &e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(stderr, "error: usage: {first}");
            let _ = write!(stderr, "{}", rendered.lines().skip(1).collect::<Vec<_>>().join("\n"));
            let _ = writeln!(stderr);
            return EXIT_USAGE;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => report(stderr, &e),
    }
}

fn report(stderr: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(stderr, "error: {}: {}", e.code(), e);
    if e.is_input_error() {
        EXIT_USAGE
    } else {
        EXIT_COMPUTE
    }
}

fn thread_count(cli: &Cli) -> Result<Option<usize>> {
    let n = match cli.threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("{THREADS_ENV}='{v}' is not a thread count")))?,
            ),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(Error::InvalidConfig("thread count must be >= 1".into()));
    }
    Ok(n)
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cli)? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    // Fail on an unwritable output path before any simulation.
    let mut file = match &cli.output {
        Some(p) => Some(fs::File::create(p).map_err(|e| io_context(p, e))?),
        None => None,
    };
    let mut text = String::new();
    let result = pool.install(|| dispatch(&cli.command, &mut text));
    if result.is_err() {
        if let Some(p) = &cli.output {
            drop(file.take());
            let _ = fs::remove_file(p);
        }
    }
    let code = result?;
    match file.as_mut() {
        Some(f) => f.write_all(text.as_bytes())?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(code)
}

fn io_context(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn load_hamiltonian(args: &HamArgs) -> Result<PauliHamiltonian> {
    let text = fs::read_to_string(&args.ham).map_err(|e| io_context(&args.ham, e))?;
    PauliHamiltonian::parse(&text)
}

fn parse_axis(s: &str) -> Result<Axis> {
    s.to_ascii_uppercase().parse().map_err(|_| Error::InvalidConfig(format!("unknown dephasing axis '{s}'")))
}

fn problem_for(ham: &HamArgs, integrator: &IntegratorArgs) -> Result<AnnealProblem> {
    let steps = integrator.steps.map_or(StepPolicy::Auto, StepPolicy::Fixed);
    Ok(AnnealProblem::with_default_driver(load_hamiltonian(ham)?)?
        .with_steps(steps)
        .with_axis(parse_axis(&integrator.axis)?))
}

fn preestimate(args: &PreArgs, problem: &AnnealProblem) -> Result<PreEstimate> {
    match (args.e0, args.e1) {
        (Some(e0), Some(e1)) => PreEstimate::new(e0, e1, args.m0, args.m1),
        _ => spectra::synthesize_preestimate(problem.spectrum(), args.m0, args.m1, OffsetMode::Centered),
    }
}

fn f(x: f64) -> String {
    experiments::fmt_f64(x)
}

fn dispatch(command: &Command, out: &mut String) -> Result<i32> {
    use std::fmt::Write as _;
    match command {
        Command::Spectrum { ham } => {
            let h = load_hamiltonian(ham)?;
            let s = spectra::diagonalize(&h.to_matrix()?)?;
            out.push_str("index,energy_ghz\n");
            for (i, e) in s.eigenvalues().iter().enumerate() {
                let _ = writeln!(out, "{i},{}", f(*e));
            }
        }
        Command::Anneal { ham, run } => {
            let problem = problem_for(ham, &run.integrator)?;
            let r = problem.run(run.annealing_time, run.gamma)?;
            let cfg = problem.config(run.annealing_time, run.gamma)?;
            out.push_str("T_ns,gamma_ghz,steps,mean_ghz,variance_ghz2,epsilon_squared\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                f(r.annealing_time),
                f(r.gamma),
                cfg.steps,
                f(r.moments.mean),
                f(r.moments.variance),
                f(r.epsilon_squared)
            );
        }
        Command::Certify { ham, run, pre, shots, seed } => {
            let problem = problem_for(ham, &run.integrator)?;
            let pre = preestimate(pre, &problem)?;
            let cfg: AnnealConfig = problem.config(run.annealing_time, run.gamma)?;
            let (rho, _) = dynamics::evolve_open_on(problem.schedule(), &cfg)?;
            let observable = EnergyObservable::new(problem.problem().clone())?;
            let moments = match shots {
                Some(n) => observable.sample(&rho, *n, *seed)?,
                None => observable.moments(&rho)?,
            };
            let r = certify::certify(&moments, &pre);
            out.push_str(
                "measured_energy_ghz,measured_variance_ghz2,threshold_ghz,variance_is_bound,error_bar_ghz,improves_preestimate,shots\n",
            );
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                f(r.measured_energy),
                f(r.measured_variance),
                f(r.threshold),
                r.variance_is_bound,
                f(r.error_bar),
                r.improves_preestimate,
                r.shots.map(|s| s.to_string()).unwrap_or_default()
            );
            if r.variance_is_bound {
                let _ = writeln!(
                    out,
                    "verdict: certified: E0 in [{}, {}] GHz{}",
                    f(r.measured_energy - r.error_bar),
                    f(r.measured_energy),
                    if r.improves_preestimate { ", tighter than the pre-estimate" } else { "" }
                );
            } else {
                let _ = writeln!(
                    out,
                    "verdict: not certified: energy {} is not below threshold {}",
                    f(r.measured_energy),
                    f(r.threshold)
                );
                return Ok(EXIT_NOT_CERTIFIED);
            }
        }
        Command::SweepTime { ham, grid } => {
            let problem = problem_for(ham, &grid.integrator)?;
            let cells = experiments::time_sweep(&problem, &grid.gammas(), &grid.times())?;
            out.push_str(&experiments::to_csv(&cells));
        }
        Command::ThresholdMap { ham, grid, kind, offset_mode, halfwidths, halfwidth_points } => {
            let problem = problem_for(ham, &grid.integrator)?;
            let n = *halfwidth_points;
            let widths = halfwidths.clone().unwrap_or_else(|| {
                (1..=n).map(|k| 0.5 * problem.gap() * (1.2 * k as f64 / n as f64)).collect()
            });
            let rows =
                experiments::threshold_map(&problem, &grid.gammas(), &grid.times(), &widths, *offset_mode, *kind)?;
            out.push_str(&experiments::to_csv(&rows));
        }
        Command::ErrorbarTable { ham, grid, pre } => {
            let problem = problem_for(ham, &grid.integrator)?;
            let pre = preestimate(pre, &problem)?;
            let rows = experiments::errorbar_table(&problem, &grid.gammas(), &grid.times(), &pre)?;
            out.push_str(&experiments::to_csv(&rows));
        }
        Command::VerifyTheorem1 { trials, seed } => {
            let r = certify::verify_theorem1(*trials, *seed)?;
            out.push_str(
                "trials,min_margin_ghz2,boundary_margin_ghz2,counterexample_variance_ghz2,counterexample_error_sq_ghz2\n",
            );
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.trials,
                f(r.min_margin),
                f(r.boundary_margin),
                f(r.counterexample.0),
                f(r.counterexample.1)
            );
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let pairs = parse_config("# defaults\nT = 100\n gamma=1e-3 # inline\n\nclosed = false\n").unwrap();
        assert_eq!(pairs.len(), 3);
        assert_eq!(pairs[0], ("T".into(), "100".into()));
        assert_eq!(pairs[1], ("gamma".into(), "1e-3".into()));
        let flags = config_flags(&pairs);
        assert_eq!(flags, vec![OsString::from("--T"), "100".into(), "--gamma".into(), "1e-3".into()]);
        assert!(matches!(parse_config("T 100"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_config("config = x").is_err());
    }

    #[test]
    fn config_flags_follow_subcommand() {
        let dir = std::env::temp_dir().join(format!("anneal-cli-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("c.cfg");
        fs::write(&cfg, "trials = 5\n").unwrap();
        let args: Vec<OsString> =
            vec!["x".into(), "--config".into(), cfg.clone().into(), "verify-theorem1".into(), "--seed".into(), "2".into()];
        let expanded = expand_config(args).unwrap();
        let s: Vec<String> = expanded.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(&s[3..], &["verify-theorem1", "--trials", "5", "--seed", "2"]);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
