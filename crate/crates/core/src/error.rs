use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid term: {0}")]
    InvalidTerm(String),

    #[error("{qubits} qubits exceeds the dense-matrix cap of {cap}")]
    TooManyQubits { qubits: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max |A - A^dag| = {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("spectrum has no level above the ground level (tolerance {0:e})")]
    DegenerateSpectrum(f64),

    #[error("time {t} outside schedule [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },

    #[error("invalid anneal configuration: {0}")]
    InvalidConfig(String),

    #[error("norm drift {0:e} exceeds 1e-6; increase the step count")]
    NormDrift(f64),

    #[error("trace drift {0:e} exceeds 1e-6; increase the step count")]
    TraceDrift(f64),

    #[error("density matrix not positive: minimum eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("residual imaginary coefficient {0:e} after squaring a Hamiltonian")]
    ImaginaryResidue(f64),

    #[error("theorem check violated: margin {0:e}")]
    TheoremViolation(f64),

    #[error("cell gamma={gamma} T={time}: {source}")]
    Cell {
        gamma: f64,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable name of the failure.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::InvalidTerm(_) => "invalid-term",
            Error::TooManyQubits { .. } => "too-many-qubits",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NotHermitian(_) => "not-hermitian",
            Error::NoConvergence(_) => "no-convergence",
            Error::DegenerateSpectrum(_) => "degenerate-spectrum",
            Error::TimeOutOfRange { .. } => "time-out-of-range",
            Error::InvalidConfig(_) => "invalid-config",
            Error::NormDrift(_) => "norm-drift",
            Error::TraceDrift(_) => "trace-drift",
            Error::NotPositive(_) => "not-positive",
            Error::ImaginaryResidue(_) => "imaginary-residue",
            Error::TheoremViolation(_) => "theorem-violation",
            Error::Cell { source, .. } => source.code(),
            Error::Csv { .. } => "csv",
            Error::Io(_) => "io",
        }
    }

    /// True for errors caused by the inputs rather than by a computation.
    pub fn is_input_error(&self) -> bool {
        if let Error::Cell { source, .. } = self {
            return source.is_input_error();
        }
        matches!(
            self,
            Error::Parse { .. }
                | Error::InvalidTerm(_)
                | Error::TooManyQubits { .. }
                | Error::InvalidConfig(_)
                | Error::Csv { .. }
                | Error::Io(_)
        )
    }
}
