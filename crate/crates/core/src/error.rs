//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type FqsResult<T> = Result<T, FqsError>;

/// All failure modes surfaced by the library.
///
/// The CLI maps these to process exit codes: validation-class errors exit
/// with 2, numerical failures with 3 (bound violations are not errors; the
/// verify command inspects its reports and exits 1 itself).
#[derive(Debug, Error)]
pub enum FqsError {
    /// Both `H_m` and `H_{-m}` were supplied but `H_{-m} != H_m^dagger`.
    #[error("non-Hermitian Fourier pair at m = {m}: ||H_(-m) - H_m^dagger|| = {residual:.3e}")]
    NonHermitianPair { m: i32, residual: f64 },

    /// A stored Fourier component violates the declared decay profile.
    #[error("profile violation at m = {m}: {detail}")]
    ProfileViolation { m: i32, detail: String },

    /// Quadrature reconstruction of a signal missed the caller tolerance.
    #[error("quadrature residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    QuadratureResidual { residual: f64, tol: f64 },

    /// A target accuracy outside (0, 1).
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    /// The Sambe half-width cannot host the requested hopping range.
    #[error("half-width L = {l} too small: requires L >= {required}")]
    LTooSmall { l: usize, required: usize },

    /// An operator expected to be Hermitian is not.
    #[error("matrix is not Hermitian: residual {0:.3e}")]
    NonHermitian(f64),

    /// Adaptive integration collapsed below the minimum step size.
    #[error("adaptive step underflow at t = {t:.6e} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    /// A Fourier index fell outside the truncated index set.
    #[error("index {l} outside D^{l_max} = {{-{}+1, ..., {l_max}}}", l_max)]
    IndexOutOfRange { l: i64, l_max: usize },

    /// An LCU coefficient was negative.
    #[error("negative LCU coefficient {0}")]
    NegativeCoefficient(f64),

    /// An LCU term matrix was not unitary.
    #[error("LCU term {index} not unitary: residual {residual:.3e}")]
    NonUnitaryTerm { index: usize, residual: f64 },

    /// A nonzero Fourier component has no LCU attached.
    #[error("no LCU decomposition supplied for Fourier mode m = {0}")]
    MissingModeEncoding(i32),

    /// All coefficients handed to the coefficient oracle were zero.
    #[error("coefficient oracle requires at least one nonzero alpha_m")]
    AllZero,

    /// Input validation failed (shape, range, or config errors).
    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical routine failed to converge or returned nonsense.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Config(#[from] serde_json::Error),
}

impl FqsError {
    /// CLI exit code class for this error (2 = validation, 3 = numerical).
    pub fn exit_code(&self) -> i32 {
        match self {
            FqsError::Numerical(_) | FqsError::StepUnderflow { .. } => 3,
            _ => 2,
        }
    }

    /// Stable machine-readable variant name for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            FqsError::NonHermitianPair { .. } => "NonHermitianPair",
            FqsError::ProfileViolation { .. } => "ProfileViolation",
            FqsError::QuadratureResidual { .. } => "QuadratureResidual",
            FqsError::InvalidEpsilon(_) => "InvalidEpsilon",
            FqsError::LTooSmall { .. } => "LTooSmall",
            FqsError::NonHermitian(_) => "NonHermitian",
            FqsError::StepUnderflow { .. } => "StepUnderflow",
            FqsError::IndexOutOfRange { .. } => "IndexOutOfRange",
            FqsError::NegativeCoefficient(_) => "NegativeCoefficient",
            FqsError::NonUnitaryTerm { .. } => "NonUnitaryTerm",
            FqsError::MissingModeEncoding(_) => "MissingModeEncoding",
            FqsError::AllZero => "AllZero",
            FqsError::Validation(_) => "Validation",
            FqsError::Numerical(_) => "Numerical",
            FqsError::Io(_) => "Io",
            FqsError::Config(_) => "Config",
        }
    }
}
