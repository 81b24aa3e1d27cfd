use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension {0} is odd; covariance matrices are 2N x 2N")]
    OddDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("generator block {block} is not symmetric (asymmetry {asymmetry:e})")]
    AsymmetricBlock { block: &'static str, asymmetry: f64 },

    #[error("generator is not in canonical gauge (diagonal of C must vanish)")]
    NonCanonicalGenerator,

    #[error("generator violates the Hamiltonian condition (residual {0:e})")]
    NotHamiltonian(f64),

    #[error("matrix is not symplectic (residual {0:e})")]
    NotSymplectic(f64),

    #[error("eigen-solve failed: {0}")]
    EigenSolve(&'static str),

    #[error("symplectic spectrum is not paired (mismatch {0:e})")]
    PairingViolation(f64),

    #[error("matrix exponential did not converge")]
    ExpNonConvergence,

    #[error("matrix is singular")]
    Singular,

    #[error("negative radicand {0:e} beyond rounding tolerance")]
    NegativeRadicand(f64),

    #[error("state is unphysical (smallest symplectic eigenvalue {0})")]
    Unphysical(f64),

    #[error("{operation} supports only {supported} mode(s), got {modes}")]
    UnsupportedModes {
        operation: &'static str,
        supported: &'static str,
        modes: usize,
    },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    QuadratureNonConvergence { estimate: f64, error: f64 },

    #[error("rejection sampler exhausted {0} retries without acceptance")]
    RetryBudgetExhausted(u64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
