use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("layout dimension 2^{n_qubits} x {fock_levels} exceeds the 2^26 limit")]
    DimensionTooLarge { n_qubits: usize, fock_levels: usize },
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("qubit site {site} out of range 1..={n_qubits}")]
    SiteOutOfRange { site: usize, n_qubits: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operands live on different layouts")]
    LayoutMismatch,
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("Hermitian eigendecomposition did not converge (numerically degenerate input)")]
    EigenFailure,
    #[error("matrix is not Hermitian: asymmetry {0:e}")]
    NotHermitian(f64),
    #[error("projector check failed: {0}")]
    InvalidProjector(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("did not converge: {0}")]
    NotConverged(String),
    #[error("schedule violates the timing condition 4*lambda*tau = (2n+1)pi (residual {0:e})")]
    ScheduleViolation(f64),
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("N = {0} too large for 2^N enumeration (limit {1})")]
    TooManyQubits(usize, usize),
    #[error("Monte Carlo needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("degenerate batching: {0}")]
    DegenerateBatching(String),
}

pub type Result<T> = std::result::Result<T, Error>;
