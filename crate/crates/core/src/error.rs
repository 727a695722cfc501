use thiserror::Error;

/// Errors raised by the forward and inverse solvers.
///
/// Numeric payloads are stored as `f64` regardless of the working scalar so
/// the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid needs at least 16 points, got {0}")]
    GridTooSmall(usize),

    #[error("sampled functions live on different grids")]
    GridMismatch,

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("leading coefficient of r1 is {0}, expected 1")]
    NonMonic(String),

    #[error("r1 and r2 share the root {0} (distance {1:e})")]
    CommonRoot(String, f64),

    #[error("r2 has degree {r2} which exceeds deg r1 = {r1}")]
    DegreeMismatch { r1: usize, r2: usize },

    #[error("solution magnitude exceeded the overflow guard at lambda = {0}")]
    Overflow(String),

    #[error("eigenvalue {index} at lambda = {lambda} is not simple")]
    MultipleEigenvalue { index: usize, lambda: String },

    #[error("argument principle counts {expected} eigenvalues with |lambda| < {radius:e} but {found} were located")]
    MissedRoot { expected: i64, found: usize, radius: f64 },

    #[error("Newton iteration failed to converge from seed {0}")]
    NoConvergence(String),

    #[error("r1 vanishes at the eigenvalue lambda = {0}")]
    VanishingR1(String),

    #[error("weight-number denominator vanishes at lambda = {0}")]
    ZeroAlphaDenominator(String),

    #[error("lambda = {0} lies within the pole guard of an eigenvalue")]
    NearPole(String),

    #[error("spectral data counts differ: target {target}, model {model}")]
    CountMismatch { target: usize, model: usize },

    #[error("entry {0} of the unperturbed prefix differs between target and model")]
    PrefixMismatch(usize),

    #[error("main equation at grid index {x_index} is singular (condition estimate {condition:e})")]
    SingularSystem { x_index: usize, condition: f64 },

    #[error("perturbation left the solvability ball: singular main equation at grid index {x_index} (condition estimate {condition:e})")]
    DeltaTooLarge { x_index: usize, condition: f64 },

    #[error("sampled values are not a polynomial of degree <= {degree}: residual {residual:e}")]
    ExtractionResidual { degree: usize, residual: f64 },

    #[error("contour radius {0:e} is below the resolvable limit")]
    NearbyEigenvalue(f64),

    #[error("sweep failed at delta {delta:e}: {source}")]
    SweepFailure { delta: f64, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
