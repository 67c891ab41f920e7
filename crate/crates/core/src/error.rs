use thiserror::Error;

/// Errors produced by structure solves, model construction and integration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("two-form is not antisymmetric (max |D + D^T| = {defect:e})")]
    NotAntisymmetric { defect: f64 },

    #[error("linear system is rank deficient (rank {rank} of {dim}): {context}")]
    RankDeficient {
        rank: usize,
        dim: usize,
        context: &'static str,
    },

    #[error("residual {residual:e} of {context} exceeds tolerance {tol:e}")]
    ResidualTooLarge {
        context: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("gradient of the Hamiltonian is unavailable at this point")]
    GradientUnavailable,

    #[error("wedge evaluation on {arity} vectors exceeds the brute-force limit of 9")]
    TooLarge { arity: usize },

    #[error("wedge power needs an odd number of vectors, got {0}")]
    EvenArity(usize),

    #[error("symplectic structure has no primitive one-form")]
    MissingPrimitive,

    #[error("primitive does not differentiate to the symplectic form (defect {defect:e})")]
    PrimitiveMismatch { defect: f64 },

    #[error("point is not on the level set: H = {value}, level = {level}")]
    NotOnLevelSet { value: f64, level: f64 },

    #[error("Liouville field is tangent to the level set (dH(Y) = {dh_y:e})")]
    TangentLiouville { dh_y: f64 },

    #[error("subspace is degenerate for the symplectic form")]
    DegenerateSubspace,

    #[error("Liouville factor fit is poor (relative residual {residual:e})")]
    PoorFit { residual: f64 },

    #[error("closed-form oscillator solution needs kappa < 2, got {kappa}")]
    OverdampedOracleUnavailable { kappa: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field evaluation failed at step {step}: {source}")]
    FieldEvaluationFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("decay fit needs strictly positive values")]
    NonPositiveValues,

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("model `{0}` has no target PDE")]
    NoTargetPde(String),

    #[error("model `{0}` has no exact oracle")]
    NoOracle(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
