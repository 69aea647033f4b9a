use thiserror::Error;

/// Errors produced by the model, solvers and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("displacement has length {got}, expected {expected}")]
    Length { expected: usize, got: usize },

    #[error("displacement is not mean-zero (mean = {mean:e})")]
    NotMeanZero { mean: f64 },

    #[error("chain is not strictly increasing at bond {bond} (strain {strain})")]
    NonMonotone { bond: i64, strain: f64 },

    #[error("bump supports overlap at bond {bond}: strain {strain} <= sigma0 {sigma0}")]
    Overlap { bond: i64, strain: f64, sigma0: f64 },

    #[error("mesh under-resolves the bump support: {points} nodes per support, need {required}")]
    UnderResolved { points: usize, required: usize },

    #[error("boundary separation violated: {0}")]
    Separation(String),

    #[error("tau = {tau:e} exceeds the admissible maximum {max:e}")]
    TauTooLarge { tau: f64, max: f64 },

    #[error("invalid partition: K = {k} must satisfy 1 <= K < N = {n}")]
    Partition { k: usize, n: usize },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("line search failed at iteration {iter} (gradient norm {grad_norm:e})")]
    LineSearch { iter: usize, grad_norm: f64 },

    #[error("no convergence after {iters} iterations (gradient norm {grad_norm:e})")]
    MaxIterations { iters: usize, grad_norm: f64 },

    #[error("strain guard tripped at bond {bond}: strain {strain} < {guard}")]
    StrainGuard { bond: i64, strain: f64, guard: f64 },

    #[error("finite-difference Hessian asymmetry {rel:e} exceeds {tol:e}")]
    HessianAsymmetry { rel: f64, tol: f64 },

    #[error("linear algebra failure: {0}")]
    LinAlg(String),

    #[error("missing required key `{key}` in section [{section}]")]
    MissingKey { section: String, key: String },

    #[error("line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
