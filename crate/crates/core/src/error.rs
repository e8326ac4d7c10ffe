use thiserror::Error;

use crate::point::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dimension mismatch: expected {expected}, found {found}")]
pub struct DimensionMismatch {
    pub expected: usize,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrthoError {
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("the Thalesian construction needs a nonzero x")]
    ZeroVector,
    #[error("negative scale {0} for the Thalesian construction")]
    NegativeLambda(f64),
    #[error(
        "thalesian-not-found for lambda={lambda}: residuals x⊥y0 = {residual_first:e}, \
         x+y0⊥λx−y0 = {residual_second:e}"
    )]
    ThalesianNotFound {
        lambda: f64,
        residual_first: f64,
        residual_second: f64,
    },
    #[error("could not generate an orthogonal pair after {attempts} attempts")]
    SamplingFailed { attempts: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{label}: {source}")]
    Dimension {
        label: String,
        #[source]
        source: DimensionMismatch,
    },
    #[error("{label} produced a non-finite value at {point:?}")]
    NonFinite { label: String, point: Point },
    #[error("{label}: argument doubling overflows at {point:?}")]
    Overflow { label: String, point: Point },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixedPointError {
    #[error("Lipschitz constant must lie in [0, 1), got {0}")]
    InvalidLambda(f64),
    #[error("{label} does not vanish at 0 (|phi(0)| = {residual:e})")]
    NotInE { label: String, residual: f64 },
    #[error("invalid iteration settings: {0}")]
    InvalidConfig(String),
    #[error("evaluation failed after {reached} doublings: {source}")]
    Eval {
        reached: usize,
        #[source]
        source: EvalError,
    },
    #[error("sample grid is empty")]
    EmptyGrid,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    FixedPoint(#[from] FixedPointError),
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error("extraction of {stage} diverged after {steps} steps: the orbit distance is infinite")]
    Diverged { stage: String, steps: usize },
    #[error("no orthogonal pairs supplied")]
    EmptyPairs,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("T fails the doubling identity T^e(2x) = 4T^e(x): residual {residual:e} > {tol:e}")]
    DoublingIdentity { residual: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbError {
    #[error("quadratic form {index} is not symmetric (max |B - Bᵀ| = {residual:e})")]
    Asymmetric { index: usize, residual: f64 },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("noise bound must be finite and nonnegative, got {0}")]
    InvalidDelta(f64),
    #[error("ground truth contains a non-finite entry")]
    NonFinite,
}
