//! Numerical laboratory for orthogonal Hyers–Ulam stability of the
//! Pexiderized quadratic equation `f(x+y) + g(x-y) = h(x) + k(y)`.
//!
//! The crate builds orthogonally additive approximants of approximate
//! solutions by contraction iteration on a sampled function space and checks
//! the resulting deviations against explicit multiples of the measured
//! defect.

// `!(x > 0.0)` is how NaN gets rejected along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fixedpoint;
pub mod funcspace;
pub mod orthogonality;
pub mod perturb;
pub mod point;
pub mod stability;

pub use error::{DimensionMismatch, EvalError, FixedPointError, OrthoError, PerturbError, StabilityError};
pub use point::Point;
