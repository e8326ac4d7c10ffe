//! From approximate Pexider solutions to orthogonally additive approximants.
//!
//! The normalized maps are split into parity parts, the odd parts are
//! contracted with `J_{1/2}` and the even parts with `J_{1/4}`, and the limits
//! are assembled into `T = R + S`, `T' = R' + S'`, `T'' = 2R + 2S + 2S'`.
//! Every explicit estimate of the construction is then checked against the
//! measured defect.

mod bounds;
mod corollary;
mod defect;
mod pipeline;

pub use crate::orthogonality::symmetrize_relation;
pub use bounds::{all_satisfied, coef, BoundCheck, Slack, DEFAULT_ABS_FLOOR, DEFAULT_REL_SLACK};
pub use corollary::{
    run_cauchy_corollary, run_inner_product_corollary, run_quadratic_corollary, CauchyReport, Multipliers,
    QuadraticReport,
};
pub use defect::{
    axis_pairs, derive_normalized_parts, doubling_defect, measure_defects, pexider_defect, pexider_residual,
    DefectReport, NormalizedParts,
};
pub use pipeline::{
    extract_even, extract_odd, necessity_check, pipeline_identity_tol, ratz_decompose, run_main_theorem,
    AdditivityReport, Approximants, Extraction, ExtractionSummary, NecessityReport, PipelineConfig,
    RatzDecomposition, StabilityReport, StructureReport, THEOREM_CHECKS,
};
