//! Computable orthogonality relations on `R^n`.
//!
//! Three relations are provided: the trivial one (nonzero vectors are
//! orthogonal iff linearly independent), ordinary inner-product
//! orthogonality, and Birkhoff–James orthogonality over a chosen norm. Every
//! relation is total for zero by construction. Decisions use a scale-aware
//! tolerance so that homogeneity survives rescaling.

mod axioms;
mod norm;
mod sampling;
mod thales;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DimensionMismatch, OrthoError};
use crate::point::Point;

pub use axioms::{check_axioms, AxiomReport, AxiomVerdict, SymmetryObservation, Witness};
pub use norm::{bj_margin, golden_section_min, norm_eval, NormSpec, BJ_MAX_ITER, BJ_XTOL};
pub use sampling::{random_in_ball, sample_orthogonal_pairs, OrthoPair};
pub use thales::{thalesian_solve, thalesian_solve_in_plane};

/// Default decision tolerance for the orthogonality predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelationKind {
    Trivial,
    InnerProduct,
    BirkhoffJames { norm: NormSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoRelation {
    pub kind: RelationKind,
    pub tol: f64,
    /// `x ⊥' y` iff `x ⊥ y` or `y ⊥ x`.
    pub symmetrized: bool,
}

impl OrthoRelation {
    pub fn new(kind: RelationKind) -> Self {
        OrthoRelation { kind, tol: DEFAULT_TOL, symmetrized: false }
    }

    pub fn trivial() -> Self {
        Self::new(RelationKind::Trivial)
    }

    pub fn inner_product() -> Self {
        Self::new(RelationKind::InnerProduct)
    }

    pub fn birkhoff_james(norm: NormSpec) -> Self {
        Self::new(RelationKind::BirkhoffJames { norm })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Whether symmetry is guaranteed without sampling.
    pub fn is_symmetric_by_construction(&self) -> bool {
        self.symmetrized
            || match &self.kind {
                RelationKind::Trivial | RelationKind::InnerProduct => true,
                RelationKind::BirkhoffJames { norm } => norm.is_inner_product(),
            }
    }

    fn check_dims(&self, x: &Point, y: &Point) -> Result<(), DimensionMismatch> {
        x.same_dim(y)?;
        if let RelationKind::BirkhoffJames { norm: NormSpec::WeightedEuclidean { weights } } = &self.kind {
            x.check_dim(weights.len())?;
        }
        Ok(())
    }

    /// Distance from satisfying the predicate, in the relation's own scale:
    /// the predicate holds iff the residual is `<= tol`.
    pub fn residual(&self, x: &Point, y: &Point) -> Result<f64, DimensionMismatch> {
        self.check_dims(x, y)?;
        let forward = self.directed_residual(x, y);
        if self.symmetrized {
            Ok(forward.min(self.directed_residual(y, x)))
        } else {
            Ok(forward)
        }
    }

    fn directed_residual(&self, x: &Point, y: &Point) -> f64 {
        if x.is_zero() || y.is_zero() {
            return 0.0;
        }
        match &self.kind {
            RelationKind::Trivial => {
                let sine = x.max_minor(y) / (x.norm2() * y.norm2());
                if sine > self.tol {
                    0.0
                } else {
                    1.0 - sine
                }
            }
            RelationKind::InnerProduct => x.dot(y).abs() / (1.0 + x.norm2() * y.norm2()),
            RelationKind::BirkhoffJames { norm } => {
                let nx = norm.eval_unchecked(x);
                let (_, min) = norm::bj_minimizer(norm, x, y);
                (nx - min).max(0.0) / (1.0 + nx)
            }
        }
    }

    pub fn is_orthogonal(&self, x: &Point, y: &Point) -> Result<bool, DimensionMismatch> {
        Ok(self.residual(x, y)? <= self.tol)
    }
}

/// The symmetrization `x ⊥' y ⇔ (x ⊥ y or y ⊥ x)`.
pub fn symmetrize_relation(r: &OrthoRelation) -> OrthoRelation {
    OrthoRelation { symmetrized: true, ..r.clone() }
}

/// Convenience wrapper around [`OrthoRelation::is_orthogonal`].
pub fn is_orthogonal(r: &OrthoRelation, x: &Point, y: &Point) -> Result<bool, DimensionMismatch> {
    r.is_orthogonal(x, y)
}

impl fmt::Display for OrthoRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RelationKind::Trivial => write!(f, "trivial")?,
            RelationKind::InnerProduct => write!(f, "inner")?,
            RelationKind::BirkhoffJames { norm } => write!(f, "bj:{norm}")?,
        }
        if self.symmetrized {
            write!(f, "'")?;
        }
        Ok(())
    }
}

impl FromStr for OrthoRelation {
    type Err = OrthoError;

    /// Accepts `trivial`, `inner`, `bj:l1`, `bj:l2`, `bj:linf`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trivial" => Ok(Self::trivial()),
            "inner" => Ok(Self::inner_product()),
            _ => match s.strip_prefix("bj:") {
                Some(norm) => Ok(Self::birkhoff_james(norm.parse()?)),
                None => Err(OrthoError::InvalidArgument(format!("unknown relation `{s}`"))),
            },
        }
    }
}
