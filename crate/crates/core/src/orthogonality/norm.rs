//! Norms on `R^n` and the Birkhoff–James margin.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DimensionMismatch, OrthoError};
use crate::point::Point;

/// Smallest denominator used when forming the search bracket.
const TINY: f64 = 1e-300;

/// Absolute width at which the golden-section search stops.
pub const BJ_XTOL: f64 = 1e-12;

/// Iteration budget for the golden-section search.
pub const BJ_MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormSpec {
    Euclidean,
    L1,
    LInf,
    WeightedEuclidean { weights: Vec<f64> },
}

impl NormSpec {
    pub fn weighted(weights: Vec<f64>) -> Result<Self, OrthoError> {
        if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(OrthoError::InvalidArgument(
                "weights must be finite and strictly positive".into(),
            ));
        }
        Ok(NormSpec::WeightedEuclidean { weights })
    }

    /// Whether the norm comes from an inner product.
    pub fn is_inner_product(&self) -> bool {
        matches!(self, NormSpec::Euclidean | NormSpec::WeightedEuclidean { .. })
    }

    fn check(&self, x: &Point) -> Result<(), DimensionMismatch> {
        match self {
            NormSpec::WeightedEuclidean { weights } => x.check_dim(weights.len()),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &Point) -> Result<f64, DimensionMismatch> {
        self.check(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &Point) -> f64 {
        let c = x.coords();
        match self {
            NormSpec::Euclidean => x.norm2(),
            NormSpec::L1 => c.iter().map(|v| v.abs()).sum(),
            NormSpec::LInf => c.iter().fold(0.0, |m, v| m.max(v.abs())),
            NormSpec::WeightedEuclidean { weights } => c
                .iter()
                .zip(weights)
                .map(|(v, w)| w * v * v)
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Inner product inducing the norm; `None` for the polyhedral norms.
    pub(crate) fn inner(&self, x: &Point, y: &Point) -> Option<f64> {
        match self {
            NormSpec::Euclidean => Some(x.dot(y)),
            NormSpec::WeightedEuclidean { weights } => Some(
                x.coords()
                    .iter()
                    .zip(y.coords())
                    .zip(weights)
                    .map(|((a, b), w)| w * a * b)
                    .sum(),
            ),
            NormSpec::L1 | NormSpec::LInf => None,
        }
    }

    /// A norming functional at `x`: a linear `phi` with `phi(x) = |x|` and
    /// dual norm 1, returned as its coefficient vector. Any `y` with
    /// `phi(y) = 0` is Birkhoff–James orthogonal to `x`.
    pub fn support_functional(&self, x: &Point) -> Point {
        let n = self.eval_unchecked(x);
        if n == 0.0 {
            return Point::zeros(x.dim());
        }
        let c = x.coords();
        match self {
            NormSpec::Euclidean => x.scale(1.0 / n),
            NormSpec::WeightedEuclidean { weights } => {
                Point::new(c.iter().zip(weights).map(|(v, w)| w * v / n).collect())
            }
            NormSpec::L1 => Point::new(c.iter().map(|v| sign(*v)).collect()),
            NormSpec::LInf => {
                let (k, _) = c
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |(bk, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bk, bv) });
                let mut phi = vec![0.0; c.len()];
                phi[k] = sign(c[k]);
                Point::new(phi)
            }
        }
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Euclidean => write!(f, "l2"),
            NormSpec::L1 => write!(f, "l1"),
            NormSpec::LInf => write!(f, "linf"),
            NormSpec::WeightedEuclidean { weights } => write!(f, "weighted{weights:?}"),
        }
    }
}

impl FromStr for NormSpec {
    type Err = OrthoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "l2" | "euclidean" => Ok(NormSpec::Euclidean),
            "l1" => Ok(NormSpec::L1),
            "linf" => Ok(NormSpec::LInf),
            other => Err(OrthoError::InvalidArgument(format!("unknown norm `{other}`"))),
        }
    }
}

/// Norm of `x` under `norm`.
pub fn norm_eval(norm: &NormSpec, x: &Point) -> Result<f64, DimensionMismatch> {
    norm.eval(x)
}

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmin, min)` over every point evaluated, so the result is never
/// worse than the bracket end points.
pub fn golden_section_min<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = {
        let (flo, fhi) = (f(lo), f(hi));
        if flo <= fhi { (lo, flo) } else { (hi, fhi) }
    };
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if hi - lo <= xtol {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
        for (p, v) in [(c, fc), (d, fd)] {
            if v < best.1 {
                best = (p, v);
            }
        }
    }
    best
}

/// Minimiser `lambda*` of `|x + lambda y|` together with the minimum value.
/// Assumes `x`, `y` nonzero and dimensions already checked.
pub(crate) fn bj_minimizer(norm: &NormSpec, x: &Point, y: &Point) -> (f64, f64) {
    let nx = norm.eval_unchecked(x);
    let ny = norm.eval_unchecked(y);
    let bound = 2.0 * nx / ny.max(TINY);
    let (lam, val) = golden_section_min(
        |l| norm.eval_unchecked(&x.axpy(l, y)),
        -bound,
        bound,
        BJ_XTOL,
        BJ_MAX_ITER,
    );
    if val < nx {
        (lam, val)
    } else {
        (0.0, nx)
    }
}

/// `min_lambda |x + lambda y| - |x|`, which is `<= 0` and vanishes exactly
/// when `x` is Birkhoff–James orthogonal to `y`.
pub fn bj_margin(norm: &NormSpec, x: &Point, y: &Point) -> Result<f64, DimensionMismatch> {
    x.same_dim(y)?;
    norm.check(x)?;
    if x.is_zero() || y.is_zero() {
        return Ok(0.0);
    }
    let nx = norm.eval_unchecked(x);
    let (_, val) = bj_minimizer(norm, x, y);
    Ok((val - nx).min(0.0))
}
