//! Evaluatable maps `R^n -> R^m`, parity decomposition and the generalized
//! sup-metric restricted to a sample grid.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::EvalError;
use crate::orthogonality::OrthoPair;
use crate::point::Point;

type EvalFn = dyn Fn(&Point) -> Result<Point, EvalError> + Send + Sync;

struct Inner {
    label: String,
    source_dim: usize,
    target_dim: usize,
    eval: Box<EvalFn>,
    at_zero: OnceLock<Result<Point, EvalError>>,
}

/// A pure map between finite-dimensional real spaces.
///
/// Handles are cheap to clone and safe to share across threads. Every
/// evaluation is dimension-checked and rejects non-finite output.
#[derive(Clone)]
pub struct MapHandle(Arc<Inner>);

impl MapHandle {
    pub fn new<F>(label: impl Into<String>, source_dim: usize, target_dim: usize, f: F) -> Self
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        Self::try_new(label, source_dim, target_dim, move |x| Ok(f(x)))
    }

    pub fn try_new<F>(label: impl Into<String>, source_dim: usize, target_dim: usize, f: F) -> Self
    where
        F: Fn(&Point) -> Result<Point, EvalError> + Send + Sync + 'static,
    {
        MapHandle(Arc::new(Inner {
            label: label.into(),
            source_dim,
            target_dim,
            eval: Box::new(f),
            at_zero: OnceLock::new(),
        }))
    }

    pub fn zero(source_dim: usize, target_dim: usize) -> Self {
        Self::new("0", source_dim, target_dim, move |_| Point::zeros(target_dim))
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn source_dim(&self) -> usize {
        self.0.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.0.target_dim
    }

    pub fn eval(&self, x: &Point) -> Result<Point, EvalError> {
        x.check_dim(self.0.source_dim)
            .map_err(|source| EvalError::Dimension { label: self.0.label.clone(), source })?;
        let y = (self.0.eval)(x)?;
        y.check_dim(self.0.target_dim)
            .map_err(|source| EvalError::Dimension { label: self.0.label.clone(), source })?;
        if !y.is_finite() {
            return Err(EvalError::NonFinite { label: self.0.label.clone(), point: x.clone() });
        }
        Ok(y)
    }

    /// Value at the origin, computed once.
    pub fn at_zero(&self) -> Result<Point, EvalError> {
        self.0
            .at_zero
            .get_or_init(|| self.eval(&Point::zeros(self.0.source_dim)))
            .clone()
    }

    pub fn relabel(&self, label: impl Into<String>) -> Self {
        let inner = self.clone();
        Self::try_new(label, self.source_dim(), self.target_dim(), move |x| inner.eval(x))
    }

    /// `sum_i c_i * map_i`, all maps sharing dimensions.
    pub fn linear_combination(label: impl Into<String>, terms: &[(f64, &MapHandle)]) -> Self {
        assert!(!terms.is_empty(), "empty linear combination");
        let (sd, td) = (terms[0].1.source_dim(), terms[0].1.target_dim());
        assert!(
            terms.iter().all(|(_, m)| m.source_dim() == sd && m.target_dim() == td),
            "linear combination of maps with different dimensions"
        );
        let owned: Vec<(f64, MapHandle)> = terms.iter().map(|(c, m)| (*c, (*m).clone())).collect();
        Self::try_new(label, sd, td, move |x| {
            let mut acc = vec![0.0; td];
            for (c, m) in &owned {
                let y = m.eval(x)?;
                for (a, v) in acc.iter_mut().zip(y.coords()) {
                    *a += c * v;
                }
            }
            Ok(Point::new(acc))
        })
    }

    pub fn add(&self, other: &MapHandle) -> Self {
        let label = format!("({} + {})", self.label(), other.label());
        Self::linear_combination(label, &[(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &MapHandle) -> Self {
        let label = format!("({} - {})", self.label(), other.label());
        Self::linear_combination(label, &[(1.0, self), (-1.0, other)])
    }

    pub fn scale(&self, alpha: f64) -> Self {
        let label = format!("{alpha}·{}", self.label());
        Self::linear_combination(label, &[(alpha, self)])
    }

    /// SHA-256 over the little-endian bytes of the evaluations on `grid`.
    pub fn fingerprint(&self, grid: &SampleGrid) -> Result<String, EvalError> {
        let mut hasher = Sha256::new();
        for x in grid.points() {
            let y = self.eval(x)?;
            hasher.update(y.to_le_bytes().collect::<Vec<u8>>());
        }
        Ok(hex::encode(hasher.finalize()))
    }
}

impl fmt::Debug for MapHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapHandle")
            .field("label", &self.0.label)
            .field("source_dim", &self.0.source_dim)
            .field("target_dim", &self.0.target_dim)
            .finish()
    }
}

/// `F(x) = f(x) - f(0)`, vanishing exactly at the origin.
pub fn shift_to_zero(f: &MapHandle) -> MapHandle {
    let inner = f.clone();
    let label = match f.label() {
        l if l.len() == 1 => l.to_uppercase(),
        l => format!("({l} - {l}(0))"),
    };
    MapHandle::try_new(label, f.source_dim(), f.target_dim(), move |x| {
        if x.is_zero() {
            return Ok(Point::zeros(inner.target_dim()));
        }
        let c = inner.at_zero()?;
        Ok(&inner.eval(x)? - &c)
    })
}

/// `f^e(x) = (f(x) + f(-x)) / 2`.
pub fn even_part(f: &MapHandle) -> MapHandle {
    let inner = f.clone();
    MapHandle::try_new(format!("{}ᵉ", f.label()), f.source_dim(), f.target_dim(), move |x| {
        let (a, b) = (inner.eval(x)?, inner.eval(&-x)?);
        Ok((&a + &b).scale(0.5))
    })
}

/// `f^o(x) = (f(x) - f(-x)) / 2`.
pub fn odd_part(f: &MapHandle) -> MapHandle {
    let inner = f.clone();
    MapHandle::try_new(format!("{}ᵒ", f.label()), f.source_dim(), f.target_dim(), move |x| {
        let (a, b) = (inner.eval(x)?, inner.eval(&-x)?);
        Ok((&a - &b).scale(0.5))
    })
}

/// A value of the generalized metric: finite or the distinguished infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GeneralizedDistance {
    Finite(f64),
    Infinite,
}

impl GeneralizedDistance {
    pub fn is_finite(&self) -> bool {
        matches!(self, GeneralizedDistance::Finite(_))
    }

    /// `f64::INFINITY` for the infinite value.
    pub fn value(&self) -> f64 {
        match self {
            GeneralizedDistance::Finite(v) => *v,
            GeneralizedDistance::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for GeneralizedDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use GeneralizedDistance::*;
        match (self, other) {
            (Infinite, Infinite) => Some(Ordering::Equal),
            (Infinite, Finite(_)) => Some(Ordering::Greater),
            (Finite(_), Infinite) => Some(Ordering::Less),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

/// Maximum of `residual(x)` over `points` with the index attaining it.
pub fn sup_over<'a, I, F>(points: I, mut residual: F) -> Result<(f64, Option<usize>), EvalError>
where
    I: IntoIterator<Item = &'a Point>,
    F: FnMut(&Point) -> Result<f64, EvalError>,
{
    let mut best = (0.0, None);
    for (i, x) in points.into_iter().enumerate() {
        let v = residual(x)?;
        if v > best.0 || best.1.is_none() {
            best = (v, Some(i));
        }
    }
    Ok(best)
}

/// `sup_x |f(x) - g(x)|` on the grid (Euclidean norm in the target), or
/// [`GeneralizedDistance::Infinite`] once that exceeds `cap`.
pub fn sup_distance(
    f: &MapHandle,
    g: &MapHandle,
    grid: &SampleGrid,
    cap: f64,
) -> Result<GeneralizedDistance, EvalError> {
    assert!(cap > 0.0, "cap must be positive");
    if f.target_dim() != g.target_dim() || f.source_dim() != g.source_dim() {
        return Err(EvalError::Dimension {
            label: format!("{} vs {}", f.label(), g.label()),
            source: crate::error::DimensionMismatch { expected: f.target_dim(), found: g.target_dim() },
        });
    }
    let mut max = 0.0f64;
    for x in grid.points() {
        let d = (&f.eval(x)? - &g.eval(x)?).norm2();
        max = max.max(d);
        if max > cap {
            return Ok(GeneralizedDistance::Infinite);
        }
    }
    Ok(GeneralizedDistance::Finite(max))
}

/// `sup_x |f(x)|` on the grid.
pub fn sup_norm(f: &MapHandle, grid: &SampleGrid) -> Result<f64, EvalError> {
    Ok(sup_over(grid.points(), |x| Ok(f.eval(x)?.norm2()))?.0)
}

/// Reproducibility record of a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDescriptor {
    pub dim: usize,
    pub count: usize,
    pub radius: f64,
    pub seed: u64,
    pub dyadic_depth: usize,
    pub fingerprint: String,
}

/// A finite stand-in for "all x": the origin, stratified shells and any
/// caller-supplied points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    points: Vec<Point>,
    dim: usize,
    seed: u64,
    radius: f64,
    dyadic_depth: usize,
}

impl SampleGrid {
    /// The origin plus `count - 1` random directions on shells whose radii
    /// step linearly from `0.1 * radius` to `radius`.
    pub fn stratified(dim: usize, count: usize, radius: f64, seed: u64) -> Self {
        assert!(dim >= 1 && count >= 1 && radius > 0.0 && radius.is_finite());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = vec![Point::zeros(dim)];
        let shells = count - 1;
        for k in 0..shells {
            let t = if shells > 1 { k as f64 / (shells - 1) as f64 } else { 1.0 };
            let r = radius * (0.1 + 0.9 * t);
            let dir: Vec<f64> = loop {
                let d: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                if d.iter().any(|c| c.abs() > 1e-9) {
                    break d;
                }
            };
            let n = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
            points.push(Point::new(dir.into_iter().map(|c| c * r / n).collect()));
        }
        SampleGrid { points, dim, seed, radius, dyadic_depth: 0 }
    }

    pub fn from_points(points: Vec<Point>, seed: u64) -> Self {
        assert!(!points.is_empty(), "grid needs at least one point");
        let dim = points[0].dim();
        assert!(points.iter().all(|p| p.dim() == dim), "mixed dimensions in grid");
        let radius = points.iter().map(Point::norm2).fold(0.0, f64::max);
        let mut points = points;
        if !points.iter().any(Point::is_zero) {
            points.insert(0, Point::zeros(dim));
        }
        SampleGrid { points, dim, seed, radius, dyadic_depth: 0 }
    }

    /// Adds both members of every pair (zeros and duplicates skipped).
    pub fn with_pairs(mut self, pairs: &[OrthoPair]) -> Self {
        for (x, y) in pairs {
            for p in [x, y] {
                if !p.is_zero() {
                    self.radius = self.radius.max(p.norm2());
                    self.points.push(p.clone());
                }
            }
        }
        self
    }

    /// `{2^k x : x in grid, 0 <= k <= depth}`; `None` if doubling overflows.
    pub fn dyadic_closure(&self, depth: usize) -> Option<SampleGrid> {
        let mut points = Vec::with_capacity(self.points.len() * (depth + 1));
        for k in 0..=depth {
            let s = (2.0f64).powi(k as i32);
            for x in &self.points {
                let y = x.scale(s);
                if !y.is_finite() {
                    return None;
                }
                points.push(y);
            }
        }
        Some(SampleGrid {
            points,
            dim: self.dim,
            seed: self.seed,
            radius: self.radius * (2.0f64).powi(depth as i32),
            dyadic_depth: self.dyadic_depth + depth,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn includes_dyadic(&self) -> bool {
        self.dyadic_depth > 0
    }

    pub fn descriptor(&self) -> GridDescriptor {
        let mut hasher = Sha256::new();
        for p in &self.points {
            hasher.update(p.to_le_bytes().collect::<Vec<u8>>());
        }
        GridDescriptor {
            dim: self.dim,
            count: self.points.len(),
            radius: self.radius,
            seed: self.seed,
            dyadic_depth: self.dyadic_depth,
            fingerprint: hex::encode(hasher.finalize()),
        }
    }
}
