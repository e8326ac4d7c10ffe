//! Seeded generators of exact solutions, bounded noise and synthetic
//! instances whose additive and quadratic parts are known.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::PerturbError;
use crate::funcspace::{even_part, MapHandle};
use crate::point::Point;

/// Allowed asymmetry `max |B - Bᵀ|` of a quadratic form.
pub const SYMMETRY_TOL: f64 = 1e-14;
/// Radius over which the noise envelope `tanh(|x| / r0)` saturates.
const NOISE_RAMP: f64 = 1.0;

/// Generator of a synthetic instance: `A(x) = Mx`, `P_i(x) = xᵀ B_i x`, and
/// one noise seed per map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub a_matrix: Vec<Vec<f64>>,
    pub b_forms: Vec<Vec<Vec<f64>>>,
    pub delta: f64,
    pub seeds: [u64; 4],
}

impl GroundTruth {
    /// Validates shapes, finiteness, symmetry of the forms and `delta >= 0`.
    pub fn new(
        a_matrix: Vec<Vec<f64>>,
        b_forms: Vec<Vec<Vec<f64>>>,
        delta: f64,
        seeds: [u64; 4],
    ) -> Result<Self, PerturbError> {
        let gt = GroundTruth { a_matrix, b_forms, delta, seeds };
        gt.validate()?;
        Ok(gt)
    }

    pub fn validate(&self) -> Result<(), PerturbError> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(PerturbError::InvalidDelta(self.delta));
        }
        let m = self.a_matrix.len();
        if m == 0 {
            return Err(PerturbError::Shape("additive matrix has no rows".into()));
        }
        let n = self.a_matrix[0].len();
        if n < 2 {
            return Err(PerturbError::Shape(format!("source dimension must be at least 2, got {n}")));
        }
        if self.a_matrix.iter().any(|row| row.len() != n) {
            return Err(PerturbError::Shape("ragged additive matrix".into()));
        }
        if self.b_forms.len() != m {
            return Err(PerturbError::Shape(format!(
                "expected {m} quadratic forms, got {}",
                self.b_forms.len()
            )));
        }
        for (index, b) in self.b_forms.iter().enumerate() {
            if b.len() != n || b.iter().any(|row| row.len() != n) {
                return Err(PerturbError::Shape(format!("quadratic form {index} is not {n}x{n}")));
            }
            check_symmetric(index, b)?;
        }
        let all = self.a_matrix.iter().flatten().chain(self.b_forms.iter().flatten().flatten());
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(PerturbError::NonFinite);
        }
        Ok(())
    }

    /// Random instance with entries of `M` in `[-1, 1]` and isotropic forms
    /// `B_i = c_i I`, `c_i` in `[-1, 1]`.
    ///
    /// Isotropic forms are the quadratic maps that are also orthogonally
    /// additive for the inner-product relation, so `A + P` is then an exact
    /// orthogonally additive target.
    pub fn random(source_dim: usize, target_dim: usize, delta: f64, seed: u64) -> Result<Self, PerturbError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, target_dim, source_dim);
        let b = (0..target_dim)
            .map(|_| {
                let c = rng.gen_range(-1.0..=1.0);
                (0..source_dim)
                    .map(|j| (0..source_dim).map(|k| if j == k { c } else { 0.0 }).collect())
                    .collect()
            })
            .collect();
        let seeds = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
        Self::new(a, b, delta, seeds)
    }

    /// Like [`GroundTruth::random`] but with general symmetric forms
    /// `B_i = (C + Cᵀ) / 2`.
    pub fn random_anisotropic(
        source_dim: usize,
        target_dim: usize,
        delta: f64,
        seed: u64,
    ) -> Result<Self, PerturbError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, target_dim, source_dim);
        let b = (0..target_dim)
            .map(|_| {
                let c = random_matrix(&mut rng, source_dim, source_dim);
                (0..source_dim)
                    .map(|j| (0..source_dim).map(|k| 0.5 * (c[j][k] + c[k][j])).collect())
                    .collect()
            })
            .collect();
        let seeds = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
        Self::new(a, b, delta, seeds)
    }

    pub fn source_dim(&self) -> usize {
        self.a_matrix[0].len()
    }

    pub fn target_dim(&self) -> usize {
        self.a_matrix.len()
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self, PerturbError> {
        Self::new(self.a_matrix.clone(), self.b_forms.clone(), delta, self.seeds)
    }

    /// Same forms and noise, additive part removed.
    pub fn without_additive(&self) -> Self {
        let mut gt = self.clone();
        for row in &mut gt.a_matrix {
            row.iter_mut().for_each(|v| *v = 0.0);
        }
        gt
    }

    pub fn additive(&self) -> MapHandle {
        make_additive(&self.a_matrix).expect("validated ground truth")
    }

    pub fn quadratic(&self) -> MapHandle {
        make_quadratic(&self.b_forms).expect("validated ground truth")
    }

    /// The noise attached to map `i` (0..4 for f, g, h, k).
    pub fn noise(&self, i: usize) -> MapHandle {
        make_bounded_noise(self.source_dim(), self.target_dim(), self.delta, self.seeds[i])
    }
}

fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect()
}

fn check_symmetric(index: usize, b: &[Vec<f64>]) -> Result<(), PerturbError> {
    let mut residual = 0.0f64;
    for (j, row) in b.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            residual = residual.max((v - b[k][j]).abs());
        }
    }
    if residual > SYMMETRY_TOL {
        return Err(PerturbError::Asymmetric { index, residual });
    }
    Ok(())
}

/// `x -> Mx` for an `m x n` matrix given row by row.
pub fn make_additive(m: &[Vec<f64>]) -> Result<MapHandle, PerturbError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(PerturbError::Shape("matrix must be nonempty and rectangular".into()));
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(PerturbError::NonFinite);
    }
    let m = m.to_vec();
    Ok(MapHandle::new("A", cols, rows, move |x| {
        Point::new(m.iter().map(|row| row.iter().zip(x.coords()).map(|(a, b)| a * b).sum()).collect())
    }))
}

/// `x -> (xᵀ B_1 x, ..., xᵀ B_m x)`.
pub fn make_quadratic(forms: &[Vec<Vec<f64>>]) -> Result<MapHandle, PerturbError> {
    let n = forms.first().map_or(0, Vec::len);
    if n == 0 {
        return Err(PerturbError::Shape("no quadratic forms".into()));
    }
    for (index, b) in forms.iter().enumerate() {
        if b.len() != n || b.iter().any(|row| row.len() != n) {
            return Err(PerturbError::Shape(format!("quadratic form {index} is not {n}x{n}")));
        }
        check_symmetric(index, b)?;
    }
    let forms = forms.to_vec();
    Ok(MapHandle::new("P", n, forms.len(), move |x| {
        let c = x.coords();
        Point::new(
            forms
                .iter()
                .map(|b| {
                    b.iter()
                        .zip(c)
                        .map(|(row, xj)| xj * row.iter().zip(c).map(|(v, xk)| v * xk).sum::<f64>())
                        .sum()
                })
                .collect(),
        )
    }))
}

/// Bounded noise `n(x)_i = delta * tanh(|x|) * sin(w_i . x + p_i) / sqrt(m)`
/// with frequencies `w_i` and phases `p_i` frozen from `seed`.
///
/// `|n(x)| <= delta` everywhere and `n(0) = 0` exactly.
pub fn make_bounded_noise(source_dim: usize, target_dim: usize, delta: f64, seed: u64) -> MapHandle {
    assert!(delta >= 0.0 && delta.is_finite(), "noise bound must be nonnegative");
    if delta == 0.0 {
        return MapHandle::zero(source_dim, target_dim);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<(Vec<f64>, f64)> = (0..target_dim)
        .map(|_| {
            let w = (0..source_dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            (w, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let amp = delta / (target_dim as f64).sqrt();
    MapHandle::new(format!("n{seed:x}"), source_dim, target_dim, move |x| {
        let env = amp * (x.norm2() / NOISE_RAMP).tanh();
        Point::new(
            waves
                .iter()
                .map(|(w, p)| {
                    let t: f64 = w.iter().zip(x.coords()).map(|(a, b)| a * b).sum();
                    env * (t + p).sin()
                })
                .collect(),
        )
    })
}

/// Even noise bounded by `delta`, the even part of [`make_bounded_noise`].
pub fn make_even_noise(source_dim: usize, target_dim: usize, delta: f64, seed: u64) -> MapHandle {
    even_part(&make_bounded_noise(source_dim, target_dim, delta, seed))
}

/// `x -> coef * |x|^3 * u` with `u = (1, ..., 1) / sqrt(m)`: even, and
/// `|phi(2x) - 4 phi(x)| = 4 |coef| |x|^3`.
pub fn make_cubic(source_dim: usize, target_dim: usize, coef: f64) -> MapHandle {
    let u = 1.0 / (target_dim as f64).sqrt();
    MapHandle::new("C", source_dim, target_dim, move |x| {
        let r = x.norm2();
        Point::new(vec![coef * r * r * r * u; target_dim])
    })
}

/// Four maps `f, g, h, k` together with the generator they came from.
#[derive(Debug, Clone)]
pub struct PexiderInstance {
    pub f: MapHandle,
    pub g: MapHandle,
    pub h: MapHandle,
    pub k: MapHandle,
    pub truth: GroundTruth,
}

impl PexiderInstance {
    pub fn maps(&self) -> [&MapHandle; 4] {
        [&self.f, &self.g, &self.h, &self.k]
    }
}

/// `f = P + A + n1`, `g = P - A + n2`, `h = 2P + n3`, `k = 2P + 2A + n4`.
///
/// Without noise `f(x+y) + g(x-y) = 2P(x) + 2P(y) + 2A(y) = h(x) + k(y)` for
/// all `x, y`; each noise adds at most `delta` to the residual.
pub fn compose_pexider_instance(gt: &GroundTruth) -> PexiderInstance {
    let (a, p) = (gt.additive(), gt.quadratic());
    let n: Vec<MapHandle> = (0..4).map(|i| gt.noise(i)).collect();
    PexiderInstance {
        f: MapHandle::linear_combination("f", &[(1.0, &p), (1.0, &a), (1.0, &n[0])]),
        g: MapHandle::linear_combination("g", &[(1.0, &p), (-1.0, &a), (1.0, &n[1])]),
        h: MapHandle::linear_combination("h", &[(2.0, &p), (1.0, &n[2])]),
        k: MapHandle::linear_combination("k", &[(2.0, &p), (2.0, &a), (1.0, &n[3])]),
        truth: gt.clone(),
    }
}

fn constant(dim: usize, c: &Point) -> MapHandle {
    let c = c.clone();
    MapHandle::new("c", dim, c.dim(), move |_| c.clone())
}

/// `f = T + c1 + c2 + n1`, `h = T + c1 + n3`, `k = T + c2 + n4` with
/// `T = A + P`, so `f(x+y) = h(x) + k(y)` on pairs where `P` is additive.
pub fn compose_cauchy_instance(gt: &GroundTruth, c1: &Point, c2: &Point) -> (MapHandle, MapHandle, MapHandle) {
    assert!(c1.dim() == gt.target_dim() && c2.dim() == gt.target_dim(), "offset dimension");
    let (a, p) = (gt.additive(), gt.quadratic());
    let n = gt.source_dim();
    let (k1, k2) = (constant(n, c1), constant(n, c2));
    let (n1, n3, n4) = (gt.noise(0), gt.noise(2), gt.noise(3));
    (
        MapHandle::linear_combination("f", &[(1.0, &a), (1.0, &p), (1.0, &k1), (1.0, &k2), (1.0, &n1)]),
        MapHandle::linear_combination("h", &[(1.0, &a), (1.0, &p), (1.0, &k1), (1.0, &n3)]),
        MapHandle::linear_combination("k", &[(1.0, &a), (1.0, &p), (1.0, &k2), (1.0, &n4)]),
    )
}

/// `Q = P + even noise`, an approximately orthogonally quadratic map.
pub fn compose_quadratic_instance(gt: &GroundTruth) -> MapHandle {
    let p = gt.quadratic();
    let n = make_even_noise(gt.source_dim(), gt.target_dim(), gt.delta, gt.seeds[0]);
    MapHandle::linear_combination("Q", &[(1.0, &p), (1.0, &n)])
}

/// `phi + C` with `C` from [`make_cubic`].
pub fn add_cubic(phi: &MapHandle, coef: f64) -> MapHandle {
    let c = make_cubic(phi.source_dim(), phi.target_dim(), coef);
    MapHandle::linear_combination(phi.label().to_string(), &[(1.0, phi), (1.0, &c)])
}
