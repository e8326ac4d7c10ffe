//! Seeded generation of orthogonal pairs.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{OrthoRelation, RelationKind};
use crate::error::OrthoError;
use crate::point::Point;

pub type OrthoPair = (Point, Point);

const MAX_RETRIES: usize = 100;

/// Uniform sample from the Euclidean ball of the given radius.
pub fn random_in_ball<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Point {
    loop {
        let dir: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n < 1e-12 {
            continue;
        }
        let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
        return Point::new(dir.into_iter().map(|c| c * r / n).collect());
    }
}

fn rescale<R: Rng>(rng: &mut R, y: &Point, radius: f64) -> Point {
    let target = radius * rng.gen::<f64>().powf(1.0 / y.dim() as f64);
    y.scale(target / y.norm2())
}

fn candidate<R: Rng>(rng: &mut R, r: &OrthoRelation, dim: usize, radius: f64) -> Option<OrthoPair> {
    let x = random_in_ball(rng, dim, radius);
    let u = random_in_ball(rng, dim, radius);
    if x.norm2() == 0.0 {
        return None;
    }
    let y = match &r.kind {
        RelationKind::Trivial => {
            if x.max_minor(&u) <= 1e-3 * x.norm2() * u.norm2() {
                return None;
            }
            u
        }
        RelationKind::InnerProduct => {
            let xx = x.dot(&x);
            let mut y = u.axpy(-u.dot(&x) / xx, &x);
            y = y.axpy(-y.dot(&x) / xx, &x);
            if y.norm2() <= 1e-6 * u.norm2() {
                return None;
            }
            rescale(rng, &y, radius)
        }
        RelationKind::BirkhoffJames { norm } => {
            let phi = norm.support_functional(&x);
            let y = u.axpy(-phi.dot(&u) / phi.dot(&x), &x);
            if y.norm2() <= 1e-6 * u.norm2() {
                return None;
            }
            rescale(rng, &y, radius)
        }
    };
    // symmetrized relations accept either order
    if r.symmetrized && rng.gen::<bool>() {
        Some((y, x))
    } else {
        Some((x, y))
    }
}

/// Deterministic list of `count` orthogonal pairs with Euclidean norms at
/// most `radius`. The first pair is always `(x, 0)` and the second `(0, y)`.
pub fn sample_orthogonal_pairs(
    r: &OrthoRelation,
    dim: usize,
    count: usize,
    radius: f64,
    seed: u64,
) -> Result<Vec<OrthoPair>, OrthoError> {
    if dim < 2 {
        return Err(OrthoError::DimensionTooSmall(dim));
    }
    if count == 0 {
        return Err(OrthoError::InvalidArgument("count must be at least 1".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(OrthoError::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(count);
    pairs.push((random_in_ball(&mut rng, dim, radius), Point::zeros(dim)));
    if count > 1 {
        pairs.push((Point::zeros(dim), random_in_ball(&mut rng, dim, radius)));
    }
    while pairs.len() < count {
        let mut accepted = None;
        for _ in 0..MAX_RETRIES {
            if let Some((x, y)) = candidate(&mut rng, r, dim, radius) {
                if r.is_orthogonal(&x, &y)? {
                    accepted = Some((x, y));
                    break;
                }
            }
        }
        match accepted {
            Some(pair) => pairs.push(pair),
            None => return Err(OrthoError::SamplingFailed { attempts: MAX_RETRIES }),
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthogonality::NormSpec;

    #[test]
    fn inner_product_pairs() {
        let r = OrthoRelation::inner_product();
        let pairs = sample_orthogonal_pairs(&r, 2, 3, 1.0, 1).unwrap();
        assert_eq!(pairs.len(), 3);
        for (x, y) in &pairs {
            assert!(x.dot(y).abs() <= r.tol);
            assert!(x.norm2() <= 1.0 + 1e-12 && y.norm2() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn always_contains_degenerate_pairs() {
        for r in [
            OrthoRelation::trivial(),
            OrthoRelation::inner_product(),
            OrthoRelation::birkhoff_james(NormSpec::LInf),
        ] {
            let pairs = sample_orthogonal_pairs(&r, 3, 5, 2.0, 9).unwrap();
            assert!(pairs.iter().any(|(_, y)| y.is_zero()));
            assert!(pairs.iter().any(|(x, _)| x.is_zero()));
            let single = sample_orthogonal_pairs(&r, 3, 1, 2.0, 9).unwrap();
            assert!(single[0].1.is_zero());
        }
    }

    #[test]
    fn trivial_pairs_are_independent() {
        let pairs = sample_orthogonal_pairs(&OrthoRelation::trivial(), 2, 50, 1.0, 4).unwrap();
        for (x, y) in pairs.iter().skip(2) {
            assert!(x.max_minor(y) > 1e-9 * x.norm2() * y.norm2());
        }
    }

    #[test]
    fn reproducible() {
        let r = OrthoRelation::birkhoff_james(NormSpec::L1);
        let a = sample_orthogonal_pairs(&r, 4, 40, 3.0, 77).unwrap();
        let b = sample_orthogonal_pairs(&r, 4, 40, 3.0, 77).unwrap();
        assert_eq!(a, b);
        let c = sample_orthogonal_pairs(&r, 4, 40, 3.0, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_arguments() {
        let r = OrthoRelation::inner_product();
        assert!(sample_orthogonal_pairs(&r, 1, 3, 1.0, 0).is_err());
        assert!(sample_orthogonal_pairs(&r, 2, 0, 1.0, 0).is_err());
        assert!(sample_orthogonal_pairs(&r, 2, 3, 0.0, 0).is_err());
    }
}
