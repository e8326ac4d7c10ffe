//! Constructive Thalesian property: given `x` in a plane and `lambda >= 0`,
//! find `y0` in that plane with `x ⊥ y0` and `x + y0 ⊥ lambda x - y0`.

use super::norm::{bj_minimizer, NormSpec};
use super::{OrthoRelation, RelationKind};
use crate::error::OrthoError;
use crate::point::Point;

const MAX_DOUBLINGS: usize = 80;
const MAX_BISECTIONS: usize = 200;

/// Solves the Thalesian condition in the plane spanned by `x` and the
/// coordinate axis along which `x` is smallest.
pub fn thalesian_solve(r: &OrthoRelation, x: &Point, lambda: f64) -> Result<Point, OrthoError> {
    if x.dim() < 2 {
        return Err(OrthoError::DimensionTooSmall(x.dim()));
    }
    let axis = x
        .coords()
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if v.abs() < bv { (i, v.abs()) } else { (bi, bv) })
        .0;
    thalesian_solve_in_plane(r, x, &Point::unit(x.dim(), axis), lambda)
}

/// Solves the Thalesian condition inside `span{x, u}`.
pub fn thalesian_solve_in_plane(
    r: &OrthoRelation,
    x: &Point,
    u: &Point,
    lambda: f64,
) -> Result<Point, OrthoError> {
    x.same_dim(u)?;
    if x.is_zero() {
        return Err(OrthoError::ZeroVector);
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(OrthoError::NegativeLambda(lambda));
    }
    if x.max_minor(u) <= 1e-12 * x.norm2() * u.norm2() {
        return Err(OrthoError::InvalidArgument("plane direction is parallel to x".into()));
    }
    if lambda == 0.0 {
        // x ⊥ 0 and x ⊥ 0 by totality for zero.
        return Ok(Point::zeros(x.dim()));
    }

    let y0 = match &r.kind {
        RelationKind::Trivial | RelationKind::InnerProduct => {
            closed_form(x, u, lambda, &|a, b| a.dot(b))
        }
        RelationKind::BirkhoffJames { norm } => match norm.is_inner_product() {
            true => closed_form(x, u, lambda, &|a, b| norm.inner(a, b).unwrap()),
            false => search(norm, r.tol, x, u, lambda)?,
        },
    };

    let (first, second) = residuals(r, x, &y0, lambda)?;
    if first <= r.tol && second <= r.tol {
        Ok(y0)
    } else {
        Err(OrthoError::ThalesianNotFound { lambda, residual_first: first, residual_second: second })
    }
}

fn residuals(r: &OrthoRelation, x: &Point, y0: &Point, lambda: f64) -> Result<(f64, f64), OrthoError> {
    let first = r.residual(x, y0)?;
    let second = r.residual(&(x + y0), &x.scale(lambda).axpy(-1.0, y0))?;
    Ok((first, second))
}

/// For an inner product, `<x + y0, lambda x - y0> = lambda |x|^2 - |y0|^2`
/// once `y0 ⊥ x`, so `y0 = sqrt(lambda) |x| e` for a unit `e ⊥ x`.
fn closed_form(x: &Point, u: &Point, lambda: f64, inner: &dyn Fn(&Point, &Point) -> f64) -> Point {
    let xx = inner(x, x);
    let mut e = u.axpy(-inner(u, x) / xx, x);
    // second pass removes the residual component left by cancellation
    e = e.axpy(-inner(&e, x) / xx, x);
    let e = e.scale(1.0 / inner(&e, &e).sqrt());
    e.scale(lambda.sqrt() * xx.sqrt())
}

/// Polyhedral norms: take the direction `v` annihilated by a norming
/// functional at `x` (so `x ⊥ s v` for every `s`), then bisect on the length
/// `s` using the sign of the minimiser of `|a + mu b|`, with
/// `a = x + s v` and `b = lambda x - s v`. At `s = 0` the minimiser is
/// `-1/lambda < 0`; for large `s` it tends to `1`.
fn search(norm: &NormSpec, tol: f64, x: &Point, u: &Point, lambda: f64) -> Result<Point, OrthoError> {
    let phi = norm.support_functional(x);
    let nx = norm.eval_unchecked(x);
    let v = u.axpy(-phi.dot(u) / phi.dot(x), x);
    let nv = norm.eval_unchecked(&v);
    if nv == 0.0 {
        return Err(OrthoError::InvalidArgument("degenerate plane direction".into()));
    }
    let v = v.scale(nx / nv);

    let relation = OrthoRelation::birkhoff_james(norm.clone()).with_tol(tol);
    let probe = |s: f64| -> (f64, f64, Point) {
        let y0 = v.scale(s);
        let a = x + &y0;
        let b = x.scale(lambda).axpy(-1.0, &y0);
        let res = relation.directed_residual(&a, &b);
        let mu = if a.is_zero() || b.is_zero() { 0.0 } else { bj_minimizer(norm, &a, &b).0 };
        (res, mu, y0)
    };

    let mut best: Option<(f64, Point)> = None;
    let mut consider = |res: f64, y0: Point| {
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, y0));
        }
    };

    let (mut lo, mut hi) = (0.0, 1.0);
    let mut found_hi = false;
    for _ in 0..MAX_DOUBLINGS {
        let (res, mu, y0) = probe(hi);
        if res == 0.0 {
            return Ok(y0);
        }
        consider(res, y0);
        if mu > 0.0 {
            found_hi = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if found_hi {
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (res, mu, y0) = probe(mid);
            if res == 0.0 {
                return Ok(y0);
            }
            consider(res, y0);
            if mu > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Ok(best.map(|(_, y0)| y0).unwrap_or_else(|| Point::zeros(x.dim())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec())
    }

    #[test]
    fn inner_product_examples() {
        let r = OrthoRelation::inner_product();
        let x = p(&[1.0, 0.0]);
        let y0 = thalesian_solve(&r, &x, 4.0).unwrap();
        assert!(y0[0].abs() < 1e-15);
        assert!((y0[1].abs() - 2.0).abs() < 1e-12);
        let a = &x + &y0;
        let b = x.scale(4.0).axpy(-1.0, &y0);
        assert!(a.dot(&b).abs() < 1e-12);

        assert_eq!(thalesian_solve(&r, &x, 0.0).unwrap(), Point::zeros(2));

        let x = p(&[0.3, -1.2, 2.0]);
        let y0 = thalesian_solve(&r, &x, 1.0).unwrap();
        assert!((y0.norm2() - x.norm2()).abs() < 1e-12);
        assert!(x.dot(&y0).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_and_negative() {
        let r = OrthoRelation::inner_product();
        assert_eq!(thalesian_solve(&r, &Point::zeros(2), 1.0), Err(OrthoError::ZeroVector));
        assert!(matches!(
            thalesian_solve(&r, &p(&[1.0, 0.0]), -1.0),
            Err(OrthoError::NegativeLambda(_))
        ));
    }

    #[test]
    fn polyhedral_norms_are_solved_by_search() {
        for norm in [NormSpec::L1, NormSpec::LInf] {
            let r = OrthoRelation::birkhoff_james(norm.clone());
            for (x, lambda) in [(p(&[1.0, 0.3]), 2.0), (p(&[-0.7, 2.0, 0.1]), 0.5), (p(&[1.0, 1.0]), 9.0)] {
                let y0 = thalesian_solve(&r, &x, lambda).unwrap_or_else(|e| panic!("{norm}: {e}"));
                let (a, b) = residuals(&r, &x, &y0, lambda).unwrap();
                assert!(a <= 1e-9 && b <= 1e-9, "{norm} {x:?}: {a:e} {b:e}");
            }
        }
    }

    #[test]
    fn trivial_relation_solution_is_independent() {
        let r = OrthoRelation::trivial();
        let x = p(&[1.0, 2.0, 3.0]);
        let y0 = thalesian_solve(&r, &x, 3.0).unwrap();
        assert!(r.is_orthogonal(&x, &y0).unwrap());
        assert!(r.is_orthogonal(&(&x + &y0), &x.scale(3.0).axpy(-1.0, &y0)).unwrap());
    }
}
