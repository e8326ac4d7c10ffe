//! Points of a finite-dimensional real vector space.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::DimensionMismatch;

/// A vector in `R^n`.
///
/// `new` accepts any coordinates so that map evaluations can report
/// overflow; [`Point::try_new`] rejects NaN and infinities.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    /// Returns `None` when any coordinate is NaN or infinite.
    pub fn try_new(coords: Vec<f64>) -> Option<Self> {
        coords.iter().all(|c| c.is_finite()).then_some(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut coords = vec![0.0; dim];
        coords[axis] = 1.0;
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn scale(&self, alpha: f64) -> Point {
        Point(self.0.iter().map(|c| alpha * c).collect())
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + alpha * b).collect())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Largest 2x2 minor `|x_i y_j - x_j y_i|` of the 2 x dim matrix `[x; y]`.
    pub fn max_minor(&self, other: &Point) -> f64 {
        let n = self.dim();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let m = (self.0[i] * other.0[j] - self.0[j] * other.0[i]).abs();
                best = best.max(m);
            }
        }
        best
    }

    pub fn check_dim(&self, expected: usize) -> Result<(), DimensionMismatch> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(DimensionMismatch { expected, found: self.dim() })
        }
    }

    pub fn same_dim(&self, other: &Point) -> Result<(), DimensionMismatch> {
        other.check_dim(self.dim())
    }

    /// Little-endian bytes of every coordinate, for fingerprinting.
    pub fn to_le_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().flat_map(|c| c.to_le_bytes())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::new(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point::new(v.to_vec())
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point(self.0.iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let x = Point::from([1.0, 2.0]);
        let y = Point::from([3.0, -1.0]);
        assert_eq!((&x + &y).coords(), &[4.0, 1.0]);
        assert_eq!((&x - &y).coords(), &[-2.0, 3.0]);
        assert_eq!(x.axpy(2.0, &y).coords(), &[7.0, 0.0]);
        assert_eq!(x.dot(&y), 1.0);
        assert_eq!((-&x).coords(), &[-1.0, -2.0]);
    }

    #[test]
    fn minors() {
        let x = Point::from([1.0, 0.0, 0.0]);
        assert_eq!(x.max_minor(&x.scale(3.0)), 0.0);
        assert_eq!(x.max_minor(&Point::from([0.0, 0.0, 2.0])), 2.0);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Point::try_new(vec![1.0, f64::NAN]).is_none());
        assert!(Point::try_new(vec![1.0, f64::INFINITY]).is_none());
        assert!(Point::try_new(vec![1.0, 2.0]).is_some());
    }
}
