//! Measured defects and the normalized parity parts of `f, g, h, k`.

use serde::Serialize;

use crate::error::{EvalError, StabilityError};
use crate::funcspace::{even_part, odd_part, shift_to_zero, sup_over, GridDescriptor, MapHandle, SampleGrid};
use crate::orthogonality::OrthoPair;
use crate::point::Point;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectReport {
    /// `sup |f(x+y) + g(x-y) - h(x) - k(y)|` over the pairs.
    pub eps_pexider: f64,
    /// `sup 2 |fᵉ(2x) - 4fᵉ(x)|` on the grid.
    pub eps_even_doubling: f64,
    /// `sup |f(2x) - f(-2x) - 4f(x) - 4f(-x)|` on the grid.
    pub eps_literal: f64,
    pub pair_count: usize,
    pub grid: GridDescriptor,
}

/// `|f(x+y) + g(x-y) - h(x) - k(y)|`.
pub fn pexider_residual(
    maps: [&MapHandle; 4],
    x: &Point,
    y: &Point,
) -> Result<f64, EvalError> {
    let [f, g, h, k] = maps;
    let a = &f.eval(&(x + y))? + &g.eval(&(x - y))?;
    let b = &h.eval(x)? + &k.eval(y)?;
    Ok((&a - &b).norm2())
}

/// Largest Pexider residual over the pairs.
pub fn pexider_defect(
    f: &MapHandle,
    g: &MapHandle,
    h: &MapHandle,
    k: &MapHandle,
    pairs: &[OrthoPair],
) -> Result<f64, StabilityError> {
    if pairs.is_empty() {
        return Err(StabilityError::EmptyPairs);
    }
    let mut max = 0.0f64;
    for (x, y) in pairs {
        max = max.max(pexider_residual([f, g, h, k], x, y)?);
    }
    Ok(max)
}

/// `(sup 2|fᵉ(2x) - 4fᵉ(x)|, sup |f(2x) - f(-2x) - 4f(x) - 4f(-x)|)`.
///
/// The first is the even-parity reading of the doubling condition and is
/// what the pipeline consumes; the second is the literal sign pattern, which
/// mixes parities (it equals `2f°(2x) - 8fᵉ(x)`).
pub fn doubling_defect(f: &MapHandle, grid: &SampleGrid) -> Result<(f64, f64), EvalError> {
    let mut even = 0.0f64;
    let mut literal = 0.0f64;
    for x in grid.points() {
        let x2 = x.scale(2.0);
        let (a, b) = (f.eval(&x2)?, f.eval(&-&x2)?);
        let (c, d) = (f.eval(x)?, f.eval(&-x)?);
        let four = (&c + &d).scale(4.0);
        even = even.max((&(&a + &b) - &four).norm2());
        literal = literal.max((&(&a - &b) - &four).norm2());
    }
    Ok((even, literal))
}

/// `(x, 0), (0, x), (-x, 0), (0, -x)` for every grid point: pairs every
/// relation accepts, which tie the defect to the points where deviations are
/// measured.
pub fn axis_pairs(grid: &SampleGrid) -> Vec<OrthoPair> {
    let z = Point::zeros(grid.dim());
    let mut pairs = Vec::with_capacity(4 * grid.len());
    for x in grid.points() {
        if x.is_zero() {
            continue;
        }
        let nx = -x;
        pairs.push((x.clone(), z.clone()));
        pairs.push((z.clone(), x.clone()));
        pairs.push((nx.clone(), z.clone()));
        pairs.push((z.clone(), nx));
    }
    pairs
}

pub fn measure_defects(
    maps: [&MapHandle; 4],
    pairs: &[OrthoPair],
    grid: &SampleGrid,
) -> Result<DefectReport, StabilityError> {
    let [f, g, h, k] = maps;
    let eps_pexider = pexider_defect(f, g, h, k, pairs)?;
    let (eps_even_doubling, eps_literal) = doubling_defect(f, grid)?;
    Ok(DefectReport {
        eps_pexider,
        eps_even_doubling,
        eps_literal,
        pair_count: pairs.len(),
        grid: grid.descriptor(),
    })
}

/// Normalized maps `F = f - f(0)` etc., their parity parts and
/// `L = (H + K) / 2`.
#[derive(Debug, Clone)]
pub struct NormalizedParts {
    pub f_o: MapHandle,
    pub f_e: MapHandle,
    pub g_o: MapHandle,
    pub g_e: MapHandle,
    pub h_o: MapHandle,
    pub h_e: MapHandle,
    pub k_o: MapHandle,
    pub k_e: MapHandle,
    pub l_o: MapHandle,
    pub l_e: MapHandle,
    /// `sup |F°(x+y) + G°(x-y) - H°(x) - K°(y)|` over the pairs.
    pub residual_odd: f64,
    /// Same for the even parts.
    pub residual_even: f64,
}

pub fn derive_normalized_parts(
    f: &MapHandle,
    g: &MapHandle,
    h: &MapHandle,
    k: &MapHandle,
    pairs: &[OrthoPair],
) -> Result<NormalizedParts, StabilityError> {
    let (ff, gg, hh, kk) = (shift_to_zero(f), shift_to_zero(g), shift_to_zero(h), shift_to_zero(k));
    let l = MapHandle::linear_combination("L", &[(0.5, &hh), (0.5, &kk)]);
    let parts = NormalizedParts {
        f_o: odd_part(&ff),
        f_e: even_part(&ff),
        g_o: odd_part(&gg),
        g_e: even_part(&gg),
        h_o: odd_part(&hh),
        h_e: even_part(&hh),
        k_o: odd_part(&kk),
        k_e: even_part(&kk),
        l_o: odd_part(&l),
        l_e: even_part(&l),
        residual_odd: 0.0,
        residual_even: 0.0,
    };
    let odd = [&parts.f_o, &parts.g_o, &parts.h_o, &parts.k_o];
    let even = [&parts.f_e, &parts.g_e, &parts.h_e, &parts.k_e];
    let mut residual_odd = 0.0f64;
    let mut residual_even = 0.0f64;
    for (x, y) in pairs {
        residual_odd = residual_odd.max(pexider_residual(odd, x, y)?);
        residual_even = residual_even.max(pexider_residual(even, x, y)?);
    }
    Ok(NormalizedParts { residual_odd, residual_even, ..parts })
}

/// `sup_x |a(x) - b(x)|` on the grid, without a cap.
pub(crate) fn sup_dev(a: &MapHandle, b: &MapHandle, grid: &SampleGrid) -> Result<f64, EvalError> {
    Ok(sup_over(grid.points(), |x| Ok((&a.eval(x)? - &b.eval(x)?).norm2()))?.0)
}

/// `sup_x |phi(2x) - c phi(x)|` on the grid.
pub(crate) fn sup_doubling(phi: &MapHandle, c: f64, grid: &SampleGrid) -> Result<f64, EvalError> {
    Ok(sup_over(grid.points(), |x| Ok((&phi.eval(&x.scale(2.0))? - &phi.eval(x)?.scale(c)).norm2()))?.0)
}
