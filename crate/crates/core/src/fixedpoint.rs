//! The argument-doubling contraction `(J phi)(x) = lambda * phi(2x)` and its
//! iteration under the fixed point alternative.
//!
//! Iterates are never materialised: `J^n phi` evaluates `phi` once at
//! `2^n x` and scales by `lambda^n`. Per-step distances are measured on the
//! base grid, so iteration needs `phi` on the dyadic orbit `{2^k x}` only.

use serde::Serialize;

use crate::error::{EvalError, FixedPointError};
use crate::funcspace::{sup_distance, GeneralizedDistance, MapHandle, SampleGrid};
use crate::point::Point;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_N_MAX: usize = 40;
/// Per-step distances above this count as infinite.
pub const DEFAULT_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingOperator {
    lambda: f64,
}

impl ScalingOperator {
    pub fn new(lambda: f64) -> Result<Self, FixedPointError> {
        if (0.0..1.0).contains(&lambda) {
            Ok(ScalingOperator { lambda })
        } else {
            Err(FixedPointError::InvalidLambda(lambda))
        }
    }

    /// `J_{1/2}`, whose fixed points satisfy `R(2x) = 2R(x)`.
    pub fn half() -> Self {
        ScalingOperator { lambda: 0.5 }
    }

    /// `J_{1/4}`, whose fixed points satisfy `S(2x) = 4S(x)`.
    pub fn quarter() -> Self {
        ScalingOperator { lambda: 0.25 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationConfig {
    pub tol: f64,
    pub n_max: usize,
    pub cap: f64,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig { tol: DEFAULT_TOL, n_max: DEFAULT_N_MAX, cap: DEFAULT_CAP }
    }
}

impl IterationConfig {
    fn validate(&self) -> Result<(), FixedPointError> {
        if !(self.tol > 0.0) {
            return Err(FixedPointError::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.n_max == 0 {
            return Err(FixedPointError::InvalidConfig("n_max must be at least 1".into()));
        }
        if !(self.cap > 0.0) {
            return Err(FixedPointError::InvalidConfig(format!("cap must be positive, got {}", self.cap)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// A per-step distance fell to `tol`.
    Converged,
    /// Distances contracted, then stopped decreasing before reaching `tol`:
    /// rounding in `phi(2^n x)` dominates. The limit is the iterate with the
    /// smallest step.
    Stalled,
    /// A per-step distance exceeded the cap: the orbit is at infinite distance.
    Diverged,
    /// `n_max` steps without any of the above.
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct FixedPointResult {
    pub limit: MapHandle,
    pub n_star: usize,
    /// `d(J^n phi, J^{n+1} phi)` on the dyadic closure `{2^j x : j <= N - n}`
    /// of the grid, where `N` is the last step taken. Evaluating `J^n` on a
    /// point reads `phi` at `2^n x`, so a fixed grid does not give a metric
    /// that `J` contracts; the closure does, and on it
    /// `per_step_distances[n] <= lambda^n per_step_distances[0]` exactly.
    pub per_step_distances: Vec<f64>,
    /// The same distances on the grid alone, which drive the stopping rule.
    pub grid_step_distances: Vec<f64>,
    pub verdict: Verdict,
    pub lambda: f64,
}

impl FixedPointResult {
    /// Anything but divergence yields a usable iterate.
    pub fn has_limit(&self) -> bool {
        matches!(self.verdict, Verdict::Converged | Verdict::Stalled | Verdict::BudgetExhausted)
    }

    /// Step size at the returned iterate, i.e. `d(J limit, limit)`.
    pub fn final_step(&self) -> f64 {
        self.grid_step_distances.get(self.n_star).copied().unwrap_or(f64::INFINITY)
    }
}

fn overflow(label: &str, x: &Point) -> EvalError {
    EvalError::Overflow { label: label.to_string(), point: x.clone() }
}

fn require_vanishing_at_zero(phi: &MapHandle) -> Result<(), FixedPointError> {
    let z = phi.at_zero().map_err(|source| FixedPointError::Eval { reached: 0, source })?;
    let residual = z.norm2();
    if residual != 0.0 {
        return Err(FixedPointError::NotInE { label: phi.label().to_string(), residual });
    }
    Ok(())
}

/// `J phi`, i.e. `x -> lambda * phi(2x)`.
pub fn apply(op: &ScalingOperator, phi: &MapHandle) -> Result<MapHandle, FixedPointError> {
    require_vanishing_at_zero(phi)?;
    Ok(power(op, phi, 1))
}

/// `J^n phi`, i.e. `x -> lambda^n * phi(2^n x)`.
pub fn power(op: &ScalingOperator, phi: &MapHandle, n: usize) -> MapHandle {
    let inner = phi.clone();
    let scale = op.lambda.powi(n as i32);
    let stretch = 2.0f64.powi(n as i32);
    let label = match n {
        1 => format!("J[{}]", phi.label()),
        _ => format!("J^{n}[{}]", phi.label()),
    };
    MapHandle::try_new(label, phi.source_dim(), phi.target_dim(), move |x| {
        let z = x.scale(stretch);
        if !z.is_finite() {
            return Err(overflow(inner.label(), x));
        }
        Ok(inner.eval(&z)?.scale(scale))
    })
}

/// Iterates `J` from `phi0` until a per-step distance drops to `cfg.tol`, a
/// distance exceeds `cfg.cap`, the steps stall at the rounding floor, or
/// `cfg.n_max` steps have been taken.
pub fn iterate(
    op: &ScalingOperator,
    phi0: &MapHandle,
    grid: &SampleGrid,
    cfg: &IterationConfig,
) -> Result<FixedPointResult, FixedPointError> {
    cfg.validate()?;
    if grid.is_empty() {
        return Err(FixedPointError::EmptyGrid);
    }
    require_vanishing_at_zero(phi0)?;

    let lambda = op.lambda;
    let orbit_level = |k: usize| -> Result<Vec<Point>, FixedPointError> {
        let stretch = 2.0f64.powi(k as i32);
        grid.points()
            .iter()
            .map(|x| {
                let z = x.scale(stretch);
                if !z.is_finite() {
                    return Err(FixedPointError::Eval { reached: k, source: overflow(phi0.label(), x) });
                }
                phi0.eval(&z).map_err(|source| FixedPointError::Eval { reached: k, source })
            })
            .collect()
    };

    let mut per_step = Vec::new();
    let mut current = orbit_level(0)?;
    let mut contracted = false;
    let mut verdict = Verdict::BudgetExhausted;
    let mut n_star = None;

    for n in 0..cfg.n_max {
        let next = orbit_level(n + 1)?;
        let (s_cur, s_next) = (lambda.powi(n as i32), lambda.powi(n as i32 + 1));
        let d = current
            .iter()
            .zip(&next)
            .map(|(a, b)| (&b.scale(s_next) - &a.scale(s_cur)).norm2())
            .fold(0.0, f64::max);
        per_step.push(d);

        if d <= cfg.tol {
            verdict = Verdict::Converged;
            n_star = Some(n);
            break;
        }
        if d > cfg.cap || !d.is_finite() {
            verdict = Verdict::Diverged;
            n_star = Some(n);
            break;
        }
        if n >= 1 {
            let prev = per_step[n - 1];
            if d < prev {
                contracted = true;
            } else if contracted {
                verdict = Verdict::Stalled;
                break;
            }
        }
        current = next;
    }

    let n_star = n_star.unwrap_or_else(|| {
        per_step
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) })
            .0
    });
    Ok(FixedPointResult {
        limit: power(op, phi0, n_star),
        n_star,
        per_step_distances: closure_steps(&per_step, lambda),
        grid_step_distances: per_step,
        verdict,
        lambda,
    })
}

/// Suffix maxima `max_{k >= n} lambda^{n-k} d_k` of the grid steps `d_k`:
/// the step at `n` seen from every grid point's orbit up to the last step.
/// Scaling by powers of two is exact, so the contraction inequality holds
/// bit for bit.
fn closure_steps(grid_steps: &[f64], lambda: f64) -> Vec<f64> {
    let mut out = grid_steps.to_vec();
    for n in (0..out.len().saturating_sub(1)).rev() {
        out[n] = out[n].max(out[n + 1] / lambda);
    }
    out
}

/// `d(phi, J phi) / (1 - lambda)`: the a-priori distance from `phi` to the
/// fixed point. Infinite when `phi(2x)` cannot be evaluated on the grid.
pub fn apriori_bound(phi: &MapHandle, op: &ScalingOperator, grid: &SampleGrid) -> Result<f64, FixedPointError> {
    let jphi = apply(op, phi)?;
    let d = sup_distance(phi, &jphi, grid, f64::INFINITY)
        .map_err(|source| FixedPointError::Eval { reached: 1, source })?;
    Ok(d.value() / (1.0 - op.lambda))
}

/// `d(phi, J phi)` on the dyadic closure `{2^k x : k <= depth}` of the grid,
/// with the cap standing in for an infinite distance.
pub fn orbit_gap(
    phi: &MapHandle,
    op: &ScalingOperator,
    grid: &SampleGrid,
    depth: usize,
    cap: f64,
) -> Result<GeneralizedDistance, FixedPointError> {
    let closure = grid
        .dyadic_closure(depth)
        .ok_or_else(|| FixedPointError::InvalidConfig(format!("grid overflows under {depth} doublings")))?;
    let jphi = apply(op, phi)?;
    sup_distance(phi, &jphi, &closure, cap).map_err(|source| FixedPointError::Eval { reached: depth, source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::sup_norm;

    fn grid() -> SampleGrid {
        SampleGrid::stratified(2, 48, 3.0, 5)
    }

    fn additive() -> MapHandle {
        MapHandle::new("A", 2, 2, |x| Point::new(vec![2.0 * x[0] - x[1], 0.5 * x[1]]))
    }

    fn quadratic() -> MapHandle {
        MapHandle::new("P", 2, 1, |x| Point::new(vec![x[0] * x[0] - 3.0 * x[0] * x[1]]))
    }

    fn wobble(delta: f64) -> MapHandle {
        MapHandle::new("b", 2, 2, move |x| {
            let s = (x.norm2()).tanh();
            Point::new(vec![delta * s * (1.3 * x[0] + 0.2).sin() / 2f64.sqrt(), delta * s * (0.7 * x[1] - 0.4).cos() / 2f64.sqrt()])
        })
    }

    #[test]
    fn lambda_range() {
        assert!(ScalingOperator::new(1.0).is_err());
        assert!(ScalingOperator::new(-0.1).is_err());
        assert!(ScalingOperator::new(0.0).is_ok());
    }

    #[test]
    fn apply_fixes_additive_and_quadratic() {
        let g = grid();
        let a = additive();
        let ja = apply(&ScalingOperator::half(), &a).unwrap();
        assert_eq!(sup_distance(&a, &ja, &g, 1e12).unwrap().value(), 0.0);
        let p = quadratic();
        let jp = apply(&ScalingOperator::quarter(), &p).unwrap();
        assert_eq!(sup_distance(&p, &jp, &g, 1e12).unwrap().value(), 0.0);
        assert!(jp.eval(&Point::zeros(2)).unwrap().is_zero());
    }

    #[test]
    fn apply_halves_bounded_noise() {
        let g = grid();
        let b = wobble(0.01);
        let jb = apply(&ScalingOperator::half(), &b).unwrap();
        assert!(sup_norm(&jb, &g).unwrap() <= 0.005 + 1e-15);
    }

    #[test]
    fn apply_requires_membership_in_e() {
        let c = MapHandle::new("c", 2, 1, |_| Point::from([1.0]));
        assert!(matches!(apply(&ScalingOperator::half(), &c), Err(FixedPointError::NotInE { .. })));
    }

    #[test]
    fn apply_reports_overflow() {
        let a = additive();
        let ja = apply(&ScalingOperator::half(), &a).unwrap();
        assert!(matches!(ja.eval(&Point::from([f64::MAX, 0.0])), Err(EvalError::Overflow { .. })));
    }

    #[test]
    fn already_fixed_converges_immediately() {
        let res = iterate(&ScalingOperator::half(), &additive(), &grid(), &IterationConfig::default()).unwrap();
        assert_eq!(res.verdict, Verdict::Converged);
        assert_eq!(res.n_star, 0);
        assert_eq!(res.per_step_distances, vec![0.0]);
    }

    #[test]
    fn noisy_additive_converges_within_apriori_bound() {
        let g = grid();
        let op = ScalingOperator::half();
        let phi = additive().add(&wobble(0.01));
        let res = iterate(&op, &phi, &g, &IterationConfig::default()).unwrap();
        assert_eq!(res.verdict, Verdict::Converged);
        let d = sup_distance(&res.limit, &additive(), &g, 1e12).unwrap().value();
        assert!(d <= 1e-9, "limit is {d} from A");
        let bound = apriori_bound(&phi, &op, &g).unwrap();
        let moved = sup_distance(&phi, &res.limit, &g, 1e12).unwrap().value();
        assert!(moved <= bound + 1e-10, "{moved} > {bound}");
        let residual = sup_distance(&apply(&op, &res.limit).unwrap(), &res.limit, &g, 1e12).unwrap().value();
        assert!(residual <= 10.0 * DEFAULT_TOL);
    }

    #[test]
    fn cubic_growth_diverges() {
        let cubic = MapHandle::new("cubic", 2, 2, |x| {
            let r3 = x.norm2().powi(3);
            Point::new(vec![r3, 0.0])
        });
        let res = iterate(&ScalingOperator::half(), &cubic, &grid(), &IterationConfig::default()).unwrap();
        assert_eq!(res.verdict, Verdict::Diverged);
        let d = &res.grid_step_distances;
        for w in d.windows(2) {
            assert!((w[1] / w[0] - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn closure_steps_contract_exactly() {
        let d = closure_steps(&[1.0, 0.7, 0.2, 0.3, 0.01], 0.5);
        assert_eq!(d, vec![2.4, 1.2, 0.6, 0.3, 0.01]);
        for (n, &dn) in d.iter().enumerate() {
            assert!(dn <= 0.5f64.powi(n as i32) * d[0]);
        }
        let res = iterate(&ScalingOperator::quarter(), &additive().add(&wobble(1.0)), &grid(), &IterationConfig::default())
            .unwrap();
        for (n, (&c, &g)) in res.per_step_distances.iter().zip(&res.grid_step_distances).enumerate() {
            assert!(c >= g);
            assert!(c <= 0.25f64.powi(n as i32) * res.per_step_distances[0]);
        }
    }

    #[test]
    fn zero_lambda_kills_everything() {
        let op = ScalingOperator::new(0.0).unwrap();
        let res = iterate(&op, &wobble(1.0), &grid(), &IterationConfig::default()).unwrap();
        assert_eq!(res.verdict, Verdict::Converged);
        assert_eq!(res.n_star, 1);
    }

    #[test]
    fn bad_config() {
        let cfg = IterationConfig { n_max: 0, ..Default::default() };
        assert!(iterate(&ScalingOperator::half(), &additive(), &grid(), &cfg).is_err());
        let cfg = IterationConfig { tol: 0.0, ..Default::default() };
        assert!(iterate(&ScalingOperator::half(), &additive(), &grid(), &cfg).is_err());
    }

    #[test]
    fn budget_exhaustion_keeps_best_iterate() {
        let cfg = IterationConfig { n_max: 3, ..Default::default() };
        let phi = additive().add(&wobble(1.0));
        let res = iterate(&ScalingOperator::half(), &phi, &grid(), &cfg).unwrap();
        assert_eq!(res.verdict, Verdict::BudgetExhausted);
        assert_eq!(res.per_step_distances.len(), 3);
        assert_eq!(res.n_star, 2);
    }
}
