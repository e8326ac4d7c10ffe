//! Specialisations of the main pipeline: orthogonally quadratic maps, the
//! Pexiderized Cauchy equation and inner-product spaces.

use serde::Serialize;

use super::bounds::{all_satisfied, coef, BoundCheck};
use super::defect::{sup_dev, sup_doubling};
use super::pipeline::{
    necessity_check, pipeline_identity_tol, ratz_decompose, run_main_theorem, NecessityReport, PipelineConfig,
    RatzDecomposition, StabilityReport,
};
use crate::error::StabilityError;
use crate::funcspace::{shift_to_zero, sup_norm, MapHandle, SampleGrid};
use crate::orthogonality::{OrthoPair, OrthoRelation};

/// Multipliers standing in for the unnamed constants of `‖·‖ ⊴ ε`
/// statements. Defaults are the constants the construction itself yields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Multipliers {
    /// `|Q - A - P| <= sufficiency * eps`.
    pub sufficiency: f64,
    /// `2 |Q(2x) - 4Q(x)| <= necessity * sup |Q - T|`.
    pub necessity: f64,
}

impl Default for Multipliers {
    fn default() -> Self {
        Multipliers { sufficiency: coef::DEV_F_T, necessity: coef::NECESSITY }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadraticReport {
    pub theorem: StabilityReport,
    pub ratz: RatzDecomposition,
    /// `sup |Q(2x) - 4Q(x)|` on the grid.
    pub doubling: f64,
    pub necessity: NecessityReport,
    pub checks: Vec<BoundCheck>,
}

impl QuadraticReport {
    pub fn all_pass(&self) -> bool {
        all_satisfied(&self.checks) && self.theorem.all_pass() && self.necessity.check.satisfied()
    }
}

/// Runs the pipeline on `f = g = Q`, `h = k = 2Q` and splits the resulting
/// `T` into `A + P`; then checks the converse through the necessity
/// estimate.
pub fn run_quadratic_corollary(
    q: &MapHandle,
    relation: &OrthoRelation,
    grid: &SampleGrid,
    pairs: &[OrthoPair],
    cfg: &PipelineConfig,
    multipliers: Multipliers,
) -> Result<QuadraticReport, StabilityError> {
    let q0 = q.at_zero()?.norm2();
    if q0 != 0.0 {
        return Err(StabilityError::Config(format!("Q must vanish at 0, |Q(0)| = {q0:e}")));
    }
    let two_q = q.scale(2.0).relabel("2Q");
    let theorem = run_main_theorem(q, q, &two_q, &two_q, relation, grid, pairs, cfg)?;
    let ratz = ratz_decompose(&theorem.maps.t, pairs, grid)?;
    let eps = theorem.eps_hat;
    let ap = ratz.a.add(&ratz.p);
    let checks = vec![
        BoundCheck::new("dev_Q_AP", sup_dev(q, &ap, grid)?, multipliers.sufficiency, eps, cfg.slack),
        BoundCheck::new("sup_A", sup_norm(&ratz.a, grid)?, coef::QUADRATIC_ODD, eps, cfg.slack),
    ];
    let doubling = sup_doubling(q, 4.0, grid)?;
    let tol = pipeline_identity_tol(&theorem, grid, cfg)?;
    let mut necessity = necessity_check(q, &theorem.maps.t, grid, tol, cfg.slack)?;
    necessity.check =
        BoundCheck::new("necessity", necessity.measured, multipliers.necessity, necessity.sup_fe_te, cfg.slack);
    Ok(QuadraticReport { theorem, ratz, doubling, necessity, checks })
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchyReport {
    pub theorem: StabilityReport,
    pub checks: Vec<BoundCheck>,
}

impl CauchyReport {
    pub fn all_pass(&self) -> bool {
        all_satisfied(&self.checks) && self.theorem.all_pass()
    }
}

/// Runs the pipeline with `g = 0` on `|f(x+y) - h(x) - k(y)| <= eps`.
///
/// Normative: `|f - f(0) - T| <= 32 eps`, `|h + k - h(0) - k(0) - 2T| <= 72
/// eps`, and the intermediate `|Fᵉ - S| <= 14 eps`, `|Lᵉ - S| <= 16 eps`.
/// The sharper `16 eps` for `h + k` is recorded as informational.
pub fn run_cauchy_corollary(
    f: &MapHandle,
    h: &MapHandle,
    k: &MapHandle,
    relation: &OrthoRelation,
    grid: &SampleGrid,
    pairs: &[OrthoPair],
    cfg: &PipelineConfig,
) -> Result<CauchyReport, StabilityError> {
    let g = MapHandle::zero(f.source_dim(), f.target_dim()).relabel("g");
    let theorem = run_main_theorem(f, &g, h, k, relation, grid, pairs, cfg)?;
    let eps = theorem.eps_hat;
    let m = &theorem.maps;
    let two_t = m.t.scale(2.0);
    let hk = shift_to_zero(&h.add(k));
    let dev_hk = sup_dev(&hk, &two_t, grid)?;
    let slack = cfg.slack;
    let checks = vec![
        BoundCheck::new("cauchy_Fe_S", sup_dev(&m.parts.f_e, &m.s, grid)?, coef::CAUCHY_FE_S, eps, slack),
        BoundCheck::new("cauchy_Le_S", sup_dev(&m.parts.l_e, &m.s, grid)?, coef::CAUCHY_LE_S, eps, slack),
        BoundCheck::new("cauchy_f_T", sup_dev(&shift_to_zero(f), &m.t, grid)?, coef::CAUCHY_F_T, eps, slack),
        BoundCheck::new("cauchy_hk_2T", dev_hk, coef::CAUCHY_HK_2T, eps, slack),
        BoundCheck::new("cauchy_hk_2T_stated", dev_hk, coef::CAUCHY_HK_2T_STATED, eps, slack).informational(),
    ];
    Ok(CauchyReport { theorem, checks })
}

/// The main pipeline restricted to the inner-product relation in dimension
/// at least 3.
pub fn run_inner_product_corollary(
    f: &MapHandle,
    g: &MapHandle,
    h: &MapHandle,
    k: &MapHandle,
    grid: &SampleGrid,
    pairs: &[OrthoPair],
    cfg: &PipelineConfig,
) -> Result<StabilityReport, StabilityError> {
    if grid.dim() < 3 {
        return Err(StabilityError::Config(format!(
            "the inner-product specialisation needs dimension at least 3, got {}",
            grid.dim()
        )));
    }
    run_main_theorem(f, g, h, k, &OrthoRelation::inner_product(), grid, pairs, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::sup_distance;
    use crate::orthogonality::sample_orthogonal_pairs;
    use crate::perturb::{add_cubic, compose_cauchy_instance, compose_pexider_instance, compose_quadratic_instance, GroundTruth};
    use crate::point::Point;

    fn pairs(dim: usize, seed: u64) -> Vec<OrthoPair> {
        sample_orthogonal_pairs(&OrthoRelation::inner_product(), dim, 128, 8.0, seed).unwrap()
    }

    #[test]
    fn quadratic_exact_and_noisy() {
        let grid = SampleGrid::stratified(3, 64, 8.0, 1);
        let cfg = PipelineConfig::default();
        let r = OrthoRelation::inner_product();
        let gt = GroundTruth::random(3, 2, 0.0, 4).unwrap();
        let rep = run_quadratic_corollary(&compose_quadratic_instance(&gt), &r, &grid, &pairs(3, 2), &cfg, Multipliers::default()).unwrap();
        assert!(rep.all_pass(), "{:#?}", rep.checks);
        assert!(rep.checks[0].measured <= 1e-9);
        assert!(rep.checks[1].measured <= 1e-9);

        let delta = 0.02;
        let gt = gt.with_delta(delta).unwrap();
        let q = compose_quadratic_instance(&gt);
        let rep = run_quadratic_corollary(&q, &r, &grid, &pairs(3, 2), &cfg, Multipliers::default()).unwrap();
        assert!(rep.all_pass(), "{:#?}", rep.checks);
        assert!(rep.doubling <= 5.0 * delta);
        let dev_p = sup_distance(&rep.ratz.p, &gt.quadratic(), &grid, 1e12).unwrap().value();
        assert!(dev_p <= 86.0 / 3.0 * rep.theorem.eps_hat + delta);
    }

    #[test]
    fn quadratic_with_cubic_diverges() {
        let grid = SampleGrid::stratified(2, 32, 8.0, 1);
        let gt = GroundTruth::random(2, 2, 0.0, 3).unwrap();
        let q = add_cubic(&compose_quadratic_instance(&gt), 0.1);
        let err = run_quadratic_corollary(&q, &OrthoRelation::inner_product(), &grid, &pairs(2, 5), &PipelineConfig::default(), Multipliers::default()).unwrap_err();
        assert!(matches!(err, StabilityError::Diverged { .. }), "{err}");
    }

    #[test]
    fn cauchy_noisy() {
        let grid = SampleGrid::stratified(3, 64, 8.0, 7);
        let gt = GroundTruth::random(3, 3, 0.01, 8).unwrap();
        let (f, h, k) = compose_cauchy_instance(&gt, &Point::from([0.5, -1.0, 0.25]), &Point::from([2.0, 0.0, -0.75]));
        let rep = run_cauchy_corollary(&f, &h, &k, &OrthoRelation::inner_product(), &grid, &pairs(3, 9), &PipelineConfig::default()).unwrap();
        assert!(rep.all_pass(), "{:#?}", rep.checks);
        assert!(rep.checks.iter().any(|c| c.informational));
    }

    #[test]
    fn cauchy_exact() {
        let grid = SampleGrid::stratified(2, 48, 8.0, 7);
        let gt = GroundTruth::random(2, 2, 0.0, 8).unwrap();
        let (f, h, k) = compose_cauchy_instance(&gt, &Point::from([1.0, 2.0]), &Point::from([-3.0, 0.5]));
        let rep = run_cauchy_corollary(&f, &h, &k, &OrthoRelation::inner_product(), &grid, &pairs(2, 9), &PipelineConfig::default()).unwrap();
        for c in &rep.checks {
            assert!(c.measured <= 1e-9, "{}: {:e}", c.name, c.measured);
        }
    }

    #[test]
    fn inner_product_needs_three_dimensions() {
        let gt = GroundTruth::random(2, 2, 0.0, 1).unwrap();
        let inst = compose_pexider_instance(&gt);
        let grid = SampleGrid::stratified(2, 16, 4.0, 0);
        let err = run_inner_product_corollary(&inst.f, &inst.g, &inst.h, &inst.k, &grid, &pairs(2, 1), &PipelineConfig::default()).unwrap_err();
        assert!(matches!(err, StabilityError::Config(_)));

        let gt = GroundTruth::random(4, 4, 0.0, 1).unwrap();
        let inst = compose_pexider_instance(&gt);
        let grid = SampleGrid::stratified(4, 32, 4.0, 0);
        let rep = run_inner_product_corollary(&inst.f, &inst.g, &inst.h, &inst.k, &grid, &pairs(4, 1), &PipelineConfig::default()).unwrap();
        assert!(rep.all_pass());
    }
}
