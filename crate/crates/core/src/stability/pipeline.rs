//! Extraction of the approximants and assembly of `T`, `T'`, `T''`.

use serde::Serialize;

use super::bounds::{all_satisfied, coef, BoundCheck, Slack};
use super::defect::{axis_pairs, derive_normalized_parts, measure_defects, sup_dev, sup_doubling, DefectReport, NormalizedParts};
use crate::error::{OrthoError, StabilityError};
use crate::fixedpoint::{iterate, IterationConfig, ScalingOperator, Verdict};
use crate::funcspace::{even_part, odd_part, sup_norm, sup_over, MapHandle, SampleGrid};
use crate::orthogonality::{sample_orthogonal_pairs, thalesian_solve, OrthoPair, OrthoRelation};
use crate::point::Point;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionSummary {
    pub stage: String,
    pub lambda: f64,
    pub verdict: Verdict,
    pub n_star: usize,
    pub per_step_distances: Vec<f64>,
    pub grid_step_distances: Vec<f64>,
    pub final_step: f64,
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub limit: MapHandle,
    pub summary: ExtractionSummary,
}

fn extract(op: ScalingOperator, phi: &MapHandle, grid: &SampleGrid, cfg: &IterationConfig) -> Result<Extraction, StabilityError> {
    let res = iterate(&op, phi, grid, cfg)?;
    if res.verdict == Verdict::Diverged {
        return Err(StabilityError::Diverged { stage: phi.label().to_string(), steps: res.per_step_distances.len() });
    }
    let summary = ExtractionSummary {
        stage: phi.label().to_string(),
        lambda: res.lambda,
        verdict: res.verdict,
        n_star: res.n_star,
        final_step: res.final_step(),
        per_step_distances: res.per_step_distances,
        grid_step_distances: res.grid_step_distances,
    };
    Ok(Extraction { limit: res.limit, summary })
}

/// `lim phi(2^n x) / 2^n` for an odd `phi` vanishing at 0.
pub fn extract_odd(phi: &MapHandle, grid: &SampleGrid, cfg: &IterationConfig) -> Result<Extraction, StabilityError> {
    extract(ScalingOperator::half(), phi, grid, cfg)
}

/// `lim phi(2^n x) / 4^n` for an even `phi` vanishing at 0.
pub fn extract_even(phi: &MapHandle, grid: &SampleGrid, cfg: &IterationConfig) -> Result<Extraction, StabilityError> {
    extract(ScalingOperator::quarter(), phi, grid, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub iteration: IterationConfig,
    pub slack: Slack,
    /// Pairs drawn afresh to test orthogonal additivity of the results.
    pub fresh_pairs: usize,
    pub fresh_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            iteration: IterationConfig::default(),
            slack: Slack::default(),
            fresh_pairs: 256,
            fresh_seed: 0x0f2e_5a17,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditivityReport {
    pub pair_count: usize,
    pub seed: u64,
    /// `sup |T(x+y) - T(x) - T(y)|` over fresh orthogonal pairs.
    pub t: f64,
    pub t_prime: f64,
    pub t_dprime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    /// Largest of `|T - R - S|`, `|T' - R' - S'|`, `|T'' - 2R - 2S - 2S'|`.
    pub assembly: f64,
    /// `|R(2x) - 2R(x)|` and `|R'(2x) - 2R'(x)|`.
    pub scaling_odd: f64,
    /// `|S(2x) - 4S(x)|` and `|S'(2x) - 4S'(x)|`.
    pub scaling_even: f64,
    /// `|R(-x) + R(x)|`, `|S(-x) - S(x)|` and primed versions.
    pub parity: f64,
}

/// The extracted and assembled maps.
#[derive(Debug, Clone)]
pub struct Approximants {
    pub parts: NormalizedParts,
    pub r: MapHandle,
    pub r_prime: MapHandle,
    pub s: MapHandle,
    pub s_prime: MapHandle,
    pub t: MapHandle,
    pub t_prime: MapHandle,
    pub t_dprime: MapHandle,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub relation: String,
    pub defects: DefectReport,
    /// The defect every bound is scaled by.
    pub eps_hat: f64,
    pub extractions: Vec<ExtractionSummary>,
    /// Intermediate estimates followed by the three final ones.
    pub checks: Vec<BoundCheck>,
    pub additivity: AdditivityReport,
    pub structure: StructureReport,
    /// Grid points where no Thalesian partner was found; those points are
    /// left out of the doubling-sum check.
    pub thalesian_skipped: usize,
    #[serde(skip)]
    pub maps: Approximants,
}

/// Names of the three final estimates.
pub const THEOREM_CHECKS: [&str; 3] = ["dev_f_T", "dev_g_T'", "dev_hk_T''"];

impl StabilityReport {
    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_pass(&self) -> bool {
        all_satisfied(&self.checks)
    }

    /// Largest last step among the four extractions; it bounds how far the
    /// returned iterates are from exact doubling identities.
    pub fn worst_final_step(&self) -> f64 {
        self.extractions.iter().map(|e| e.final_step).fold(0.0, f64::max)
    }
}

fn additivity_defect(t: &MapHandle, pairs: &[OrthoPair]) -> Result<f64, StabilityError> {
    let mut max = 0.0f64;
    for (x, y) in pairs {
        let r = &t.eval(&(x + y))? - &(&t.eval(x)? + &t.eval(y)?);
        max = max.max(r.norm2());
    }
    Ok(max)
}

fn quadratic_defect(p: &MapHandle, pairs: &[OrthoPair]) -> Result<f64, StabilityError> {
    let mut max = 0.0f64;
    for (x, y) in pairs {
        let lhs = &p.eval(&(x + y))? + &p.eval(&(x - y))?;
        let rhs = (&p.eval(x)? + &p.eval(y)?).scale(2.0);
        max = max.max((&lhs - &rhs).norm2());
    }
    Ok(max)
}

fn validate_pairs(relation: &OrthoRelation, pairs: &[OrthoPair], dim: usize) -> Result<(), StabilityError> {
    if pairs.is_empty() {
        return Err(StabilityError::EmptyPairs);
    }
    for (i, (x, y)) in pairs.iter().enumerate() {
        if x.dim() != dim || y.dim() != dim {
            return Err(OrthoError::InvalidArgument(format!("pair {i} has the wrong dimension")).into());
        }
        if !relation.is_orthogonal(x, y).map_err(OrthoError::from)? {
            return Err(StabilityError::Config(format!("pair {i} is not orthogonal under {relation}")));
        }
    }
    Ok(())
}

/// `sup |(Fᵉ(2y0) - 4Fᵉ(y0)) + (Gᵉ(2x) - 4Gᵉ(x))|` over grid points `x` with
/// `y0` solving the Thalesian condition for `lambda = 1`.
fn doubling_sum(
    relation: &OrthoRelation,
    f_e: &MapHandle,
    g_e: &MapHandle,
    grid: &SampleGrid,
) -> Result<(f64, usize), StabilityError> {
    let mut max = 0.0f64;
    let mut skipped = 0;
    for x in grid.points().iter().filter(|x| !x.is_zero()) {
        let y0 = match thalesian_solve(relation, x, 1.0) {
            Ok(y0) => y0,
            Err(OrthoError::ThalesianNotFound { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let a = &f_e.eval(&y0.scale(2.0))? - &f_e.eval(&y0)?.scale(4.0);
        let b = &g_e.eval(&x.scale(2.0))? - &g_e.eval(x)?.scale(4.0);
        max = max.max((&a + &b).norm2());
    }
    Ok((max, skipped))
}

/// Runs the full construction on `f, g, h, k` and checks every estimate
/// against the measured defect.
///
/// The defect is taken over `pairs` together with the axis pairs `(±x, 0)`,
/// `(0, ±x)` of the grid; deviations are measured on the grid.
#[allow(clippy::too_many_arguments)]
pub fn run_main_theorem(
    f: &MapHandle,
    g: &MapHandle,
    h: &MapHandle,
    k: &MapHandle,
    relation: &OrthoRelation,
    grid: &SampleGrid,
    pairs: &[OrthoPair],
    cfg: &PipelineConfig,
) -> Result<StabilityReport, StabilityError> {
    let dim = grid.dim();
    if !relation.is_symmetric_by_construction() {
        return Err(StabilityError::Config(format!(
            "relation {relation} is not symmetric; symmetrize it first"
        )));
    }
    for m in [f, g, h, k] {
        if m.source_dim() != dim || m.target_dim() != f.target_dim() {
            return Err(StabilityError::Config(format!("map {} has mismatched dimensions", m.label())));
        }
    }
    validate_pairs(relation, pairs, dim)?;

    let mut all_pairs = pairs.to_vec();
    all_pairs.extend(axis_pairs(grid));
    let defects = measure_defects([f, g, h, k], &all_pairs, grid)?;
    if !defects.eps_even_doubling.is_finite() {
        return Err(StabilityError::Config("doubling defect is not finite".into()));
    }
    let eps = defects.eps_pexider;
    let parts = derive_normalized_parts(f, g, h, k, &all_pairs)?;
    let it = &cfg.iteration;

    let r = extract_odd(&parts.f_o, grid, it)?;
    let r_prime = extract_odd(&parts.g_o, grid, it)?;
    let s_prime = extract_even(&parts.g_e, grid, it)?;
    let s = extract_even(&parts.f_e, grid, it)?;
    let (rm, rpm, sm, spm) = (
        r.limit.relabel("R"),
        r_prime.limit.relabel("R'"),
        s.limit.relabel("S"),
        s_prime.limit.relabel("S'"),
    );
    let t = MapHandle::linear_combination("T", &[(1.0, &rm), (1.0, &sm)]);
    let t_prime = MapHandle::linear_combination("T'", &[(1.0, &rpm), (1.0, &spm)]);
    let t_dprime = MapHandle::linear_combination("T''", &[(2.0, &rm), (2.0, &sm), (2.0, &spm)]);

    let slack = cfg.slack;
    let check = |name: &str, measured: f64, c: f64| BoundCheck::new(name, measured, c, eps, slack);
    let p = &parts;
    let (dsum, skipped) = doubling_sum(relation, &p.f_e, &p.g_e, grid)?;

    let f_norm = crate::funcspace::shift_to_zero(f);
    let g_norm = crate::funcspace::shift_to_zero(g);
    let hk_norm = crate::funcspace::shift_to_zero(&h.add(k));
    let sum_s = sm.add(&spm);

    let checks = vec![
        check("parts_odd", p.residual_odd, coef::PARTS),
        check("parts_even", p.residual_even, coef::PARTS),
        check("odd_gap_F", sup_doubling(&p.f_o, 2.0, grid)? / 2.0, coef::ODD_GAP),
        check("odd_gap_G", sup_doubling(&p.g_o, 2.0, grid)? / 2.0, coef::ODD_GAP),
        check("dev_Fo_R", sup_dev(&p.f_o, &rm, grid)?, coef::DEV_ODD),
        check("dev_Go_R'", sup_dev(&p.g_o, &rpm, grid)?, coef::DEV_ODD),
        check("dev_Fo_Lo", sup_dev(&p.f_o, &p.l_o, grid)?, coef::PARTS),
        check("dev_Lo_R", sup_dev(&p.l_o, &rm, grid)?, coef::DEV_LO_R),
        check("even_gap_G", sup_doubling(&p.g_e, 4.0, grid)? / 4.0, coef::EVEN_GAP_G),
        check("doubling_sum", dsum, coef::DOUBLING_SUM),
        check("dev_Ge_S'", sup_dev(&p.g_e, &spm, grid)?, coef::DEV_GE_SP),
        check("doubling_Ge", sup_doubling(&p.g_e, 4.0, grid)?, coef::DOUBLING_GE),
        check("even_gap_F", sup_doubling(&p.f_e, 4.0, grid)? / 4.0, coef::EVEN_GAP_F),
        check("dev_Fe_S", sup_dev(&p.f_e, &sm, grid)?, coef::DEV_FE_S),
        check("dev_Le_SS'", sup_dev(&p.l_e, &sum_s, grid)?, coef::DEV_LE_SSP),
        check(THEOREM_CHECKS[0], sup_dev(&f_norm, &t, grid)?, coef::DEV_F_T),
        check(THEOREM_CHECKS[1], sup_dev(&g_norm, &t_prime, grid)?, coef::DEV_G_TP),
        check(THEOREM_CHECKS[2], sup_dev(&hk_norm, &t_dprime, grid)?, coef::DEV_HK_TPP),
    ];

    let fresh = sample_orthogonal_pairs(relation, dim, cfg.fresh_pairs.max(1), grid.radius().max(1e-3), cfg.fresh_seed)?;
    let additivity = AdditivityReport {
        pair_count: fresh.len(),
        seed: cfg.fresh_seed,
        t: additivity_defect(&t, &fresh)?,
        t_prime: additivity_defect(&t_prime, &fresh)?,
        t_dprime: additivity_defect(&t_dprime, &fresh)?,
    };

    let structure = structure(grid, [&rm, &rpm, &sm, &spm], [&t, &t_prime, &t_dprime])?;

    Ok(StabilityReport {
        relation: relation.to_string(),
        defects,
        eps_hat: eps,
        extractions: vec![r.summary, r_prime.summary, s_prime.summary, s.summary],
        checks,
        additivity,
        structure,
        thalesian_skipped: skipped,
        maps: Approximants { parts, r: rm, r_prime: rpm, s: sm, s_prime: spm, t, t_prime, t_dprime },
    })
}

fn structure(grid: &SampleGrid, rs: [&MapHandle; 4], ts: [&MapHandle; 3]) -> Result<StructureReport, StabilityError> {
    let [r, rp, s, sp] = rs;
    let [t, tp, tpp] = ts;
    let assembly = sup_over(grid.points(), |x| {
        let (rx, rpx, sx, spx) = (r.eval(x)?, rp.eval(x)?, s.eval(x)?, sp.eval(x)?);
        let a = (&t.eval(x)? - &(&rx + &sx)).norm2();
        let b = (&tp.eval(x)? - &(&rpx + &spx)).norm2();
        let c = (&tpp.eval(x)? - &(&(&rx + &sx) + &spx).scale(2.0)).norm2();
        Ok(a.max(b).max(c))
    })?
    .0;
    let scaling_odd = sup_doubling(r, 2.0, grid)?.max(sup_doubling(rp, 2.0, grid)?);
    let scaling_even = sup_doubling(s, 4.0, grid)?.max(sup_doubling(sp, 4.0, grid)?);
    let parity = sup_over(grid.points(), |x| {
        let nx = -x;
        let odd = (&r.eval(&nx)? + &r.eval(x)?).norm2().max((&rp.eval(&nx)? + &rp.eval(x)?).norm2());
        let even = (&s.eval(&nx)? - &s.eval(x)?).norm2().max((&sp.eval(&nx)? - &sp.eval(x)?).norm2());
        Ok(odd.max(even))
    })?
    .0;
    Ok(StructureReport { assembly, scaling_odd, scaling_even, parity })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessityReport {
    /// `sup 2|fᵉ(2x) - 4fᵉ(x)|` on the grid.
    pub measured: f64,
    /// `sup |fᵉ - Tᵉ|` on the grid and its doubled copy.
    pub sup_fe_te: f64,
    /// `sup |Tᵉ(2x) - 4Tᵉ(x)|` on the grid.
    pub identity_residual: f64,
    pub check: BoundCheck,
}

/// Checks that the doubling defect of `f` is controlled by its distance to
/// an orthogonally additive `T`: `2|fᵉ(2x) - 4fᵉ(x)| <= 10 sup |fᵉ - Tᵉ|`
/// once `Tᵉ(2x) = 4Tᵉ(x)`.
pub fn necessity_check(
    f: &MapHandle,
    t: &MapHandle,
    grid: &SampleGrid,
    identity_tol: f64,
    slack: Slack,
) -> Result<NecessityReport, StabilityError> {
    let (fe, te) = (even_part(f), even_part(t));
    let identity_residual = sup_doubling(&te, 4.0, grid)?;
    if !(identity_residual <= identity_tol) {
        return Err(StabilityError::DoublingIdentity { residual: identity_residual, tol: identity_tol });
    }
    let measured = 2.0 * sup_doubling(&fe, 4.0, grid)?;
    let doubled = grid
        .dyadic_closure(1)
        .ok_or_else(|| StabilityError::Config("grid overflows when doubled".into()))?;
    let sup_fe_te = sup_dev(&fe, &te, &doubled)?;
    let check = BoundCheck::new("necessity", measured, coef::NECESSITY, sup_fe_te, slack);
    Ok(NecessityReport { measured, sup_fe_te, identity_residual, check })
}

/// Tolerance for `Tᵉ(2x) = 4Tᵉ(x)` on a pipeline-built `T`: the even
/// iterate's last step, with room for rounding at the scale of `T`.
pub fn pipeline_identity_tol(report: &StabilityReport, grid: &SampleGrid, cfg: &PipelineConfig) -> Result<f64, StabilityError> {
    let step = 4.0 * report.worst_final_step();
    let doubled = grid
        .dyadic_closure(1)
        .ok_or_else(|| StabilityError::Config("grid overflows when doubled".into()))?;
    let scale = sup_norm(&report.maps.t, &doubled)?;
    Ok(10.0 * cfg.iteration.tol.max(step) + 1e-12 * (1.0 + scale))
}

#[derive(Debug, Clone, Serialize)]
pub struct RatzDecomposition {
    #[serde(skip)]
    pub a: MapHandle,
    #[serde(skip)]
    pub p: MapHandle,
    /// `sup |A(x+y) - A(x) - A(y)|` over the pairs.
    pub additive_defect: f64,
    /// `sup |P(x+y) + P(x-y) - 2P(x) - 2P(y)|` over the pairs.
    pub quadratic_defect: f64,
    /// `sup |A + P - T|` on the grid.
    pub recomposition: f64,
    /// Largest of `|A(-x) + A(x)|` and `|P(-x) - P(x)|` on the grid.
    pub parity: f64,
}

/// Splits `T` into its odd part `A` and even part `P` and measures how far
/// they are from additive and quadratic on the pairs.
pub fn ratz_decompose(t: &MapHandle, pairs: &[OrthoPair], grid: &SampleGrid) -> Result<RatzDecomposition, StabilityError> {
    if pairs.is_empty() {
        return Err(StabilityError::EmptyPairs);
    }
    let a = odd_part(t).relabel("A");
    let p = even_part(t).relabel("P");
    let additive_defect = additivity_defect(&a, pairs)?;
    let quadratic_defect = quadratic_defect(&p, pairs)?;
    let recomposition = sup_over(grid.points(), |x| {
        Ok((&(&a.eval(x)? + &p.eval(x)?) - &t.eval(x)?).norm2())
    })?
    .0;
    let parity = sup_over(grid.points(), |x| {
        let nx: Point = -x;
        Ok((&a.eval(&nx)? + &a.eval(x)?).norm2().max((&p.eval(&nx)? - &p.eval(x)?).norm2()))
    })?
    .0;
    Ok(RatzDecomposition { a, p, additive_defect, quadratic_defect, recomposition, parity })
}
