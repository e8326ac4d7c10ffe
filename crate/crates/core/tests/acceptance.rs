//! Acceptance sweep. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{dist, setup, within, Setup, DELTAS, SEEDS};
use orthostab::fixedpoint::{apriori_bound, iterate, ScalingOperator, Verdict};
use orthostab::funcspace::{even_part, shift_to_zero, sup_norm, MapHandle};
use orthostab::orthogonality::{
    check_axioms, random_in_ball, sample_orthogonal_pairs, thalesian_solve, NormSpec, OrthoRelation,
};
use orthostab::perturb::{add_cubic, compose_cauchy_instance, compose_pexider_instance, compose_quadratic_instance};
use orthostab::stability::{
    coef, necessity_check, pipeline_identity_tol, ratz_decompose, run_cauchy_corollary, run_main_theorem,
    run_quadratic_corollary, Multipliers, StabilityReport,
};
use orthostab::Point;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into() }
    }
}

/// Tracks the worst case of a family of `measured <= allowed` checks.
#[derive(Default)]
struct Worst {
    ratio: f64,
    failures: Vec<String>,
    count: usize,
}

impl Worst {
    fn check(&mut self, label: impl FnOnce() -> String, measured: f64, allowed: f64, ok: bool) {
        self.count += 1;
        let r = if allowed > 0.0 { measured / allowed } else if measured > 0.0 { f64::INFINITY } else { 0.0 };
        self.ratio = self.ratio.max(r);
        if !ok {
            self.failures.push(format!("{} measured {measured:.3e} allowed {allowed:.3e}", label()));
        }
    }

    fn bound(&mut self, label: &str, measured: f64, coefficient: f64, reference: f64) {
        self.check(|| label.to_string(), measured, coefficient * reference, within(measured, coefficient, reference));
    }

    fn outcome(self, what: &str) -> Outcome {
        let mut detail = format!("{} {what} checks, worst ratio {:.3e}", self.count, self.ratio);
        if let Some(first) = self.failures.first() {
            detail += &format!("; {} failing, first: {first}", self.failures.len());
        }
        Outcome::new(self.failures.is_empty() && self.count > 0, detail)
    }
}

struct PipelineRun {
    label: String,
    setup: Setup,
    f: MapHandle,
    report: StabilityReport,
    elapsed: Duration,
}

fn pipeline_run(dim: usize, delta: f64, seed: u64) -> PipelineRun {
    let start = Instant::now();
    let s = setup(dim, delta, seed);
    let inst = compose_pexider_instance(&s.truth);
    let report = run_main_theorem(&inst.f, &inst.g, &inst.h, &inst.k, &s.relation, &s.grid, &s.pairs, &s.cfg).unwrap();
    PipelineRun {
        label: format!("dim={dim} delta={delta:e} seed={seed}"),
        setup: s,
        f: inst.f,
        report,
        elapsed: start.elapsed(),
    }
}

fn measured(rep: &StabilityReport, name: &str) -> f64 {
    rep.check(name).unwrap_or_else(|| panic!("missing check {name}")).measured
}

fn criterion_1(exact: &[PipelineRun]) -> Outcome {
    let mut worst_defect = 0.0f64;
    let mut worst_dev = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut bad = Vec::new();
    for run in exact {
        let eps = run.report.defects.eps_pexider;
        let dev = measured(&run.report, "dev_f_T");
        worst_defect = worst_defect.max(eps);
        worst_dev = worst_dev.max(dev);
        slowest = slowest.max(run.elapsed);
        if eps > 1e-12 || dev > 1e-9 || run.elapsed > Duration::from_secs(5) {
            bad.push(run.label.clone());
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!(
            "{} runs, max defect {worst_defect:.3e}, max sup|f-f(0)-T| {worst_dev:.3e}, slowest {:.2} s{}",
            exact.len(),
            slowest.as_secs_f64(),
            if bad.is_empty() { String::new() } else { format!("; failing: {}", bad.join(", ")) }
        ),
    )
}

fn criterion_2(noisy: &[PipelineRun], total: Duration) -> Outcome {
    let mut w = Worst::default();
    for run in noisy {
        let eps = run.report.eps_hat;
        for (name, c) in [("dev_f_T", coef::DEV_F_T), ("dev_g_T'", coef::DEV_G_TP), ("dev_hk_T''", coef::DEV_HK_TPP)] {
            w.bound(&format!("{} {name}", run.label), measured(&run.report, name), c, eps);
        }
    }
    let fast = total <= Duration::from_secs(30);
    let mut out = w.outcome("statement-constant");
    out.detail += &format!(", total {:.2} s", total.as_secs_f64());
    out.ok &= fast;
    out
}

fn criterion_3(noisy: &[PipelineRun]) -> Outcome {
    let mut w = Worst::default();
    let names = [
        ("dev_Fo_R", coef::DEV_ODD),
        ("dev_Go_R'", coef::DEV_ODD),
        ("dev_Fo_Lo", coef::PARTS),
        ("dev_Lo_R", coef::DEV_LO_R),
        ("dev_Ge_S'", coef::DEV_GE_SP),
        ("dev_Fe_S", coef::DEV_FE_S),
        ("dev_Le_SS'", coef::DEV_LE_SSP),
    ];
    for run in noisy {
        for (name, c) in names {
            w.bound(&format!("{} {name}", run.label), measured(&run.report, name), c, run.report.eps_hat);
        }
    }
    w.outcome("intermediate")
}

fn criterion_4(noisy: &[PipelineRun]) -> Outcome {
    let mut geometric = Worst::default();
    let mut apriori = Worst::default();
    for run in noisy {
        for ex in run.report.extractions.iter().filter(|e| e.verdict != Verdict::Diverged) {
            let d = &ex.per_step_distances;
            for (n, &dn) in d.iter().enumerate() {
                let allowed = ex.lambda.powi(n as i32) * d[0] + 1e-10;
                geometric.check(|| format!("{} {} step {n}", run.label, ex.stage), dn, allowed, dn <= allowed);
            }
        }
        let m = &run.report.maps;
        let grid = &run.setup.grid;
        let tol = run.setup.cfg.iteration.tol;
        for (phi, limit, op) in [
            (&m.parts.f_o, &m.r, ScalingOperator::half()),
            (&m.parts.g_o, &m.r_prime, ScalingOperator::half()),
            (&m.parts.g_e, &m.s_prime, ScalingOperator::quarter()),
            (&m.parts.f_e, &m.s, ScalingOperator::quarter()),
        ] {
            let dev = dist(phi, limit, grid);
            let allowed = apriori_bound(phi, &op, grid).unwrap() + tol;
            apriori.check(|| format!("{} {}", run.label, phi.label()), dev, allowed, dev <= allowed);
        }
    }

    let s = setup(3, 0.0, 1);
    let contaminated = even_part(&shift_to_zero(&add_cubic(&compose_quadratic_instance(&s.truth), 0.1)));
    let cubic = iterate(&ScalingOperator::quarter(), &contaminated, &s.grid, &s.cfg.iteration).unwrap();
    let diverged = cubic.verdict == Verdict::Diverged;

    let g = geometric.outcome("geometric-rate");
    let a = apriori.outcome("a-priori");
    Outcome::new(
        g.ok && a.ok && diverged,
        format!("{}; {}; cubic input verdict {:?}", g.detail, a.detail, cubic.verdict),
    )
}

fn criterion_5() -> Outcome {
    let dim = 3;
    let inner = OrthoRelation::inner_product().with_tol(1e-9);
    let bj = OrthoRelation::birkhoff_james(NormSpec::Euclidean).with_tol(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    // Orthogonal pairs from the inner-product sampler, then independent
    // random pairs.
    let mut pairs = sample_orthogonal_pairs(&inner, dim, 500, 4.0, 56).unwrap();
    while pairs.len() < 1000 {
        pairs.push((random_in_ball(&mut rng, dim, 4.0), random_in_ball(&mut rng, dim, 4.0)));
    }
    let disagreements = pairs
        .iter()
        .filter(|(x, y)| inner.is_orthogonal(x, y).unwrap() != bj.is_orthogonal(x, y).unwrap())
        .count();
    let agreeing_orthogonal = pairs.iter().filter(|(x, y)| inner.is_orthogonal(x, y).unwrap()).count();

    let linf = OrthoRelation::birkhoff_james(NormSpec::LInf);
    let sym = check_axioms(&linf, 2, 256, 57).unwrap().symmetry;
    let counterexample = match &sym.witness {
        Some(w) => !sym.symmetric && linf.is_orthogonal(&w.x, &w.y).unwrap() != linf.is_orthogonal(&w.y, &w.x).unwrap(),
        None => false,
    };

    let mut worst_thales = 0.0f64;
    for r in [
        OrthoRelation::inner_product(),
        OrthoRelation::birkhoff_james(NormSpec::Euclidean),
        OrthoRelation::birkhoff_james(NormSpec::L1),
        OrthoRelation::birkhoff_james(NormSpec::LInf),
    ] {
        for _ in 0..100 {
            let x = random_in_ball(&mut rng, dim, 4.0);
            let lambda = rng.gen_range(0.0..=10.0);
            let y0 = thalesian_solve(&r, &x, lambda).unwrap();
            let res = r.residual(&x, &y0).unwrap().max(r.residual(&(&x + &y0), &(&x.scale(lambda) - &y0)).unwrap());
            worst_thales = worst_thales.max(res);
        }
    }

    Outcome::new(
        disagreements == 0 && counterexample && worst_thales <= 1e-9,
        format!(
            "{disagreements} disagreements on {} pairs ({agreeing_orthogonal} orthogonal), \
             bj:linf symmetry counterexample {}, worst Thalesian residual {worst_thales:.3e}",
            pairs.len(),
            if counterexample { "found" } else { "missing" }
        ),
    )
}

fn offsets(seed: u64, dim: usize) -> (Point, Point) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ff_ee00);
    let mut draw = || Point::new((0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect());
    (draw(), draw())
}

/// Criteria 6 and 7 also feed criterion 8 with their approximants.
fn criteria_6_7(necessity: &mut Worst) -> (Outcome, Outcome) {
    let mut cauchy = Worst::default();
    let mut stated = (0usize, 0usize);
    let mut quad = Worst::default();
    for &delta in &DELTAS {
        for &seed in &SEEDS {
            let s = setup(3, delta, seed);
            let label = format!("delta={delta:e} seed={seed}");

            let (c1, c2) = offsets(seed, 3);
            let (f, h, k) = compose_cauchy_instance(&s.truth, &c1, &c2);
            let rep = run_cauchy_corollary(&f, &h, &k, &s.relation, &s.grid, &s.pairs, &s.cfg).unwrap();
            let eps = rep.theorem.eps_hat;
            let get = |n: &str| rep.checks.iter().find(|c| c.name == n).unwrap().measured;
            cauchy.bound(&format!("{label} f-T"), get("cauchy_f_T"), coef::CAUCHY_F_T, eps);
            cauchy.bound(&format!("{label} h+k-2T"), get("cauchy_hk_2T"), coef::CAUCHY_HK_2T, eps);
            stated.1 += 1;
            if within(get("cauchy_hk_2T"), coef::CAUCHY_HK_2T_STATED, eps) {
                stated.0 += 1;
            }
            record_necessity(necessity, &format!("cauchy {label}"), &f, &rep.theorem, &s);

            let q = compose_quadratic_instance(&s.truth);
            let rep = run_quadratic_corollary(&q, &s.relation, &s.grid, &s.pairs, &s.cfg, Multipliers::default()).unwrap();
            let eps = rep.theorem.eps_hat;
            let ap = rep.ratz.a.add(&rep.ratz.p);
            quad.bound(&format!("{label} Q-A-P"), dist(&q, &ap, &s.grid), coef::DEV_F_T, eps);
            quad.bound(&format!("{label} sup A"), sup_norm(&rep.ratz.a, &s.grid).unwrap(), coef::QUADRATIC_ODD, eps);
            let p_err = dist(&rep.ratz.p, &s.truth.quadratic(), &s.grid);
            let allowed = coef::DEV_FE_S * eps + delta;
            quad.check(|| format!("{label} P vs generator"), p_err, allowed, p_err <= allowed * (1.0 + 1e-9));
            record_necessity(necessity, &format!("quadratic {label}"), &q, &rep.theorem, &s);
        }
    }
    let mut c = cauchy.outcome("Cauchy");
    c.detail += &format!("; informational 16 eps held on {}/{} runs", stated.0, stated.1);
    (c, quad.outcome("quadratic"))
}

fn record_necessity(w: &mut Worst, label: &str, f: &MapHandle, rep: &StabilityReport, s: &Setup) {
    let tol = pipeline_identity_tol(rep, &s.grid, &s.cfg).unwrap();
    let n = necessity_check(f, &rep.maps.t, &s.grid, tol, s.cfg.slack).unwrap();
    let allowed = coef::NECESSITY * n.sup_fe_te + 1e-9;
    w.check(|| label.to_string(), n.measured, allowed, n.measured <= allowed);
}

fn criterion_9(exact: &[PipelineRun]) -> Outcome {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut bad = Vec::new();
    for run in exact {
        let d = ratz_decompose(&run.report.maps.t, &run.setup.pairs, &run.setup.grid).unwrap();
        worst.0 = worst.0.max(d.additive_defect);
        worst.1 = worst.1.max(d.quadratic_defect);
        worst.2 = worst.2.max(d.recomposition);
        if d.additive_defect > 1e-9 || d.quadratic_defect > 1e-9 || d.recomposition > 1e-12 {
            bad.push(run.label.clone());
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!(
            "{} exact runs, additive {:.3e}, quadratic {:.3e}, recomposition {:.3e}{}",
            exact.len(),
            worst.0,
            worst.1,
            worst.2,
            if bad.is_empty() { String::new() } else { format!("; failing: {}", bad.join(", ")) }
        ),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("run{i}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_orthostab"))
            .args(["report", "--relation", "inner", "--dim", "3", "--delta", "0.01", "--json"])
            .arg(&path)
            .output()
            .unwrap()
            .status;
        outputs.push((status.code(), std::fs::read(&path).unwrap_or_default()));
    }
    let same = outputs[0].1 == outputs[1].1 && !outputs[0].1.is_empty();
    Outcome::new(
        same && outputs[0].0 == Some(0),
        format!("{} bytes, identical: {same}, exit {:?}", outputs[0].1.len(), outputs[0].0),
    )
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; listing
    // requests get an empty answer.
    if std::env::args().any(|a| a == "--list") {
        return;
    }

    let exact: Vec<PipelineRun> =
        SEEDS.iter().flat_map(|&seed| [2, 3, 5].map(|dim| pipeline_run(dim, 0.0, seed))).collect();
    let start = Instant::now();
    let noisy: Vec<PipelineRun> =
        DELTAS.iter().flat_map(|&delta| SEEDS.map(|seed| pipeline_run(3, delta, seed))).collect();
    let noisy_time = start.elapsed();

    let mut necessity = Worst::default();
    for run in exact.iter().chain(&noisy) {
        record_necessity(&mut necessity, &run.label, &run.f, &run.report, &run.setup);
    }
    let (c6, c7) = criteria_6_7(&mut necessity);

    let results = [
        ("exactness at zero noise", criterion_1(&exact)),
        ("theorem statement constants", criterion_2(&noisy, noisy_time)),
        ("intermediate proof constants", criterion_3(&noisy)),
        ("fixed-point alternative", criterion_4(&noisy)),
        ("orthogonality geometry", criterion_5()),
        ("Cauchy corollary", c6),
        ("quadratic corollary", c7),
        ("necessity", necessity.outcome("necessity")),
        ("Ratz decomposition", criterion_9(&exact)),
        ("determinism", criterion_10()),
    ];

    let mut failed = 0;
    println!();
    for (i, (name, out)) in results.iter().enumerate() {
        println!("criterion {:>2} {:<30} {}  {}", i + 1, name, if out.ok { "PASS" } else { "FAIL" }, out.detail);
        failed += usize::from(!out.ok);
    }
    println!("\nacceptance: {}/{} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
