//! Command-line front end: axiom checks, defect measurement, extraction,
//! the main pipeline and its corollaries, with JSON and CSV reports.

mod output;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use output::{to_json, write_csv, BoundEntry, ResidualRow};

use crate::error::{PerturbError, StabilityError};
use crate::fixedpoint::{iterate, orbit_gap, IterationConfig, ScalingOperator, Verdict, DEFAULT_CAP};
use crate::funcspace::{even_part, odd_part, shift_to_zero, sup_distance, MapHandle, SampleGrid};
use crate::orthogonality::{check_axioms, sample_orthogonal_pairs, AxiomReport, OrthoPair, OrthoRelation, SymmetryObservation, Witness};
use crate::perturb::{add_cubic, compose_cauchy_instance, compose_pexider_instance, compose_quadratic_instance, GroundTruth};
use crate::point::Point;
use crate::stability::{
    axis_pairs, measure_defects, necessity_check, pipeline_identity_tol, ratz_decompose, run_cauchy_corollary,
    run_main_theorem, run_quadratic_corollary, symmetrize_relation, AdditivityReport, Approximants, BoundCheck,
    DefectReport, ExtractionSummary, Multipliers, NecessityReport, PipelineConfig, RatzDecomposition, Slack,
    StabilityReport, StructureReport,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

const GRID_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
const OFFSET_SALT: u64 = 0xc2b2_ae3d_27d4_eb4f;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Check (O1)-(O4) and symmetry of the relation on samples.
    Axioms,
    /// Measure the Pexider and doubling defects of a synthetic instance.
    Defect,
    /// Run the odd and even contractions on f and report convergence.
    Extract,
    /// Pexiderized Cauchy equation (g = 0).
    Cauchy,
    /// Orthogonally quadratic Q = P + even noise.
    Quadratic,
    /// Full pipeline with every bound, necessity and decomposition.
    Report,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "orthostab", version, about = "Orthogonal stability laboratory for the Pexiderized quadratic equation")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// trivial | inner | bj:l1 | bj:l2 | bj:linf
    #[arg(long, default_value = "inner", value_parser = parse_relation)]
    pub relation: OrthoRelation,
    #[arg(long, default_value_t = 3, value_parser = parse_dim)]
    pub dim: usize,
    /// Grid points (axioms: samples per axiom).
    #[arg(long, default_value_t = 256, value_parser = parse_count)]
    pub samples: usize,
    #[arg(long, default_value_t = 512, value_parser = parse_count)]
    pub pairs: usize,
    #[arg(long, default_value_t = 8.0, value_parser = parse_positive)]
    pub radius: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse_nonnegative)]
    pub delta: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10, value_parser = parse_positive)]
    pub tol: f64,
    #[arg(long = "n-max", default_value_t = 40, value_parser = parse_count)]
    pub n_max: usize,
    /// Write the JSON report to a file, or `-` for stdout.
    #[arg(long)]
    pub json: Option<String>,
    /// Write per-point residuals as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Coefficient of a cubic term `|x|^3 u` added to f (or Q).
    #[arg(long, default_value_t = 0.0, value_parser = parse_finite)]
    pub cubic: f64,
    /// Ground truth as JSON (`a_matrix`, `b_forms`, `delta`, `seeds`)
    /// instead of a random one; its `delta` replaces `--delta`.
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

fn parse_relation(s: &str) -> Result<OrthoRelation, String> {
    s.parse().map_err(|e: crate::error::OrthoError| e.to_string())
}

fn parse_dim(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 2 {
        return Err(format!("dimension must be at least 2, got {n}"));
    }
    Ok(n)
}

fn parse_count(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n == 0 {
        return Err("must be at least 1".into());
    }
    Ok(n)
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !v.is_finite() {
        return Err(format!("must be finite, got {s}"));
    }
    Ok(v)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v <= 0.0 {
        return Err(format!("must be positive, got {s}"));
    }
    Ok(v)
}

fn parse_nonnegative(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v < 0.0 {
        return Err(format!("must be nonnegative, got {s}"));
    }
    Ok(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub command: Command,
    pub relation: String,
    /// The relation the pipeline ran with (symmetrized when needed).
    pub relation_used: String,
    pub dim: usize,
    pub samples: usize,
    pub pairs: usize,
    pub radius: f64,
    pub delta: f64,
    pub seed: u64,
    pub tol: f64,
    pub n_max: usize,
    pub cubic: f64,
    pub instance: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fingerprint {
    pub map: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomEntry {
    pub name: &'static str,
    pub checked: usize,
    pub verdict: &'static str,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InformationalEntry {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtractDetail {
    pub extraction: ExtractionSummary,
    /// `d(phi, J phi)` on the dyadic closure used for the a-priori bound.
    pub orbit_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineDetails {
    pub eps_hat: f64,
    pub extractions: Vec<ExtractionSummary>,
    pub additivity: AdditivityReport,
    pub structure: StructureReport,
    pub thalesian_skipped: usize,
    pub necessity: Option<NecessityReport>,
    pub ratz: Option<RatzDecomposition>,
    /// `sup |Q(2x) - 4Q(x)|` for the quadratic command.
    pub doubling: Option<f64>,
}

impl PipelineDetails {
    fn from_report(rep: &StabilityReport) -> Self {
        PipelineDetails {
            eps_hat: rep.eps_hat,
            extractions: rep.extractions.clone(),
            additivity: rep.additivity.clone(),
            structure: rep.structure.clone(),
            thalesian_skipped: rep.thalesian_skipped,
            necessity: None,
            ratz: None,
            doubling: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Details {
    Axioms { symmetry: SymmetryObservation },
    Extract { extractions: Vec<ExtractDetail> },
    Pipeline(Box<PipelineDetails>),
}

/// The JSON document written by every command.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub status: &'static str,
    pub exit_code: i32,
    pub defects: Option<DefectReport>,
    pub axioms: Vec<AxiomEntry>,
    pub bounds: Vec<BoundEntry>,
    pub informational: Vec<InformationalEntry>,
    pub fingerprints: Vec<Fingerprint>,
    pub details: Option<Details>,
    pub error: Option<String>,
}

/// A finished run: the report plus the CSV rows it refers to.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub rows: Vec<ResidualRow>,
}

#[derive(Debug)]
enum RunError {
    Input(String),
    Diverged(String),
}

impl From<StabilityError> for RunError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Diverged { .. } => RunError::Diverged(e.to_string()),
            other => RunError::Input(other.to_string()),
        }
    }
}

macro_rules! input_err {
    ($($t:ty),*) => {$(
        impl From<$t> for RunError {
            fn from(e: $t) -> Self {
                RunError::Input(e.to_string())
            }
        }
    )*};
}

input_err!(PerturbError, crate::error::OrthoError, crate::error::EvalError, crate::error::FixedPointError);

#[derive(Default)]
struct Partial {
    defects: Option<DefectReport>,
    axioms: Vec<AxiomEntry>,
    checks: Vec<BoundCheck>,
    fingerprints: Vec<Fingerprint>,
    details: Option<Details>,
    rows: Vec<ResidualRow>,
    /// Set by `extract` when an iteration diverged without erroring.
    diverged: bool,
}

struct Setup {
    truth: GroundTruth,
    relation: OrthoRelation,
    grid: SampleGrid,
    pairs: Vec<OrthoPair>,
    pipeline: PipelineConfig,
}

fn load_truth(cfg: &RunConfig) -> Result<GroundTruth, RunError> {
    match &cfg.instance {
        None => Ok(GroundTruth::random(cfg.dim, cfg.dim, cfg.delta, cfg.seed)?),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| RunError::Input(format!("{}: {e}", path.display())))?;
            let gt: GroundTruth =
                serde_json::from_str(&text).map_err(|e| RunError::Input(format!("{}: {e}", path.display())))?;
            gt.validate()?;
            if gt.source_dim() != cfg.dim {
                return Err(RunError::Input(format!(
                    "instance has source dimension {}, but --dim is {}",
                    gt.source_dim(),
                    cfg.dim
                )));
            }
            Ok(gt)
        }
    }
}

fn relation_used(cfg: &RunConfig) -> OrthoRelation {
    match cfg.command {
        Command::Axioms => cfg.relation.clone(),
        _ if cfg.relation.is_symmetric_by_construction() => cfg.relation.clone(),
        _ => symmetrize_relation(&cfg.relation),
    }
}

fn setup(cfg: &RunConfig) -> Result<Setup, RunError> {
    let truth = load_truth(cfg)?;
    let relation = relation_used(cfg);
    let grid = SampleGrid::stratified(cfg.dim, cfg.samples, cfg.radius, cfg.seed ^ GRID_SALT);
    let pairs = sample_orthogonal_pairs(&relation, cfg.dim, cfg.pairs, cfg.radius, cfg.seed.wrapping_add(1))?;
    let pipeline = PipelineConfig {
        iteration: IterationConfig { tol: cfg.tol, n_max: cfg.n_max, cap: DEFAULT_CAP },
        slack: Slack::default(),
        fresh_pairs: cfg.pairs,
        fresh_seed: cfg.seed.wrapping_add(2),
    };
    Ok(Setup { truth, relation, grid, pairs, pipeline })
}

fn with_cubic(phi: &MapHandle, coef: f64) -> MapHandle {
    if coef == 0.0 {
        phi.clone()
    } else {
        add_cubic(phi, coef)
    }
}

fn fingerprints(maps: &Approximants, grid: &SampleGrid) -> Result<Vec<Fingerprint>, RunError> {
    let named = [
        ("R", &maps.r),
        ("R'", &maps.r_prime),
        ("S", &maps.s),
        ("S'", &maps.s_prime),
        ("T", &maps.t),
        ("T'", &maps.t_prime),
        ("T''", &maps.t_dprime),
    ];
    named
        .iter()
        .map(|(name, m)| Ok(Fingerprint { map: name.to_string(), sha256: m.fingerprint(grid)? }))
        .collect()
}

fn pointwise(
    grid: &SampleGrid,
    residuals: &[(&'static str, &MapHandle, &MapHandle)],
) -> Result<Vec<ResidualRow>, RunError> {
    let mut rows = Vec::new();
    for x in grid.points() {
        for (name, a, b) in residuals {
            let value = (&a.eval(x)? - &b.eval(x)?).norm2();
            rows.push(ResidualRow { point: x.clone(), residual: name, value });
        }
    }
    Ok(rows)
}

fn run_axioms(cfg: &RunConfig) -> Result<Partial, RunError> {
    let rep: AxiomReport = check_axioms(&cfg.relation, cfg.dim, cfg.samples, cfg.seed)?;
    let axioms = rep
        .verdicts()
        .iter()
        .map(|v| AxiomEntry {
            name: v.name,
            checked: v.checked,
            verdict: if v.passed { "pass" } else { "fail" },
            witness: v.witness.clone(),
        })
        .collect();
    Ok(Partial { axioms, details: Some(Details::Axioms { symmetry: rep.symmetry }), ..Partial::default() })
}

fn run_defect(cfg: &RunConfig) -> Result<Partial, RunError> {
    let s = setup(cfg)?;
    let inst = compose_pexider_instance(&s.truth);
    let f = with_cubic(&inst.f, cfg.cubic);
    let mut all = s.pairs.clone();
    all.extend(axis_pairs(&s.grid));
    let defects = measure_defects([&f, &inst.g, &inst.h, &inst.k], &all, &s.grid)?;
    let delta = s.truth.delta;
    let checks = vec![
        BoundCheck::new("pexider_envelope", defects.eps_pexider, 4.0, delta, s.pipeline.slack),
        BoundCheck::new("even_doubling_envelope", defects.eps_even_doubling, 10.0, delta, s.pipeline.slack),
    ];
    let mut rows = Vec::new();
    for x in s.grid.points() {
        let x2 = x.scale(2.0);
        let (a, b) = (f.eval(&x2)?, f.eval(&-&x2)?);
        let four = (&f.eval(x)? + &f.eval(&-x)?).scale(4.0);
        rows.push(ResidualRow { point: x.clone(), residual: "even_doubling", value: (&(&a + &b) - &four).norm2() });
        rows.push(ResidualRow { point: x.clone(), residual: "literal_doubling", value: (&(&a - &b) - &four).norm2() });
    }
    Ok(Partial { defects: Some(defects), checks, rows, ..Partial::default() })
}

fn run_extract(cfg: &RunConfig) -> Result<Partial, RunError> {
    let s = setup(cfg)?;
    let inst = compose_pexider_instance(&s.truth);
    let f = shift_to_zero(&with_cubic(&inst.f, cfg.cubic));
    let stages = [("R", ScalingOperator::half(), odd_part(&f)), ("S", ScalingOperator::quarter(), even_part(&f))];
    let slack = Slack { rel: crate::stability::DEFAULT_REL_SLACK, abs: cfg.tol };
    let mut out = Partial::default();
    let mut details = Vec::new();
    for (name, op, phi) in &stages {
        let res = iterate(op, phi, &s.grid, &s.pipeline.iteration)?;
        let summary = ExtractionSummary {
            stage: phi.label().to_string(),
            lambda: res.lambda,
            verdict: res.verdict,
            n_star: res.n_star,
            final_step: res.final_step(),
            per_step_distances: res.per_step_distances.clone(),
            grid_step_distances: res.grid_step_distances.clone(),
        };
        if res.verdict == Verdict::Diverged {
            out.diverged = true;
            details.push(ExtractDetail { extraction: summary, orbit_gap: None });
            continue;
        }
        let gap = orbit_gap(phi, op, &s.grid, res.n_star.max(1), f64::INFINITY)?.value();
        let dev = sup_distance(phi, &res.limit, &s.grid, f64::INFINITY)?.value();
        out.checks.push(BoundCheck::new(format!("apriori_{name}"), dev, 1.0 / (1.0 - op.lambda()), gap, slack));
        out.fingerprints.push(Fingerprint { map: name.to_string(), sha256: res.limit.fingerprint(&s.grid)? });
        out.rows.extend(pointwise(&s.grid, &[(if *name == "R" { "dev_Fo_R" } else { "dev_Fe_S" }, phi, &res.limit)])?);
        details.push(ExtractDetail { extraction: summary, orbit_gap: Some(gap) });
    }
    out.details = Some(Details::Extract { extractions: details });
    Ok(out)
}

fn run_report(cfg: &RunConfig) -> Result<Partial, RunError> {
    let s = setup(cfg)?;
    let inst = compose_pexider_instance(&s.truth);
    let f = with_cubic(&inst.f, cfg.cubic);
    let rep = run_main_theorem(&f, &inst.g, &inst.h, &inst.k, &s.relation, &s.grid, &s.pairs, &s.pipeline)?;
    let tol = pipeline_identity_tol(&rep, &s.grid, &s.pipeline)?;
    let necessity = necessity_check(&f, &rep.maps.t, &s.grid, tol, s.pipeline.slack)?;
    let ratz = ratz_decompose(&rep.maps.t, &s.pairs, &s.grid)?;

    let m = &rep.maps;
    let (fn_, gn) = (shift_to_zero(&f), shift_to_zero(&inst.g));
    let hk = shift_to_zero(&inst.h.add(&inst.k));
    let rows = pointwise(&s.grid, &[("dev_f_T", &fn_, &m.t), ("dev_g_T'", &gn, &m.t_prime), ("dev_hk_T''", &hk, &m.t_dprime)])?;

    let mut checks = rep.checks.clone();
    checks.push(necessity.check.clone());
    let mut details = PipelineDetails::from_report(&rep);
    details.necessity = Some(necessity);
    details.ratz = Some(ratz);
    Ok(Partial {
        defects: Some(rep.defects.clone()),
        checks,
        fingerprints: fingerprints(m, &s.grid)?,
        details: Some(Details::Pipeline(Box::new(details))),
        rows,
        ..Partial::default()
    })
}

fn run_cauchy(cfg: &RunConfig) -> Result<Partial, RunError> {
    let s = setup(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ OFFSET_SALT);
    let m = s.truth.target_dim();
    let mut offset = || Point::new((0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect());
    let (c1, c2) = (offset(), offset());
    let (f, h, k) = compose_cauchy_instance(&s.truth, &c1, &c2);
    let f = with_cubic(&f, cfg.cubic);
    let rep = run_cauchy_corollary(&f, &h, &k, &s.relation, &s.grid, &s.pairs, &s.pipeline)?;

    let maps = &rep.theorem.maps;
    let two_t = maps.t.scale(2.0);
    let (fn_, hk) = (shift_to_zero(&f), shift_to_zero(&h.add(&k)));
    let rows = pointwise(&s.grid, &[("cauchy_f_T", &fn_, &maps.t), ("cauchy_hk_2T", &hk, &two_t)])?;

    let mut checks = rep.checks.clone();
    checks.extend(rep.theorem.checks.iter().cloned());
    Ok(Partial {
        defects: Some(rep.theorem.defects.clone()),
        checks,
        fingerprints: fingerprints(maps, &s.grid)?,
        details: Some(Details::Pipeline(Box::new(PipelineDetails::from_report(&rep.theorem)))),
        rows,
        ..Partial::default()
    })
}

fn run_quadratic(cfg: &RunConfig) -> Result<Partial, RunError> {
    let s = setup(cfg)?;
    let q = with_cubic(&compose_quadratic_instance(&s.truth), cfg.cubic);
    let rep = run_quadratic_corollary(&q, &s.relation, &s.grid, &s.pairs, &s.pipeline, Multipliers::default())?;
    let ap = rep.ratz.a.add(&rep.ratz.p);
    let rows = pointwise(&s.grid, &[("dev_Q_AP", &q, &ap)])?;

    let mut checks = rep.checks.clone();
    checks.push(rep.necessity.check.clone());
    checks.extend(rep.theorem.checks.iter().cloned());
    let mut details = PipelineDetails::from_report(&rep.theorem);
    details.necessity = Some(rep.necessity.clone());
    details.ratz = Some(rep.ratz.clone());
    details.doubling = Some(rep.doubling);
    Ok(Partial {
        defects: Some(rep.theorem.defects.clone()),
        checks,
        fingerprints: fingerprints(&rep.theorem.maps, &s.grid)?,
        details: Some(Details::Pipeline(Box::new(details))),
        rows,
        ..Partial::default()
    })
}

fn echo(cfg: &RunConfig) -> ConfigEcho {
    ConfigEcho {
        command: cfg.command,
        relation: cfg.relation.to_string(),
        relation_used: relation_used(cfg).to_string(),
        dim: cfg.dim,
        samples: cfg.samples,
        pairs: cfg.pairs,
        radius: cfg.radius,
        delta: cfg.delta,
        seed: cfg.seed,
        tol: cfg.tol,
        n_max: cfg.n_max,
        cubic: cfg.cubic,
        instance: cfg.instance.as_ref().map(|p| p.display().to_string()),
    }
}

/// Runs the configured command without touching the filesystem beyond
/// reading `--instance`.
pub fn evaluate(cfg: &RunConfig) -> Outcome {
    let result = match cfg.command {
        Command::Axioms => run_axioms(cfg),
        Command::Defect => run_defect(cfg),
        Command::Extract => run_extract(cfg),
        Command::Cauchy => run_cauchy(cfg),
        Command::Quadratic => run_quadratic(cfg),
        Command::Report => run_report(cfg),
    };
    let mut report = Report {
        config: echo(cfg),
        status: "pass",
        exit_code: EXIT_PASS,
        defects: None,
        axioms: Vec::new(),
        bounds: Vec::new(),
        informational: Vec::new(),
        fingerprints: Vec::new(),
        details: None,
        error: None,
    };
    let rows = match result {
        Ok(p) => {
            let failed = p.axioms.iter().any(|a| a.verdict == "fail")
                || p.checks.iter().any(|c| !c.informational && !c.pass);
            (report.status, report.exit_code) = if p.diverged {
                ("diverged", EXIT_DIVERGED)
            } else if failed {
                ("fail", EXIT_FAIL)
            } else {
                ("pass", EXIT_PASS)
            };
            report.defects = p.defects;
            report.axioms = p.axioms;
            for c in &p.checks {
                if c.informational {
                    report.informational.push(InformationalEntry {
                        name: c.name.clone(),
                        measured: c.measured,
                        bound: c.bound,
                        holds: c.pass,
                    });
                } else {
                    report.bounds.push(BoundEntry::from(c));
                }
            }
            report.fingerprints = p.fingerprints;
            report.details = p.details;
            p.rows
        }
        Err(e) => {
            let (status, code, msg) = match e {
                RunError::Input(m) => ("error", EXIT_INPUT, m),
                RunError::Diverged(m) => ("diverged", EXIT_DIVERGED, m),
            };
            report.status = status;
            report.exit_code = code;
            report.error = Some(msg);
            Vec::new()
        }
    };
    Outcome { report, rows }
}

fn summary(report: &Report) -> String {
    let mut s = format!("{} [{}]: {}\n", report.config.command_name(), report.config.relation_used, report.status);
    if let Some(d) = &report.defects {
        s += &format!("  eps_hat {:.6e}  even doubling {:.6e}  literal {:.6e}\n", d.eps_pexider, d.eps_even_doubling, d.eps_literal);
    }
    for a in &report.axioms {
        s += &format!("  {:<24} checked {:>6}  {}\n", a.name, a.checked, a.verdict);
    }
    for b in &report.bounds {
        s += &format!(
            "  {:<24} measured {:.6e}  bound {:.6e}  ratio {:.3e}  {}\n",
            b.name, b.measured, b.bound, b.ratio, b.verdict
        );
    }
    for i in &report.informational {
        s += &format!(
            "  {:<24} measured {:.6e}  bound {:.6e}  (informational: {})\n",
            i.name,
            i.measured,
            i.bound,
            if i.holds { "holds" } else { "does not hold" }
        );
    }
    if let Some(e) = &report.error {
        s += &format!("  error: {e}\n");
    }
    s
}

impl ConfigEcho {
    fn command_name(&self) -> &'static str {
        match self.command {
            Command::Axioms => "axioms",
            Command::Defect => "defect",
            Command::Extract => "extract",
            Command::Cauchy => "cauchy",
            Command::Quadratic => "quadratic",
            Command::Report => "report",
        }
    }
}

/// Runs a parsed configuration, writes the requested outputs and returns the
/// process exit code.
pub fn execute(cfg: &RunConfig) -> i32 {
    let outcome = evaluate(cfg);
    let report = &outcome.report;
    let text = summary(report);
    let mut code = report.exit_code;
    match cfg.json.as_deref() {
        Some("-") => {
            let mut out = io::stdout().lock();
            if out.write_all(to_json(report).as_bytes()).is_err() {
                code = EXIT_INPUT;
            }
            eprint!("{text}");
        }
        Some(path) => {
            if let Err(e) = fs::write(path, to_json(report)) {
                eprintln!("cannot write {path}: {e}");
                code = EXIT_INPUT;
            }
            print!("{text}");
        }
        None => print!("{text}"),
    }
    if let Some(path) = &cfg.csv {
        let written = fs::File::create(path)
            .map_err(csv::Error::from)
            .and_then(|f| write_csv(io::BufWriter::new(f), cfg.dim, &outcome.rows));
        if let Err(e) = written {
            eprintln!("cannot write {}: {e}", path.display());
            code = EXIT_INPUT;
        }
    }
    code
}

/// Parses `args` (program name first) and runs; usage errors exit with 2.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => execute(&cfg),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            }
        }
    }
}
