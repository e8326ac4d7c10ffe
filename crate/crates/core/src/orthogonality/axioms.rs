//! Sampled verification of the orthogonality-space axioms.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sampling::{random_in_ball, sample_orthogonal_pairs};
use super::thales::thalesian_solve_in_plane;
use super::OrthoRelation;
use crate::error::OrthoError;
use crate::point::Point;

/// Scalars per pair used for the homogeneity check.
const SCALARS_PER_PAIR: usize = 20;
const INDEPENDENCE_TOL: f64 = 1e-9;
const SAMPLE_RADIUS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub index: usize,
    pub x: Point,
    pub y: Point,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomVerdict {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<Witness>,
}

impl AxiomVerdict {
    fn new(name: &'static str) -> Self {
        AxiomVerdict { name, passed: true, checked: 0, witness: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.checked += 1;
        if !ok && self.passed {
            self.passed = false;
            self.witness = Some(witness());
        }
    }
}

/// Symmetry is a property, not an axiom: it is observed rather than judged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryObservation {
    pub symmetric: bool,
    pub checked: usize,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub relation: String,
    pub dim: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub o1: AxiomVerdict,
    pub o2: AxiomVerdict,
    pub o3: AxiomVerdict,
    pub o4: AxiomVerdict,
    pub symmetry: SymmetryObservation,
}

impl AxiomReport {
    /// (O1)–(O4) all held on the sample.
    pub fn axioms_hold(&self) -> bool {
        [&self.o1, &self.o2, &self.o3, &self.o4].iter().all(|v| v.passed)
    }

    pub fn verdicts(&self) -> [&AxiomVerdict; 4] {
        [&self.o1, &self.o2, &self.o3, &self.o4]
    }
}

fn witness(index: usize, x: &Point, y: &Point, detail: impl Into<String>) -> Witness {
    Witness { index, x: x.clone(), y: y.clone(), detail: detail.into() }
}

/// Checks (O1)–(O4) and symmetry on `n_samples` seeded samples.
///
/// Failures become report entries carrying the first failing sample; the only
/// errors are invalid arguments.
pub fn check_axioms(r: &OrthoRelation, dim: usize, n_samples: usize, seed: u64) -> Result<AxiomReport, OrthoError> {
    if n_samples == 0 {
        return Err(OrthoError::InvalidArgument("n_samples must be at least 1".into()));
    }
    if dim < 2 {
        return Err(OrthoError::DimensionTooSmall(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = Point::zeros(dim);

    let mut o1 = AxiomVerdict::new("O1");
    o1.record(r.is_orthogonal(&zero, &zero)?, || witness(0, &zero, &zero, "0 ⊥ 0 failed"));
    for i in 0..n_samples {
        let x = random_in_ball(&mut rng, dim, SAMPLE_RADIUS);
        let ok = r.is_orthogonal(&x, &zero)? && r.is_orthogonal(&zero, &x)?;
        o1.record(ok, || witness(i, &x, &zero, "x ⊥ 0 or 0 ⊥ x failed"));
    }

    let pair_seed = rng.gen::<u64>();
    let pairs = sample_orthogonal_pairs(r, dim, n_samples + 2, SAMPLE_RADIUS, pair_seed)?;

    let mut o2 = AxiomVerdict::new("O2");
    for (i, (x, y)) in pairs.iter().enumerate() {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let sine = x.max_minor(y) / (x.norm2() * y.norm2());
        o2.record(sine > INDEPENDENCE_TOL, || witness(i, x, y, format!("orthogonal but dependent, sine {sine:e}")));
        // a nonzero multiple of x must never be orthogonal to x
        let c = rng.gen_range(0.5..2.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let cx = x.scale(c);
        o2.record(!r.is_orthogonal(x, &cx)?, || witness(i, x, &cx, "x ⊥ cx for nonzero c"));
    }

    let mut o3 = AxiomVerdict::new("O3");
    for (i, (x, y)) in pairs.iter().enumerate() {
        for j in 0..SCALARS_PER_PAIR {
            let (alpha, beta) = match j {
                0 => (0.0, rng.gen_range(-3.0..3.0)),
                1 => (rng.gen_range(-3.0..3.0), 0.0),
                2 => (-1.0, -1.0),
                3 => (-rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0)),
                _ => (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
            };
            let (ax, by) = (x.scale(alpha), y.scale(beta));
            o3.record(r.is_orthogonal(&ax, &by)?, || {
                witness(i, x, y, format!("αx ⊥ βy failed for α={alpha}, β={beta}"))
            });
        }
    }

    let mut o4 = AxiomVerdict::new("O4");
    for i in 0..n_samples {
        let x = random_in_ball(&mut rng, dim, SAMPLE_RADIUS);
        let u = random_in_ball(&mut rng, dim, SAMPLE_RADIUS);
        let lambda = rng.gen_range(0.0..10.0);
        let outcome = thalesian_solve_in_plane(r, &x, &u, lambda);
        match outcome {
            Ok(y0) => {
                let ok = r.is_orthogonal(&x, &y0)?
                    && r.is_orthogonal(&(&x + &y0), &x.scale(lambda).axpy(-1.0, &y0))?;
                o4.record(ok, || witness(i, &x, &y0, format!("predicates fail for λ={lambda}")));
            }
            // degenerate plane draws are skipped, not counted
            Err(OrthoError::InvalidArgument(_)) | Err(OrthoError::ZeroVector) => {}
            Err(e) => o4.record(false, || witness(i, &x, &u, e.to_string())),
        }
    }

    let mut symmetry = SymmetryObservation { symmetric: true, checked: 0, witness: None };
    for (i, (x, y)) in pairs.iter().enumerate() {
        symmetry.checked += 1;
        if !r.is_orthogonal(y, x)? && symmetry.symmetric {
            symmetry.symmetric = false;
            symmetry.witness = Some(witness(i, x, y, "x ⊥ y but not y ⊥ x"));
        }
    }

    Ok(AxiomReport { relation: r.to_string(), dim, n_samples, seed, o1, o2, o3, o4, symmetry })
}
