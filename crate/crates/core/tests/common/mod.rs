#![allow(dead_code)]

use orthostab::fixedpoint::IterationConfig;
use orthostab::funcspace::{sup_distance, MapHandle, SampleGrid};
use orthostab::orthogonality::{sample_orthogonal_pairs, OrthoPair, OrthoRelation};
use orthostab::perturb::GroundTruth;
use orthostab::stability::PipelineConfig;

pub const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
pub const DELTAS: [f64; 3] = [1e-3, 1e-2, 1e-1];

/// Everything a pipeline run needs apart from the maps.
pub struct Setup {
    pub truth: GroundTruth,
    pub relation: OrthoRelation,
    pub grid: SampleGrid,
    pub pairs: Vec<OrthoPair>,
    pub cfg: PipelineConfig,
}

/// The CLI defaults: 256 grid points and 512 pairs in the ball of radius 8.
pub fn setup(dim: usize, delta: f64, seed: u64) -> Setup {
    setup_sized(dim, delta, seed, 256, 512)
}

pub fn setup_sized(dim: usize, delta: f64, seed: u64, samples: usize, pairs: usize) -> Setup {
    let relation = OrthoRelation::inner_product();
    let truth = GroundTruth::random(dim, dim, delta, seed).unwrap();
    let grid = SampleGrid::stratified(dim, samples, 8.0, seed.wrapping_mul(31).wrapping_add(7));
    let pairs = sample_orthogonal_pairs(&relation, dim, pairs, 8.0, seed.wrapping_add(1000)).unwrap();
    let cfg = PipelineConfig {
        iteration: IterationConfig::default(),
        fresh_seed: seed.wrapping_add(2000),
        ..PipelineConfig::default()
    };
    Setup { truth, relation, grid, pairs, cfg }
}

pub fn dist(a: &MapHandle, b: &MapHandle, grid: &SampleGrid) -> f64 {
    sup_distance(a, b, grid, f64::INFINITY).unwrap().value()
}

/// `measured <= coefficient * reference` up to the relative slack `1e-9`.
pub fn within(measured: f64, coefficient: f64, reference: f64) -> bool {
    measured <= coefficient * reference * (1.0 + 1e-9)
}
