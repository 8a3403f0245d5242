#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use slabmom_core::reference_sn::{DEFAULT_ORDINATES, DEFAULT_REFINEMENT};
use slabmom_core::{
    error_norms, simulate, Model, ModelKind, ProblemSpec, ReferenceCache, ReferenceProfile,
    SolverConfig,
};

#[path = "../common/mod.rs"]
mod shared;
pub use shared::{diff_norm, random_moments};

fn cache() -> &'static ReferenceCache {
    static CACHE: OnceLock<ReferenceCache> = OnceLock::new();
    CACHE.get_or_init(|| {
        let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("sn-reference");
        ReferenceCache::new(dir)
    })
}

/// S_N reference for a model grid of `cells` cells (M = 256, 8x refinement).
pub fn reference(problem: &ProblemSpec, cells: usize) -> ReferenceProfile {
    cache()
        .load_or_compute(problem, DEFAULT_ORDINATES, DEFAULT_REFINEMENT * cells, problem.t_end, true)
        .expect("reference solve")
}

pub fn model(problem: &ProblemSpec, kind: ModelKind, n: usize) -> Model {
    let full = matches!(kind, ModelKind::Mn | ModelKind::Pn);
    Model::new(kind, n, problem.default_quad_order(full, n)).expect("model")
}

/// Plain L1 error of a model run against the reference.
pub fn l1_error(problem: &ProblemSpec, model: Model, cells: usize, cfg: SolverConfig) -> f64 {
    let out = simulate(problem, model, cells, problem.t_end, cfg).expect("simulation");
    let reference = reference(problem, cells);
    error_norms(&out.densities, &reference.rho, problem.z_right - problem.z_left)
        .expect("norms")
        .0
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
