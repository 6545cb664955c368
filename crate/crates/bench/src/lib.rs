//! Shared fixtures for the criterion benches.

use hessext_core::{InstantonSpec, Params, RadialFunction, RadialGrid};
use std::sync::Arc;

pub fn reference_params() -> Params {
    Params::new(5, 1, 1.0).expect("valid triple")
}

pub fn bench_grid(n: usize) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::graded(n, 3.0).expect("valid grid"))
}

pub fn bench_profile(grid: &Arc<RadialGrid>, p: &Params) -> RadialFunction {
    let spec = InstantonSpec::new(1e-2, p).expect("valid spec");
    hessext_core::instanton::w_eps_profile(Arc::clone(grid), &spec, p).expect("valid profile")
}
