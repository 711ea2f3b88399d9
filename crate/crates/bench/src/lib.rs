//! Reference configurations shared by the benchmarks.

use workbench_core::{c64, BoundaryParams, ModelParams, SpinLabel};

/// η = 1, p = 0.8, q = 1.2, ξ = 0.6, ς = 0 with the given spin and θ.
pub fn params(twice_s: u32, theta: &[f64]) -> ModelParams {
    ModelParams::new(
        SpinLabel::from_twice(twice_s).expect("supported spin"),
        c64::new(1.0, 0.0),
        BoundaryParams::new(c64::new(0.8, 0.0), c64::new(0.0, 0.0), c64::new(1.2, 0.0), c64::new(0.6, 0.0)),
        theta.iter().map(|&t| c64::new(t, 0.0)).collect(),
    )
    .expect("valid parameters")
}

pub fn config_a() -> ModelParams {
    params(1, &[0.31, -0.17, 0.23])
}

pub fn config_b() -> ModelParams {
    params(2, &[0.31, -0.17])
}

pub fn config_c() -> ModelParams {
    params(3, &[0.31])
}
