//! Fixtures shared by the criterion benches.

use contactflow::{
    damped_wave, oneform_field, BoundaryCondition, ContactStructure, HamiltonianSystem, ModelBundle, StatePoint,
};
use nalgebra::{DMatrix, DVector};

/// Damped wave with `kappa = 0.1` on a periodic grid of `n` points.
pub fn wave(n: usize) -> ModelBundle {
    damped_wave(0.1, n, 2.0 * std::f64::consts::PI, BoundaryCondition::Periodic).expect("valid wave fixture")
}

/// Generator of the linear one-form field on `R^{2n}`.
pub fn oneform_generator(n: usize) -> DMatrix<f64> {
    oneform_field(0.2, n)
        .expect("valid oneform fixture")
        .linear_generator
        .expect("oneform field is linear")
}

/// Canonical contact structure on `R^{2k+1}` and a fixed non-trivial point.
pub fn canonical(k: usize) -> (ContactStructure, StatePoint) {
    let x = DVector::from_fn(2 * k + 1, |i, _| ((i as f64) * 0.37).sin());
    (ContactStructure::canonical(k), StatePoint::new(x).expect("finite point"))
}

/// `H = |x|^2 / 2` with its exact gradient.
pub fn half_norm_squared(dim: usize) -> HamiltonianSystem {
    HamiltonianSystem::new(dim, |x| 0.5 * x.norm_squared()).with_gradient(|x| x.coords().clone())
}
