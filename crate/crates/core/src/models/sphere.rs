use std::sync::Arc;

use nalgebra::DVector;

use super::{
    extract_generator, LevelSetData, ModelBundle, ModelKind, ModelParams, ModelStructure, Oracle, Sampler,
};
use crate::error::{Error, Result};
use crate::flow::symplectic_field;
use crate::forms::{darboux_matrix, StatePoint, TwoForm};
use crate::hamiltonian::HamiltonianSystem;
use crate::symplectic::SymplecticStructure;

/// Level set `H = 1/2 sum_i |a_i|^2 = 1` in symplectic `R^{2N}` with
/// `omega(b, c) = sum_i (b1_i c2_i - b2_i c1_i)` and `Y = identity`.
///
/// The induced form at `a` is `eta_a(b) = sum_i (a ^ b)_i`; its vertical line
/// is spanned by `*a`. The symplectic flow of `H` rotates each grid point:
/// `a' = -*a`.
pub fn sphere_of_oneforms(n: usize) -> Result<ModelBundle> {
    sphere_of_oneforms_at_level(n, 1.0)
}

/// The same construction on the level set `H = level > 0`.
pub fn sphere_of_oneforms_at_level(n: usize, level: f64) -> Result<ModelBundle> {
    if n == 0 {
        return Err(Error::InvalidGrid("need at least one grid point".into()));
    }
    if !(level.is_finite() && level > 0.0) {
        return Err(Error::InvalidParameter(format!("level must be > 0, got {level}")));
    }
    let dim = 2 * n;
    let omega = darboux_matrix(n, 1.0);
    let symplectic = SymplecticStructure::new(dim, TwoForm::Constant(omega.clone()), None)?;
    let hamiltonian =
        HamiltonianSystem::new(dim, |x| 0.5 * x.norm_squared()).with_gradient(|x| x.coords().clone());
    let generator = extract_generator(dim, |x| symplectic_field(&omega, &hamiltonian.gradient(x)?))?;

    let mut initial = DVector::zeros(dim);
    let r = (2.0 * level / n as f64).sqrt();
    for i in 0..n {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        initial[2 * i] = r * phi.cos();
        initial[2 * i + 1] = r * phi.sin();
    }

    Ok(ModelBundle {
        kind: ModelKind::SphereOfOneforms,
        params: ModelParams {
            n,
            level,
            ..ModelParams::default()
        },
        structure: ModelStructure::LevelSet(LevelSetData {
            symplectic,
            liouville: Arc::new(|x: &StatePoint| x.coords().clone()),
            level,
        }),
        hamiltonian,
        initial: StatePoint::new(initial)?,
        wave: None,
        potential: None,
        linear_generator: Some(generator),
        convention: "omega(b, c) = sum b ^ c, eta = iota_Y omega",
        oracle: Some(Oracle::ExactFlow(Arc::new(move |x0: &StatePoint, t: f64| {
            let (s, c) = t.sin_cos();
            let mut x = DVector::zeros(dim);
            for i in 0..n {
                let (a1, a2) = (x0[2 * i], x0[2 * i + 1]);
                x[2 * i] = a1 * c + a2 * s;
                x[2 * i + 1] = -a1 * s + a2 * c;
            }
            StatePoint::new(x)
        }))),
        sampler: Sampler::LevelSet(level),
    })
}
