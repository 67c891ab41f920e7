use std::sync::Arc;

use nalgebra::DVector;

use super::{extract_generator, ModelBundle, ModelKind, ModelParams, ModelStructure, Oracle, Sampler};
use crate::contact::hamiltonian_vector_field;
use crate::error::{Error, Result};
use crate::forms::StatePoint;
use crate::hamiltonian::HamiltonianSystem;
use crate::symplectic::{contactization, SymplecticStructure};

/// Discrete one-forms on a flat torus with `N` grid points and unit weights.
///
/// State `(z, a1_1, a2_1, ..., a1_N, a2_N)`, contact form
/// `eta = dz + 1/2 sum_i (a1_i da2_i - a2_i da1_i)` (the contactization of
/// `omega(b, c) = sum_i (b1_i c2_i - b2_i c1_i)`), and
/// `H = kappa z + 1/2 sum_i |a_i|^2`. Each grid point rotates and decays
/// independently: `a' = -*a - kappa a / 2`, `z' = -kappa z`.
pub fn oneform_field(kappa: f64, n: usize) -> Result<ModelBundle> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidParameter(format!("kappa must be >= 0, got {kappa}")));
    }
    if n == 0 {
        return Err(Error::InvalidGrid("need at least one grid point".into()));
    }
    let dim = 1 + 2 * n;
    let structure = contactization(&SymplecticStructure::standard(n))?;
    let hamiltonian = HamiltonianSystem::new(dim, move |x| kappa * x[0] + 0.5 * x.rows(1, 2 * n).norm_squared())
        .with_gradient(move |x| {
            let mut g = x.coords().clone();
            g[0] = kappa;
            g
        });
    let generator = extract_generator(dim, |x| hamiltonian_vector_field(&structure, &hamiltonian, x, 1e-10))?;

    let mut initial = DVector::zeros(dim);
    initial[0] = 1.0;
    for i in 0..n {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        initial[1 + 2 * i] = phi.cos();
        initial[2 + 2 * i] = phi.sin();
    }

    Ok(ModelBundle {
        kind: ModelKind::OneformField,
        params: ModelParams {
            kappa,
            n,
            ..ModelParams::default()
        },
        structure: ModelStructure::Contact(structure),
        hamiltonian,
        initial: StatePoint::new(initial)?,
        wave: None,
        potential: None,
        linear_generator: Some(generator),
        convention: "eta = dz + 1/2 sum a ^ da",
        oracle: Some(Oracle::ExactFlow(Arc::new(move |x0: &StatePoint, t: f64| {
            exact(kappa, n, x0, t)
        }))),
        sampler: Sampler::Cube,
    })
}

/// Row vector `a(t) = a(0) [[cos t, -sin t], [sin t, cos t]] exp(-kappa t / 2)`.
fn exact(kappa: f64, n: usize, x0: &StatePoint, t: f64) -> Result<StatePoint> {
    let (s, c) = t.sin_cos();
    let decay = (-0.5 * kappa * t).exp();
    let mut x = DVector::zeros(1 + 2 * n);
    x[0] = x0[0] * (-kappa * t).exp();
    for i in 0..n {
        let (a1, a2) = (x0[1 + 2 * i], x0[2 + 2 * i]);
        x[1 + 2 * i] = decay * (a1 * c + a2 * s);
        x[2 + 2 * i] = decay * (-a1 * s + a2 * c);
    }
    StatePoint::new(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::hodge_star;

    #[test]
    fn field_is_rotation_plus_decay() {
        let kappa = 0.2;
        let m = oneform_field(kappa, 3).unwrap();
        let x = StatePoint::from_slice(&[0.7, 1.0, -0.5, 0.3, 0.2, -1.2, 0.9]).unwrap();
        let v = m.vector_field(&x, 1e-10).unwrap();
        let alpha = x.rows(1, 6).into_owned();
        let expected = -hodge_star(&alpha) - &alpha * (0.5 * kappa);
        assert!((v[0] + kappa * x[0]).abs() < 1e-14);
        assert!((v.rows(1, 6) - expected).amax() < 1e-14);
    }

    #[test]
    fn generator_is_block_diagonal_with_expected_eigenvalues() {
        let kappa = 0.2;
        let m = oneform_field(kappa, 2).unwrap();
        let a = m.linear_generator.as_ref().unwrap();
        assert_eq!(a[(1, 3)], 0.0);
        assert_eq!(a[(4, 2)], 0.0);
        let block = a.view((1, 1), (2, 2)).into_owned();
        let ev = block.complex_eigenvalues();
        for e in ev.iter() {
            assert!((e.re + kappa / 2.0).abs() < 1e-14);
            assert!((e.im.abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn quarter_turn_without_damping() {
        let m = oneform_field(0.0, 1).unwrap();
        let Oracle::ExactFlow(f) = m.oracle().unwrap() else { panic!() };
        let x = f(&StatePoint::from_slice(&[0.0, 1.0, 0.0]).unwrap(), std::f64::consts::FRAC_PI_2).unwrap();
        assert!((x[1]).abs() < 1e-15 && (x[2] + 1.0).abs() < 1e-15);
    }
}
