use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{ModelBundle, ModelKind, ModelParams, ModelStructure, Oracle, Sampler};
use crate::contact::ContactStructure;
use crate::error::{Error, Result};
use crate::forms::{Covector, OneForm, StatePoint, TwoForm};
use crate::hamiltonian::HamiltonianSystem;

/// Damped oscillator on contact `R^3` with coordinates `(q, p, z)`,
/// `eta = dz - p dq` and `H = kappa z + (q^2 + p^2) / 2`.
///
/// The flow is `q' = p`, `p' = -q - kappa p`, `z' = p^2 - H`. The closed-form
/// oracle covers the underdamped range `kappa < 2`.
pub fn damped_oscillator(kappa: f64) -> Result<ModelBundle> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidParameter(format!("kappa must be >= 0, got {kappa}")));
    }
    let eta = OneForm::field(|x| Covector::from_slice(&[-x[1], 0.0, 1.0]).expect("finite"));
    let mut d = DMatrix::zeros(3, 3);
    d[(0, 1)] = 1.0;
    d[(1, 0)] = -1.0;
    let structure = ContactStructure::new(3, eta, TwoForm::Constant(d))?;
    let hamiltonian = HamiltonianSystem::new(3, move |x| kappa * x[2] + 0.5 * (x[0] * x[0] + x[1] * x[1]))
        .with_gradient(move |x| DVector::from_vec(vec![x[0], x[1], kappa]));

    let oracle = (kappa < 2.0).then(|| Oracle::ExactFlow(Arc::new(move |x0: &StatePoint, t: f64| exact(kappa, x0, t))));
    Ok(ModelBundle {
        kind: ModelKind::DampedOscillator,
        params: ModelParams {
            kappa,
            n: 1,
            ..ModelParams::default()
        },
        structure: ModelStructure::Contact(structure),
        hamiltonian,
        initial: StatePoint::from_slice(&[1.0, 0.0, 0.0])?,
        wave: None,
        potential: None,
        linear_generator: None,
        convention: "eta = dz - p dq",
        oracle,
        sampler: Sampler::Cube,
    })
}

fn exact(kappa: f64, x0: &StatePoint, t: f64) -> Result<StatePoint> {
    if kappa >= 2.0 {
        return Err(Error::OverdampedOracleUnavailable { kappa });
    }
    let (q0, p0, z0) = (x0[0], x0[1], x0[2]);
    let a = 0.5 * kappa;
    let w = (1.0 - a * a).sqrt();
    let (s, c) = (w * t).sin_cos();
    let decay = (-a * t).exp();
    let b = (p0 + a * q0) / w;
    let q = decay * (q0 * c + b * s);
    let p = decay * ((w * b - a * q0) * c - (a * b + w * q0) * s);
    let e0 = 0.5 * (q0 * q0 + p0 * p0);
    let e = 0.5 * (q * q + p * p);
    let z = if kappa == 0.0 {
        // z' = p^2 - e0 integrated in closed form.
        let st = t.sin();
        z0 + 0.25 * (p0 * p0 - q0 * q0) * (2.0 * t).sin() - q0 * p0 * st * st
    } else {
        // H(t) = H(0) exp(-kappa t) with H = kappa z + e.
        let ek = (-kappa * t).exp();
        z0 * ek + (e0 * ek - e) / kappa
    };
    StatePoint::from_slice(&[q, p, z])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_matches_initial_state_and_energy_law() {
        let m = damped_oscillator(0.3).unwrap();
        let Oracle::ExactFlow(f) = m.oracle().unwrap() else { panic!() };
        let x0 = StatePoint::from_slice(&[0.4, -1.1, 0.7]).unwrap();
        let at0 = f(&x0, 0.0).unwrap();
        assert!((at0.coords() - x0.coords()).amax() < 1e-15);
        let xt = f(&x0, 2.5).unwrap();
        let h = |x: &StatePoint| m.hamiltonian.value(x);
        assert!((h(&xt) - h(&x0) * (-0.3f64 * 2.5).exp()).abs() < 1e-14);
    }

    #[test]
    fn undamped_oracle_conserves_energy() {
        let m = damped_oscillator(0.0).unwrap();
        let Oracle::ExactFlow(f) = m.oracle().unwrap() else { panic!() };
        let x0 = StatePoint::from_slice(&[0.4, -1.1, 0.7]).unwrap();
        // z' = p^2 - H, checked by central differences.
        let h = 1e-5;
        let (a, b) = (f(&x0, 1.3 - h).unwrap(), f(&x0, 1.3 + h).unwrap());
        let mid = f(&x0, 1.3).unwrap();
        let zdot = (b[2] - a[2]) / (2.0 * h);
        assert!((zdot - (mid[1] * mid[1] - m.hamiltonian.value(&x0))).abs() < 1e-8);
    }

    #[test]
    fn overdamped_has_no_oracle() {
        let m = damped_oscillator(2.5).unwrap();
        assert!(matches!(m.oracle(), Err(Error::OverdampedOracleUnavailable { .. })));
        assert!(damped_oscillator(-0.1).is_err());
    }
}
