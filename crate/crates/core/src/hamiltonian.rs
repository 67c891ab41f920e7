use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::forms::{check_dim, Covector, StatePoint};

type ValueFn = dyn Fn(&StatePoint) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&StatePoint) -> DVector<f64> + Send + Sync;

/// A scalar Hamiltonian with an optional analytic gradient.
///
/// Without an analytic gradient, [`HamiltonianSystem::gradient`] falls back to
/// central differences with step `eps^(1/3) * max(1, |x_i|)`.
#[derive(Clone)]
pub struct HamiltonianSystem {
    dim: usize,
    value: Arc<ValueFn>,
    gradient: Option<Arc<GradientFn>>,
}

impl HamiltonianSystem {
    pub fn new<F>(dim: usize, value: F) -> Self
    where
        F: Fn(&StatePoint) -> f64 + Send + Sync + 'static,
    {
        Self {
            dim,
            value: Arc::new(value),
            gradient: None,
        }
    }

    pub fn with_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn(&StatePoint) -> DVector<f64> + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    /// `H = c` everywhere.
    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, move |_| c).with_gradient(move |_| DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn value(&self, x: &StatePoint) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &StatePoint) -> Result<Covector> {
        check_dim(self.dim, x.dim())?;
        match &self.gradient {
            Some(g) => {
                let dh = g(x);
                if dh.len() != self.dim || !dh.iter().all(|v| v.is_finite()) {
                    return Err(Error::GradientUnavailable);
                }
                Covector::new(dh)
            }
            None => self.fd_gradient(x),
        }
    }

    pub fn fd_gradient(&self, x: &StatePoint) -> Result<Covector> {
        check_dim(self.dim, x.dim())?;
        let base = f64::EPSILON.cbrt();
        let mut grad = DVector::zeros(self.dim);
        let mut probe = x.coords().clone();
        for i in 0..self.dim {
            let xi = x[i];
            let h = base * xi.abs().max(1.0);
            probe[i] = xi + h;
            let up = self.value(&StatePoint::new(probe.clone())?);
            probe[i] = xi - h;
            let down = self.value(&StatePoint::new(probe.clone())?);
            probe[i] = xi;
            grad[i] = (up - down) / (2.0 * h);
        }
        Covector::new(grad).map_err(|_| Error::GradientUnavailable)
    }
}

impl fmt::Debug for HamiltonianSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSystem")
            .field("dim", &self.dim)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_matches_analytic_on_quadratic() {
        let h = HamiltonianSystem::new(3, |x| 0.1 * x[2] + 0.5 * (x[0] * x[0] + x[1] * x[1]))
            .with_gradient(|x| DVector::from_vec(vec![x[0], x[1], 0.1]));
        let x = StatePoint::from_slice(&[1.5, -20.0, 3.0]).unwrap();
        let a = h.gradient(&x).unwrap();
        let n = h.fd_gradient(&x).unwrap();
        assert!((a.comps() - n.comps()).amax() < 1e-6 * a.amax());
    }

    #[test]
    fn non_finite_value_means_no_gradient() {
        let h = HamiltonianSystem::new(1, |x| if x[0] > 0.0 { f64::NAN } else { 0.0 });
        let err = h.gradient(&StatePoint::from_slice(&[0.0]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::GradientUnavailable));
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let h = HamiltonianSystem::constant(2, 1.0);
        assert!(h.gradient(&StatePoint::zeros(3)).is_err());
    }
}
