//! Fixed-step integration and diagnostics along flows.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::forms::StatePoint;
use crate::hamiltonian::HamiltonianSystem;

mod diagnostics;
mod expm;

pub use diagnostics::{fit_decay_rate, hamiltonian_trace, pde_residual, DecayFit, PdeResidual};
pub use expm::{exact_linear_flow, expm};

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryMeta {
    pub integrator: String,
    pub dt: f64,
    pub model: String,
}

/// States on a uniform time grid `t_k = k dt`, with `H` at every state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StatePoint>,
    pub h_trace: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &StatePoint {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn with_model(mut self, name: &str) -> Self {
        self.meta.model = name.to_string();
        self
    }
}

/// Number of steps `round(t_final / dt)`, validated.
pub fn step_count(dt: f64, t_final: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(t_final.is_finite() && t_final >= dt) {
        return Err(Error::InvalidParameter(format!("t_final must be >= dt, got {t_final}")));
    }
    Ok((t_final / dt).round() as usize)
}

/// Classical fourth-order Runge-Kutta with fixed step `dt` up to
/// `round(t_final / dt) * dt`.
pub fn rk4_integrate<F>(
    field: F,
    x0: &StatePoint,
    dt: f64,
    t_final: f64,
    h: &HamiltonianSystem,
) -> Result<Trajectory>
where
    F: Fn(&StatePoint) -> Result<DVector<f64>>,
{
    let steps = step_count(dt, t_final)?;
    let eval = |x: &DVector<f64>, step: usize| -> Result<DVector<f64>> {
        let wrap = |e: Error| Error::FieldEvaluationFailed {
            step,
            source: Box::new(e),
        };
        let p = StatePoint::new(x.clone()).map_err(wrap)?;
        let v = field(&p).map_err(wrap)?;
        if v.len() != x.len() {
            return Err(wrap(Error::DimensionMismatch {
                expected: x.len(),
                got: v.len(),
            }));
        }
        Ok(v)
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut h_trace = Vec::with_capacity(steps + 1);
    let mut x = x0.coords().clone();
    times.push(0.0);
    h_trace.push(h.value(x0));
    states.push(x0.clone());
    for k in 0..steps {
        let k1 = eval(&x, k)?;
        let k2 = eval(&(&x + &k1 * (0.5 * dt)), k)?;
        let k3 = eval(&(&x + &k2 * (0.5 * dt)), k)?;
        let k4 = eval(&(&x + &k3 * dt), k)?;
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let p = StatePoint::new(x.clone()).map_err(|e| Error::FieldEvaluationFailed {
            step: k,
            source: Box::new(e),
        })?;
        times.push((k + 1) as f64 * dt);
        h_trace.push(h.value(&p));
        states.push(p);
    }
    Ok(Trajectory {
        times,
        states,
        h_trace,
        meta: TrajectoryMeta {
            integrator: "rk4".into(),
            dt,
            model: String::new(),
        },
    })
}

/// Trajectory of the linear flow `x' = A x` sampled with `exp(k dt A) x0`.
pub fn exact_linear_trajectory(
    a: &nalgebra::DMatrix<f64>,
    x0: &StatePoint,
    dt: f64,
    t_final: f64,
    h: &HamiltonianSystem,
) -> Result<Trajectory> {
    let steps = step_count(dt, t_final)?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut h_trace = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let x = StatePoint::new(exact_linear_flow(a, x0.coords(), t)?)?;
        times.push(t);
        h_trace.push(h.value(&x));
        states.push(x);
    }
    Ok(Trajectory {
        times,
        states,
        h_trace,
        meta: TrajectoryMeta {
            integrator: "exact".into(),
            dt,
            model: String::new(),
        },
    })
}
