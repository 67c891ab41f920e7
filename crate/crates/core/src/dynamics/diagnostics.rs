use nalgebra::DVector;

use super::Trajectory;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSystem;
use crate::models::ModelBundle;

/// `H` at every stored state.
pub fn hamiltonian_trace(traj: &Trajectory, h: &HamiltonianSystem) -> Vec<f64> {
    traj.states.iter().map(|x| h.value(x)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    /// Negated slope of `log(values)` against `times`.
    pub kappa: f64,
    pub r2: f64,
}

/// Least-squares fit of `values = c exp(-kappa t)` in log space.
pub fn fit_decay_rate(times: &[f64], values: &[f64]) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    if times.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: times.len(),
        });
    }
    if !values.iter().all(|&v| v > 0.0 && v.is_finite()) {
        return Err(Error::NonPositiveValues);
    }
    let m = times.len() as f64;
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let t_mean = times.iter().sum::<f64>() / m;
    let y_mean = logs.iter().sum::<f64>() / m;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (t, y) in times.iter().zip(&logs) {
        let (dt, dy) = (t - t_mean, y - y_mean);
        sxx += dt * dt;
        sxy += dt * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientSamples { needed: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * t_mean;
    let ss_res: f64 = times
        .iter()
        .zip(&logs)
        .map(|(t, y)| {
            let r = y - (intercept + slope * t);
            r * r
        })
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(DecayFit { kappa: -slope, r2 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeResidual {
    /// `max |q'' - (Lap q - kappa q' - mass q + u)|` over interior samples.
    pub max_residual: f64,
    /// Expected size of the central-difference error: `dt^2 / 12 max|q''''|`
    /// plus a rounding term `4 eps max|q| / dt^2`.
    pub truncation_scale: f64,
}

/// Residual of the target wave equation of `model` along `traj`, with time
/// derivatives by central differences.
pub fn pde_residual(traj: &Trajectory, model: &ModelBundle) -> Result<PdeResidual> {
    let target = model
        .wave
        .as_ref()
        .ok_or_else(|| Error::NoTargetPde(model.name().into()))?;
    let len = traj.states.len();
    if len < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: len });
    }
    let dt = traj.meta.dt;
    let n = target.grid.n();
    let lap = target.grid.laplacian_matrix();
    let q = |k: usize| traj.states[k].rows(target.q_offset, n).into_owned();
    let time = |k: usize| match target.time_index {
        Some(i) => traj.states[k][i],
        None => traj.times[k],
    };

    let mut worst: f64 = 0.0;
    let mut q_max: f64 = 0.0;
    for k in 1..len - 1 {
        let (qm, q0, qp) = (q(k - 1), q(k), q(k + 1));
        let qdd = (&qp - &q0 * 2.0 + &qm) / (dt * dt);
        let qd = (&qp - &qm) / (2.0 * dt);
        let u = target.source.values(time(k));
        let rhs: DVector<f64> = &lap * &q0 - qd * target.kappa - &q0 * target.mass + u;
        worst = worst.max((qdd - rhs).amax());
        q_max = q_max.max(q0.amax());
    }

    // Fourth differences over a stride long enough to rise above rounding.
    let stride = ((0.01 / dt).round() as usize).clamp(1, (len - 1) / 4);
    let mut q4: f64 = 0.0;
    if len > 4 * stride {
        let h = stride as f64 * dt;
        for k in 2 * stride..len - 2 * stride {
            let d4 = q(k - 2 * stride) - q(k - stride) * 4.0 + q(k) * 6.0 - q(k + stride) * 4.0 + q(k + 2 * stride);
            q4 = q4.max(d4.amax() / h.powi(4));
        }
    }
    let truncation_scale = dt * dt / 12.0 * q4 + 4.0 * f64::EPSILON * q_max / (dt * dt);
    Ok(PdeResidual {
        max_residual: worst,
        truncation_scale,
    })
}
