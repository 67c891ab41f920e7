//! Method-of-lines truncations of the wave family: damped wave (contact),
//! wave with source (cosymplectic) and damped wave with source (cocontact).
//!
//! Fields use quadrature weights `dx`: `omega(dq_i, dp_i) = dx`, and
//! `eta = dz - sum_i dx p_i dq_i` where a contact form is present.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{BoundaryCondition, Grid, ModelBundle, ModelKind, ModelParams, ModelStructure, Oracle, Potential, Sampler, Source, WaveTarget};
use crate::cocontact::CocontactStructure;
use crate::contact::ContactStructure;
use crate::cosymplectic::CosymplecticStructure;
use crate::error::{Error, Result};
use crate::forms::{Covector, OneForm, StatePoint, TwoForm};
use crate::hamiltonian::HamiltonianSystem;

/// Positions of the coordinate blocks in a wave state.
#[derive(Clone, Copy, Debug)]
struct Layout {
    z: Option<usize>,
    q: usize,
    n: usize,
}

impl Layout {
    fn p(&self) -> usize {
        self.q + self.n
    }

    fn dim(&self) -> usize {
        self.q + 2 * self.n
    }
}

/// Potential `U(t, q)` with its Riesz representatives: `dU` applied to a
/// direction `(t~, q~, p~)` with `t~ = 0` equals `sum_i dx (f_i q~_i + g_i p~_i)`.
#[derive(Clone, Debug)]
pub struct WavePotential {
    pub kind: Potential,
    pub source: Source,
    dx: f64,
    t_index: usize,
    q_offset: usize,
    n: usize,
}

impl WavePotential {
    fn q<'a>(&self, x: &'a StatePoint) -> nalgebra::DVectorView<'a, f64> {
        x.rows(self.q_offset, self.n)
    }

    pub fn value(&self, x: &StatePoint) -> f64 {
        let u = self.source.values(x[self.t_index]);
        let q = self.q(x);
        match self.kind {
            Potential::Simple => -self.dx * q.dot(&u),
            Potential::Quadratic => 0.5 * self.dx * (q - u).norm_squared(),
        }
    }

    /// `f^U`: `-u` for the simple potential, `q - u` for the quadratic one.
    pub fn riesz_f(&self, x: &StatePoint) -> DVector<f64> {
        let u = self.source.values(x[self.t_index]);
        match self.kind {
            Potential::Simple => -u,
            Potential::Quadratic => self.q(x) - u,
        }
    }

    /// `g^U = 0`: neither potential depends on `p`.
    pub fn riesz_g(&self, _x: &StatePoint) -> DVector<f64> {
        DVector::zeros(self.n)
    }

    fn time_partial(&self, x: &StatePoint) -> f64 {
        let t = x[self.t_index];
        let du = self.source.time_derivative(t);
        let q = self.q(x);
        match self.kind {
            Potential::Simple => -self.dx * q.dot(&du),
            Potential::Quadratic => -self.dx * (q - self.source.values(t)).dot(&du),
        }
    }
}

fn two_form(layout: Layout, dx: f64) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(layout.dim(), layout.dim());
    for i in 0..layout.n {
        d[(layout.q + i, layout.p() + i)] = dx;
        d[(layout.p() + i, layout.q + i)] = -dx;
    }
    d
}

/// `eta = dz - sum dx p dq`.
fn contact_form(layout: Layout, dx: f64) -> OneForm {
    let z = layout.z.expect("contact form needs a z coordinate");
    OneForm::field(move |x| {
        let mut c = DVector::zeros(layout.dim());
        c[z] = 1.0;
        for i in 0..layout.n {
            c[layout.q + i] = -dx * x[layout.p() + i];
        }
        Covector::new(c).expect("finite")
    })
}

/// `H = kappa z + U + sum dx ((D q)^2 + p^2) / 2`.
fn hamiltonian(layout: Layout, grid: &Grid, kappa: f64, potential: Option<WavePotential>) -> HamiltonianSystem {
    let dx = grid.dx();
    let dm = grid.difference_matrix();
    let k = dm.transpose() * &dm;
    let (dm, k) = (Arc::new(dm), Arc::new(k));
    let pot = potential.clone();
    let value = {
        let dm = dm.clone();
        move |x: &StatePoint| {
            let q = x.rows(layout.q, layout.n);
            let p = x.rows(layout.p(), layout.n);
            let mut h = 0.5 * dx * ((&*dm * q).norm_squared() + p.norm_squared());
            if let Some(z) = layout.z {
                h += kappa * x[z];
            }
            if let Some(u) = &pot {
                h += u.value(x);
            }
            h
        }
    };
    let gradient = move |x: &StatePoint| {
        let mut g = DVector::zeros(layout.dim());
        let q = x.rows(layout.q, layout.n);
        g.rows_mut(layout.q, layout.n).copy_from(&(&*k * q * dx));
        g.rows_mut(layout.p(), layout.n)
            .copy_from(&(x.rows(layout.p(), layout.n) * dx));
        if let Some(z) = layout.z {
            g[z] = kappa;
        }
        if let Some(u) = &potential {
            let f = u.riesz_f(x) * dx;
            let mut gq = g.rows_mut(layout.q, layout.n);
            gq += f;
            g[u.t_index] = u.time_partial(x);
        }
        g
    };
    HamiltonianSystem::new(layout.dim(), value).with_gradient(gradient)
}

/// Independent energy `sum dx ((q_{i+1} - q_i)^2 / dx^2 + p_i^2) / 2` by loops.
fn stencil_energy(grid: &Grid, q: &[f64], p: &[f64]) -> f64 {
    let n = q.len();
    let dx = grid.dx();
    let mut e = 0.0;
    let mut bond = |a: f64, b: f64| e += 0.5 * dx * (b - a) * (b - a) / (dx * dx);
    match grid.bc() {
        BoundaryCondition::Periodic => {
            for i in 0..n {
                bond(q[i], q[(i + 1) % n]);
            }
        }
        BoundaryCondition::Clamped => {
            bond(0.0, q[0]);
            for i in 0..n - 1 {
                bond(q[i], q[i + 1]);
            }
            bond(q[n - 1], 0.0);
        }
    }
    e + p.iter().map(|v| 0.5 * dx * v * v).sum::<f64>()
}

fn initial_state(layout: Layout, grid: &Grid) -> Result<StatePoint> {
    let mut x = DVector::zeros(layout.dim());
    let shape = grid.points().map(|s| (2.0 * std::f64::consts::PI * s / grid.length()).sin());
    x.rows_mut(layout.q, layout.n).copy_from(&shape);
    StatePoint::new(x)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("kappa must be >= 0, got {kappa}")))
    }
}

/// Damped wave on `(z, q_1..q_N, p_1..p_N)` with
/// `H = kappa z + sum dx ((D q)^2 + p^2) / 2`. The flow is
/// `q' = p`, `p' = Lap q - kappa p`, `z' = sum dx p^2 - H`.
pub fn damped_wave(kappa: f64, n: usize, length: f64, bc: BoundaryCondition) -> Result<ModelBundle> {
    check_kappa(kappa)?;
    let grid = Grid::for_wave(n, length, bc)?;
    let dx = grid.dx();
    let layout = Layout {
        z: Some(0),
        q: 1,
        n,
    };
    let structure = ContactStructure::new(
        layout.dim(),
        contact_form(layout, dx),
        TwoForm::Constant(two_form(layout, dx)),
    )?;
    let g = grid.clone();
    let rhs = move |x: &StatePoint| {
        let q: Vec<f64> = x.rows(1, n).iter().copied().collect();
        let p: Vec<f64> = x.rows(1 + n, n).iter().copied().collect();
        let h = kappa * x[0] + stencil_energy(&g, &q, &p);
        let lap = g.laplacian_stencil(&q);
        let mut v = DVector::zeros(1 + 2 * n);
        v[0] = p.iter().map(|pi| dx * pi * pi).sum::<f64>() - h;
        for i in 0..n {
            v[1 + i] = p[i];
            v[1 + n + i] = lap[i] - kappa * p[i];
        }
        v
    };
    Ok(ModelBundle {
        kind: ModelKind::DampedWave,
        params: ModelParams {
            kappa,
            n,
            length,
            bc,
            ..ModelParams::default()
        },
        structure: ModelStructure::Contact(structure),
        hamiltonian: hamiltonian(layout, &grid, kappa, None),
        initial: initial_state(layout, &grid)?,
        wave: Some(WaveTarget {
            grid: grid.clone(),
            kappa,
            mass: 0.0,
            source: Source::none(&grid),
            q_offset: 1,
            time_index: None,
        }),
        potential: None,
        linear_generator: None,
        convention: "eta = dz - sum dx p dq",
        oracle: Some(Oracle::Rhs(Arc::new(rhs))),
        sampler: Sampler::Cube,
    })
}

/// Wave with source on `(t, q_1..q_N, p_1..p_N)`, `theta = dt`,
/// `H = U(t, q) + sum dx ((D q)^2 + p^2) / 2`. The evolution field is
/// `t' = 1`, `q' = p + g^U`, `p' = Lap q - f^U`.
pub fn wave_with_source(
    n: usize,
    length: f64,
    bc: BoundaryCondition,
    source: Source,
    potential: Potential,
) -> Result<ModelBundle> {
    let grid = Grid::for_wave(n, length, bc)?;
    let dx = grid.dx();
    let layout = Layout {
        z: None,
        q: 1,
        n,
    };
    let structure = CosymplecticStructure::new(
        layout.dim(),
        OneForm::Constant(Covector::basis(layout.dim(), 0)),
        TwoForm::Constant(two_form(layout, dx)),
    )?;
    let pot = WavePotential {
        kind: potential,
        source: source.clone(),
        dx,
        t_index: 0,
        q_offset: 1,
        n,
    };
    let (g, u) = (grid.clone(), source.clone());
    let rhs = move |x: &StatePoint| {
        let q: Vec<f64> = x.rows(1, n).iter().copied().collect();
        let lap = g.laplacian_stencil(&q);
        let ut = u.values(x[0]);
        let mut v = DVector::zeros(1 + 2 * n);
        v[0] = 1.0;
        for i in 0..n {
            let f = match potential {
                Potential::Simple => -ut[i],
                Potential::Quadratic => q[i] - ut[i],
            };
            v[1 + i] = x[1 + n + i];
            v[1 + n + i] = lap[i] - f;
        }
        v
    };
    let mass = match potential {
        Potential::Simple => 0.0,
        Potential::Quadratic => 1.0,
    };
    Ok(ModelBundle {
        kind: ModelKind::WaveWithSource,
        params: ModelParams {
            n,
            length,
            bc,
            potential: Some(potential),
            source: source.name().to_string(),
            ..ModelParams::default()
        },
        structure: ModelStructure::Cosymplectic(structure),
        hamiltonian: hamiltonian(layout, &grid, 0.0, Some(pot.clone())),
        initial: initial_state(layout, &grid)?,
        wave: Some(WaveTarget {
            grid: grid.clone(),
            kappa: 0.0,
            mass,
            source,
            q_offset: 1,
            time_index: Some(0),
        }),
        potential: Some(pot),
        linear_generator: None,
        convention: "theta = dt, omega(dq_i, dp_i) = dx",
        oracle: Some(Oracle::Rhs(Arc::new(rhs))),
        sampler: Sampler::Cube,
    })
}

/// Damped wave with source on `(t, z, q_1..q_N, p_1..p_N)`, `theta = dt`,
/// `eta = dz - sum dx p dq`, `H = kappa z - sum dx q u(t) + sum dx ((D q)^2 + p^2) / 2`.
/// The flow gives `t' = 1` and `q'' = Lap q - kappa q' + u(t)`.
pub fn damped_wave_source(
    kappa: f64,
    n: usize,
    length: f64,
    bc: BoundaryCondition,
    source: Source,
) -> Result<ModelBundle> {
    check_kappa(kappa)?;
    let grid = Grid::for_wave(n, length, bc)?;
    let dx = grid.dx();
    let layout = Layout {
        z: Some(1),
        q: 2,
        n,
    };
    let structure = CocontactStructure::new(
        layout.dim(),
        OneForm::Constant(Covector::basis(layout.dim(), 0)),
        contact_form(layout, dx),
        TwoForm::Constant(two_form(layout, dx)),
    )?;
    let pot = WavePotential {
        kind: Potential::Simple,
        source: source.clone(),
        dx,
        t_index: 0,
        q_offset: 2,
        n,
    };
    let (g, u) = (grid.clone(), source.clone());
    let rhs = move |x: &StatePoint| {
        let q: Vec<f64> = x.rows(2, n).iter().copied().collect();
        let p: Vec<f64> = x.rows(2 + n, n).iter().copied().collect();
        let ut = u.values(x[0]);
        let potential: f64 = (0..n).map(|i| -dx * q[i] * ut[i]).sum();
        let h = kappa * x[1] + potential + stencil_energy(&g, &q, &p);
        let lap = g.laplacian_stencil(&q);
        let mut v = DVector::zeros(2 + 2 * n);
        v[0] = 1.0;
        v[1] = p.iter().map(|pi| dx * pi * pi).sum::<f64>() - h;
        for i in 0..n {
            v[2 + i] = p[i];
            v[2 + n + i] = lap[i] - kappa * p[i] + ut[i];
        }
        v
    };
    Ok(ModelBundle {
        kind: ModelKind::DampedWaveSource,
        params: ModelParams {
            kappa,
            n,
            length,
            bc,
            potential: Some(Potential::Simple),
            source: source.name().to_string(),
            ..ModelParams::default()
        },
        structure: ModelStructure::Cocontact(structure),
        hamiltonian: hamiltonian(layout, &grid, kappa, Some(pot.clone())),
        initial: initial_state(layout, &grid)?,
        wave: Some(WaveTarget {
            grid: grid.clone(),
            kappa,
            mass: 0.0,
            source,
            q_offset: 2,
            time_index: Some(0),
        }),
        potential: Some(pot),
        linear_generator: None,
        convention: "theta = dt, eta = dz - sum dx p dq",
        oracle: Some(Oracle::Rhs(Arc::new(rhs))),
        sampler: Sampler::Cube,
    })
}
