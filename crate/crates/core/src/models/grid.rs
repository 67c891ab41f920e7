//! Uniform one-dimensional grids, difference operators and grid sources.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// `N` points on a circle of length `L`, `dx = L / N`.
    Periodic,
    /// `N` interior points of `[0, L]` with zero ends, `dx = L / (N + 1)`.
    Clamped,
}

impl BoundaryCondition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Periodic => "periodic",
            Self::Clamped => "clamped",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Self::Periodic),
            "clamped" => Ok(Self::Clamped),
            other => Err(Error::InvalidParameter(format!("unknown boundary condition `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
    bc: BoundaryCondition,
    dx: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64, bc: BoundaryCondition) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("need at least one grid point".into()));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        let dx = match bc {
            BoundaryCondition::Periodic => length / n as f64,
            BoundaryCondition::Clamped => length / (n + 1) as f64,
        };
        Ok(Self { n, length, bc, dx })
    }

    /// Grid used by the wave models, which need `N >= 4`.
    pub(crate) fn for_wave(n: usize, length: f64, bc: BoundaryCondition) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidGrid(format!("wave models need N >= 4, got {n}")));
        }
        Self::new(n, length, bc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Positions of the unknowns.
    pub fn points(&self) -> DVector<f64> {
        let shift = match self.bc {
            BoundaryCondition::Periodic => 0.0,
            BoundaryCondition::Clamped => 1.0,
        };
        DVector::from_fn(self.n, |i, _| (i as f64 + shift) * self.dx)
    }

    /// Forward difference `(q_{i+1} - q_i) / dx`. Periodic: `N x N`, wrapping.
    /// Clamped: `(N + 1) x N`, with zero ghost values at both ends.
    pub fn difference_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let inv = 1.0 / self.dx;
        match self.bc {
            BoundaryCondition::Periodic => {
                let mut d = DMatrix::zeros(n, n);
                for i in 0..n {
                    d[(i, i)] -= inv;
                    d[(i, (i + 1) % n)] += inv;
                }
                d
            }
            BoundaryCondition::Clamped => {
                let mut d = DMatrix::zeros(n + 1, n);
                for i in 0..=n {
                    if i < n {
                        d[(i, i)] += inv;
                    }
                    if i > 0 {
                        d[(i, i - 1)] -= inv;
                    }
                }
                d
            }
        }
    }

    /// `-D^T D`, the standard three-point Laplacian.
    pub fn laplacian_matrix(&self) -> DMatrix<f64> {
        let d = self.difference_matrix();
        -(d.transpose() * d)
    }

    /// Three-point stencil `(q_{i-1} - 2 q_i + q_{i+1}) / dx^2`, assembled pointwise.
    pub fn laplacian_stencil(&self, q: &[f64]) -> DVector<f64> {
        let n = self.n;
        let h2 = self.dx * self.dx;
        let at = |i: isize| -> f64 {
            match self.bc {
                BoundaryCondition::Periodic => q[i.rem_euclid(n as isize) as usize],
                BoundaryCondition::Clamped if i < 0 || i >= n as isize => 0.0,
                BoundaryCondition::Clamped => q[i as usize],
            }
        };
        DVector::from_fn(n, |i, _| {
            let i = i as isize;
            (at(i - 1) - 2.0 * at(i) + at(i + 1)) / h2
        })
    }

    /// `sum_i dx ((D q)_i)^2 / 2`.
    pub fn gradient_energy(&self, q: &[f64]) -> f64 {
        let dq = self.difference_matrix() * DVector::from_column_slice(q);
        0.5 * self.dx * dq.norm_squared()
    }
}

/// Values of a function on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub values: DVector<f64>,
    pub dx: f64,
}

impl GridField {
    pub fn new(values: DVector<f64>, dx: f64) -> Result<Self> {
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("grid field"));
        }
        Ok(Self { values, dx })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Trapezoidal (uniform-weight) pairing `sum_i dx a_i b_i`.
    pub fn pair(&self, other: &DVector<f64>) -> f64 {
        self.dx * self.values.dot(other)
    }
}

type SourceFn = dyn Fn(f64) -> DVector<f64> + Send + Sync;

/// A source term `u(t)` sampled on a grid.
#[derive(Clone)]
pub struct Source {
    name: String,
    dx: f64,
    zero: bool,
    f: Arc<SourceFn>,
    df: Option<Arc<SourceFn>>,
}

impl Source {
    pub fn none(grid: &Grid) -> Self {
        let n = grid.n();
        Self {
            name: "none".into(),
            dx: grid.dx(),
            zero: true,
            f: Arc::new(move |_| DVector::zeros(n)),
            df: Some(Arc::new(move |_| DVector::zeros(n))),
        }
    }

    /// `u(x, t) = sin(t) sin(2 pi x / L)`.
    pub fn sine(grid: &Grid) -> Self {
        let shape = grid.points().map(|x| (2.0 * std::f64::consts::PI * x / grid.length()).sin());
        let shape2 = shape.clone();
        Self {
            name: "sine".into(),
            dx: grid.dx(),
            zero: false,
            f: Arc::new(move |t| &shape * t.sin()),
            df: Some(Arc::new(move |t| &shape2 * t.cos())),
        }
    }

    /// A user source; its time derivative is taken by central differences.
    pub fn custom<F>(name: &str, grid: &Grid, f: F) -> Self
    where
        F: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dx: grid.dx(),
            zero: false,
            f: Arc::new(f),
            df: None,
        }
    }

    /// `none` or `sine`.
    pub fn by_name(name: &str, grid: &Grid) -> Result<Self> {
        match name {
            "none" => Ok(Self::none(grid)),
            "sine" => Ok(Self::sine(grid)),
            other => Err(Error::InvalidParameter(format!("unknown source `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn values(&self, t: f64) -> DVector<f64> {
        (self.f)(t)
    }

    pub fn time_derivative(&self, t: f64) -> DVector<f64> {
        match &self.df {
            Some(df) => df(t),
            None => {
                let h = f64::EPSILON.cbrt() * t.abs().max(1.0);
                (self.values(t + h) - self.values(t - h)) / (2.0 * h)
            }
        }
    }

    pub fn at(&self, t: f64) -> Result<GridField> {
        GridField::new(self.values(t), self.dx)
    }
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Source").field("name", &self.name).finish()
    }
}
