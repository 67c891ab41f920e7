//! Points, covectors and pointwise evaluators for one- and two-forms.
//!
//! Matrix layout used everywhere in this crate: a two-form `w` at a point is
//! stored as the matrix `D` with `D[(i, j)] = w(e_i, e_j)`. Contraction
//! `iota_v w` is then the covector `D^T v`, and a flat map
//! `v -> iota_v w + sum_k c_k(v) c_k` has matrix `D^T + sum_k c_k c_k^T`.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Coordinates of a point of the (truncated) phase space. Entries are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePoint(DVector<f64>);

impl StatePoint {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.iter().all(|c| c.is_finite()) {
            Ok(Self(coords))
        } else {
            Err(Error::NonFinite("state point"))
        }
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }
}

impl Deref for StatePoint {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

/// A covector at a point; pairs with tangent vectors by the dot product.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector(DVector<f64>);

impl Covector {
    pub fn new(comps: DVector<f64>) -> Result<Self> {
        if comps.iter().all(|c| c.is_finite()) {
            Ok(Self(comps))
        } else {
            Err(Error::NonFinite("covector"))
        }
    }

    pub fn from_slice(comps: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(comps))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    /// Unit covector `dx_i` in `n` dimensions.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn comps(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    pub fn pair(&self, v: &DVector<f64>) -> f64 {
        self.0.dot(v)
    }
}

impl Deref for Covector {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

pub type OneFormFn = dyn Fn(&StatePoint) -> Covector + Send + Sync;
pub type TwoFormFn = dyn Fn(&StatePoint) -> DMatrix<f64> + Send + Sync;
pub type VectorFieldFn = dyn Fn(&StatePoint) -> DVector<f64> + Send + Sync;

/// A one-form, either constant in the natural parallelisation or evaluated pointwise.
#[derive(Clone)]
pub enum OneForm {
    Constant(Covector),
    Field(Arc<OneFormFn>),
}

impl OneForm {
    pub fn field<F>(f: F) -> Self
    where
        F: Fn(&StatePoint) -> Covector + Send + Sync + 'static,
    {
        Self::Field(Arc::new(f))
    }

    pub fn at(&self, x: &StatePoint) -> Covector {
        match self {
            Self::Constant(c) => c.clone(),
            Self::Field(f) => f(x),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => f.debug_tuple("Constant").field(&c.as_slice()).finish(),
            Self::Field(_) => f.write_str("Field(..)"),
        }
    }
}

/// A two-form in the `D[(i, j)] = w(e_i, e_j)` layout.
#[derive(Clone)]
pub enum TwoForm {
    Constant(DMatrix<f64>),
    Field(Arc<TwoFormFn>),
}

impl TwoForm {
    pub fn field<F>(f: F) -> Self
    where
        F: Fn(&StatePoint) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self::Field(Arc::new(f))
    }

    pub fn at(&self, x: &StatePoint) -> DMatrix<f64> {
        match self {
            Self::Constant(m) => m.clone(),
            Self::Field(f) => f(x),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }

    pub fn eval(&self, x: &StatePoint, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        match self {
            Self::Constant(m) => u.dot(&(m * v)),
            Self::Field(f) => u.dot(&(f(x) * v)),
        }
    }
}

impl fmt::Debug for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(m) => write!(f, "Constant({}x{})", m.nrows(), m.ncols()),
            Self::Field(_) => f.write_str("Field(..)"),
        }
    }
}

/// Canonical Darboux two-form on `R^{2k}` with pairs `(x_i, y_i)` interleaved,
/// `w(e_{x_i}, e_{y_i}) = weight`.
pub fn darboux_matrix(k: usize, weight: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        m[(2 * i, 2 * i + 1)] = weight;
        m[(2 * i + 1, 2 * i)] = -weight;
    }
    m
}

/// Exterior derivative of a one-form at `x` by central differences:
/// `dtheta[(i, j)] = d_i theta_j - d_j theta_i`.
pub fn exterior_derivative(theta: &OneForm, x: &StatePoint, h: f64) -> DMatrix<f64> {
    let n = x.dim();
    let mut jac = DMatrix::zeros(n, n); // jac[(i, j)] = d_i theta_j
    for i in 0..n {
        let mut plus = x.coords().clone();
        let mut minus = x.coords().clone();
        plus[i] += h;
        minus[i] -= h;
        let tp = theta.at(&StatePoint(plus));
        let tm = theta.at(&StatePoint(minus));
        for j in 0..n {
            jac[(i, j)] = (tp[j] - tm[j]) / (2.0 * h);
        }
    }
    &jac - jac.transpose()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub(crate) fn checked_two_form(d: DMatrix<f64>, n: usize) -> Result<DMatrix<f64>> {
    check_dim(n, d.nrows())?;
    check_dim(n, d.ncols())?;
    if !linalg::is_antisymmetric(&d) {
        return Err(Error::NotAntisymmetric {
            defect: linalg::antisymmetry_defect(&d),
        });
    }
    Ok(d)
}

/// Flat matrix `D^T + sum_k c_k c_k^T`.
pub fn flat_matrix_from(d: &DMatrix<f64>, covectors: &[&Covector]) -> DMatrix<f64> {
    let mut f = d.transpose();
    for c in covectors {
        f.ger(1.0, c.comps(), c.comps(), 1.0);
    }
    f
}
