//! Fast evaluation of Hamiltonian and evolution fields along a trajectory.
//!
//! When the two-form is constant, the flat matrix differs from its value at a
//! reference point only through the rank-one terms `c c^T` of the covectors.
//! [`PreparedFlat`] factors the reference matrix once and handles the change
//! with a Woodbury update, so each solve costs `O(n^2)` instead of `O(n^3)`.
//! Non-constant two-forms fall back to the direct pointwise operations.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, LU};

use crate::cocontact::{cocontact_hamiltonian_vf, CocontactStructure};
use crate::contact::{hamiltonian_vector_field, ContactStructure};
use crate::cosymplectic::{evolution_vector_field, CosymplecticStructure};
use crate::error::{Error, Result};
use crate::forms::{check_dim, checked_two_form, flat_matrix_from, Covector, OneForm, StatePoint, TwoForm};
use crate::hamiltonian::HamiltonianSystem;
use crate::linalg::{self, numerical_rank, rank_tolerance};

/// Tolerance handed to the direct operations on the fallback path.
const FALLBACK_TOL: f64 = 1e-8;

/// LU factors of `D^T + sum_k c_k^0 (c_k^0)^T` for a constant `D`.
#[derive(Clone, Debug)]
pub struct PreparedFlat {
    d_t: DMatrix<f64>,
    reference: Vec<Covector>,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl PreparedFlat {
    pub fn new(d: &DMatrix<f64>, reference: Vec<Covector>) -> Result<Self> {
        let n = d.nrows();
        let d = checked_two_form(d.clone(), n)?;
        for c in &reference {
            check_dim(n, c.dim())?;
        }
        let refs: Vec<&Covector> = reference.iter().collect();
        let f0 = flat_matrix_from(&d, &refs);
        let rank = numerical_rank(&f0, rank_tolerance(n));
        if rank < n {
            return Err(Error::RankDeficient {
                rank,
                dim: n,
                context: "reference flat map",
            });
        }
        Ok(Self {
            d_t: d.transpose(),
            reference,
            lu: f0.lu(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d_t.nrows()
    }

    /// Solve `F x = b` for every column `b` of `rhs`, where `F` uses the
    /// current covectors (same order as the reference).
    pub fn solve(&self, current: &[&Covector], rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let singular = || Error::RankDeficient {
            rank: 0,
            dim: self.dim(),
            context: "flat map update",
        };
        let mut u_cols = Vec::new();
        let mut v_cols = Vec::new();
        for (c, c0) in current.iter().zip(&self.reference) {
            if c.comps() != c0.comps() {
                u_cols.push(c.comps().clone());
                u_cols.push(c0.comps().clone());
                v_cols.push(c.comps().clone());
                v_cols.push(-c0.comps());
            }
        }
        let base = self.lu.solve(rhs).ok_or_else(singular)?;
        if u_cols.is_empty() {
            return Ok(base);
        }
        let u = DMatrix::from_columns(&u_cols);
        let v = DMatrix::from_columns(&v_cols);
        let f0_inv_u = self.lu.solve(&u).ok_or_else(singular)?;
        let mut cap = v.transpose() * &f0_inv_u;
        for i in 0..cap.nrows() {
            cap[(i, i)] += 1.0;
        }
        let correction = cap.lu().solve(&(v.transpose() * &base)).ok_or_else(singular)?;
        let x = base - f0_inv_u * correction;
        // Reject updates that lost accuracy against the assembled matrix.
        let f = flat_matrix_with(&self.d_t, current);
        let residual = rhs - &f * &x;
        let scale = rhs.amax().max(1.0);
        if residual.amax() > 1e-9 * scale * (1.0 + x.amax()) {
            return Err(singular());
        }
        Ok(x)
    }
}

fn flat_matrix_with(d_t: &DMatrix<f64>, covectors: &[&Covector]) -> DMatrix<f64> {
    let mut f = d_t.clone();
    for c in covectors {
        f.ger(1.0, c.comps(), c.comps(), 1.0);
    }
    f
}

type FieldFn = dyn Fn(&StatePoint) -> Result<DVector<f64>> + Send + Sync;

/// A vector field ready for integration.
#[derive(Clone)]
pub struct FlowField {
    dim: usize,
    eval: Arc<FieldFn>,
}

impl std::fmt::Debug for FlowField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FlowField").field("dim", &self.dim).finish()
    }
}

impl FlowField {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&StatePoint) -> Result<DVector<f64>> + Send + Sync + 'static,
    {
        Self { dim, eval: Arc::new(f) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &StatePoint) -> Result<DVector<f64>> {
        check_dim(self.dim, x.dim())?;
        (self.eval)(x)
    }
}

fn covector_at(form: &OneForm, n: usize, x: &StatePoint) -> Result<Covector> {
    let c = form.at(x);
    check_dim(n, c.dim())?;
    Ok(c)
}

/// Contact Hamiltonian field `X = F^{-1} dH - (dH(R) + H) R` with `R = F^{-1} eta`.
pub fn contact_flow(c: &ContactStructure, h: &HamiltonianSystem, x_ref: &StatePoint) -> Result<FlowField> {
    let n = c.dim();
    check_dim(n, h.dim())?;
    let (c, h) = (c.clone(), h.clone());
    let TwoForm::Constant(d) = c.d_eta().clone() else {
        return Ok(FlowField::new(n, move |x| hamiltonian_vector_field(&c, &h, x, FALLBACK_TOL)));
    };
    let prepared = PreparedFlat::new(&d, vec![c.eta_at(x_ref)?])?;
    let eta_form = c.eta().clone();
    Ok(FlowField::new(n, move |x| {
        let eta = covector_at(&eta_form, n, x)?;
        let dh = h.gradient(x)?;
        let sol = prepared.solve(&[&eta], &DMatrix::from_columns(&[eta.comps().clone(), dh.comps().clone()]))?;
        let (r, base) = (sol.column(0), sol.column(1));
        Ok(base - r * (dh.pair(&r.into_owned()) + h.value(x)))
    }))
}

/// Evolution field `E = F^{-1} dH + (1 - dH(R)) R` with `R = F^{-1} theta`.
pub fn cosymplectic_flow(s: &CosymplecticStructure, h: &HamiltonianSystem, x_ref: &StatePoint) -> Result<FlowField> {
    let n = s.dim();
    check_dim(n, h.dim())?;
    let (s, h) = (s.clone(), h.clone());
    let TwoForm::Constant(w) = s.omega().clone() else {
        return Ok(FlowField::new(n, move |x| evolution_vector_field(&s, &h, x, FALLBACK_TOL)));
    };
    let prepared = PreparedFlat::new(&w, vec![s.theta_at(x_ref)?])?;
    let theta_form = s.theta().clone();
    Ok(FlowField::new(n, move |x| {
        let theta = covector_at(&theta_form, n, x)?;
        let dh = h.gradient(x)?;
        let sol = prepared.solve(&[&theta], &DMatrix::from_columns(&[theta.comps().clone(), dh.comps().clone()]))?;
        let (r, base) = (sol.column(0).into_owned(), sol.column(1).into_owned());
        Ok(base + &r * (1.0 - dh.pair(&r)))
    }))
}

/// Cocontact field `X = F^{-1} dH - (dH(R_z) + H) R_z + (1 - dH(R_t)) R_t`.
pub fn cocontact_flow(s: &CocontactStructure, h: &HamiltonianSystem, x_ref: &StatePoint) -> Result<FlowField> {
    let n = s.dim();
    check_dim(n, h.dim())?;
    let (s, h) = (s.clone(), h.clone());
    let TwoForm::Constant(d) = s.d_eta().clone() else {
        return Ok(FlowField::new(n, move |x| cocontact_hamiltonian_vf(&s, &h, x, FALLBACK_TOL)));
    };
    let prepared = PreparedFlat::new(&d, vec![s.theta_at(x_ref)?, s.eta_at(x_ref)?])?;
    let (theta_form, eta_form) = (s.theta().clone(), s.eta().clone());
    Ok(FlowField::new(n, move |x| {
        let theta = covector_at(&theta_form, n, x)?;
        let eta = covector_at(&eta_form, n, x)?;
        let dh = h.gradient(x)?;
        let rhs = DMatrix::from_columns(&[theta.comps().clone(), eta.comps().clone(), dh.comps().clone()]);
        let sol = prepared.solve(&[&theta, &eta], &rhs)?;
        let (rt, rz) = (sol.column(0).into_owned(), sol.column(1).into_owned());
        let base = sol.column(2).into_owned();
        Ok(base - &rz * (dh.pair(&rz) + h.value(x)) + &rt * (1.0 - dh.pair(&rt)))
    }))
}

/// Symplectic Hamiltonian field: `iota_X omega = dH`, i.e. `omega^T X = dH`.
pub fn symplectic_field(omega: &DMatrix<f64>, dh: &Covector) -> Result<DVector<f64>> {
    let n = omega.nrows();
    check_dim(n, dh.dim())?;
    linalg::lu_solve(&omega.transpose(), dh.comps(), "symplectic flat map")
}

/// Symplectic flow for a constant `omega`.
pub fn symplectic_flow(omega: &DMatrix<f64>, h: &HamiltonianSystem) -> Result<FlowField> {
    let n = omega.nrows();
    check_dim(n, h.dim())?;
    let prepared = PreparedFlat::new(omega, Vec::new())?;
    let h = h.clone();
    Ok(FlowField::new(n, move |x| {
        let dh = h.gradient(x)?;
        let sol = prepared.solve(&[], &DMatrix::from_columns(&[dh.comps().clone()]))?;
        Ok(sol.column(0).into_owned())
    }))
}
