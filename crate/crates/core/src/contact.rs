//! Contact structures on finite-dimensional spaces.
//!
//! A one-form `eta` with `d eta` degenerate is contact at a point when any of
//! the three equivalent conditions holds:
//!
//! 1. `T_x M = ker eta + ker d eta` as a direct sum,
//! 2. `d eta` restricted to `ker eta` has trivial kernel,
//! 3. the flat map `v -> iota_v d eta + eta(v) eta` is injective.
//!
//! In odd dimension an antisymmetric matrix always has a kernel, so the
//! degeneracy of `d eta` is never checked separately.
//! [`verify_contact_pointwise`] computes all three conditions independently so
//! that their agreement can be audited.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forms::{check_dim, checked_two_form, flat_matrix_from, Covector, OneForm, StatePoint, TwoForm};
use crate::hamiltonian::HamiltonianSystem;
use crate::linalg::{self, lstsq_qr, numerical_rank, rank_tolerance, row, vstack};

/// A one-form `eta` together with its exterior derivative `d eta`.
#[derive(Clone, Debug)]
pub struct ContactStructure {
    dim: usize,
    eta: OneForm,
    d_eta: TwoForm,
}

impl ContactStructure {
    /// Constant parts are checked for shape and antisymmetry here; pointwise
    /// evaluators are checked on every evaluation.
    pub fn new(dim: usize, eta: OneForm, d_eta: TwoForm) -> Result<Self> {
        if let OneForm::Constant(c) = &eta {
            check_dim(dim, c.dim())?;
        }
        if let TwoForm::Constant(d) = &d_eta {
            checked_two_form(d.clone(), dim)?;
        }
        Ok(Self { dim, eta, d_eta })
    }

    /// Standard structure on `R^{2k+1}` with coordinates
    /// `(q_1, p_1, ..., q_k, p_k, z)` and `eta = dz - sum_i p_i dq_i`.
    pub fn canonical(k: usize) -> Self {
        let n = 2 * k + 1;
        let eta = OneForm::field(move |x| {
            let mut c = DVector::zeros(n);
            for i in 0..k {
                c[2 * i] = -x[2 * i + 1];
            }
            c[n - 1] = 1.0;
            Covector::new(c).expect("finite state gives finite covector")
        });
        let mut d = DMatrix::zeros(n, n);
        d.view_mut((0, 0), (2 * k, 2 * k))
            .copy_from(&crate::forms::darboux_matrix(k, 1.0));
        Self {
            dim: n,
            eta,
            d_eta: TwoForm::Constant(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eta(&self) -> &OneForm {
        &self.eta
    }

    pub fn d_eta(&self) -> &TwoForm {
        &self.d_eta
    }

    pub fn eta_at(&self, x: &StatePoint) -> Result<Covector> {
        check_dim(self.dim, x.dim())?;
        let c = self.eta.at(x);
        check_dim(self.dim, c.dim())?;
        Ok(c)
    }

    pub fn d_eta_at(&self, x: &StatePoint) -> Result<DMatrix<f64>> {
        check_dim(self.dim, x.dim())?;
        checked_two_form(self.d_eta.at(x), self.dim)
    }

    /// Matrix of the flat map at `x`: `-D + eta eta^T`.
    pub fn flat_matrix(&self, x: &StatePoint) -> Result<DMatrix<f64>> {
        let eta = self.eta_at(x)?;
        let d = self.d_eta_at(x)?;
        Ok(flat_matrix_from(&d, &[&eta]))
    }

    /// Replace `eta` (keeping `d eta`); used for injected corruptions.
    pub fn with_eta(&self, eta: OneForm) -> Self {
        Self {
            dim: self.dim,
            eta,
            d_eta: self.d_eta.clone(),
        }
    }

    pub fn with_d_eta(&self, d_eta: TwoForm) -> Self {
        Self {
            dim: self.dim,
            eta: self.eta.clone(),
            d_eta,
        }
    }
}

/// Outcome of a pointwise contactness check.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub dim: usize,
    pub dim_ker_deta: usize,
    pub dim_ker_eta: usize,
    pub dim_intersection: usize,
    pub flat_rank: usize,
    /// Largest entry of `|D + D^T|`; a non-antisymmetric input never passes.
    pub antisymmetry_defect: f64,
    pub passes: bool,
    pub tolerance_used: f64,
}

impl VerificationReport {
    /// The kernel split (one-dimensional `ker d eta` meeting `ker eta` trivially) holds exactly when the flat map is invertible.
    pub fn conditions_agree(&self) -> bool {
        let split = self.dim_ker_deta == 1 && self.dim_intersection == 0;
        split == (self.flat_rank == self.dim)
    }
}

pub(crate) fn verify_pair(c: &Covector, d: &DMatrix<f64>, tol: f64) -> VerificationReport {
    let n = c.dim();
    let defect = linalg::antisymmetry_defect(d);
    let antisymmetric = linalg::is_antisymmetric(d);
    let dim_ker_deta = n - numerical_rank(d, tol);
    let dim_ker_eta = n - numerical_rank(&row(c.comps()), tol);
    let stacked = vstack(&[&row(c.comps()), &d.transpose()]);
    let dim_intersection = n - numerical_rank(&stacked, tol);
    let flat_rank = numerical_rank(&flat_matrix_from(d, &[c]), tol);
    let passes = antisymmetric && dim_ker_deta == 1 && dim_intersection == 0 && flat_rank == n;
    VerificationReport {
        dim: n,
        dim_ker_deta,
        dim_ker_eta,
        dim_intersection,
        flat_rank,
        antisymmetry_defect: defect,
        passes,
        tolerance_used: tol,
    }
}

/// Solve `c(R) = 1`, `iota_R D = 0` as a stacked least-squares system.
pub(crate) fn reeb_solve(c: &Covector, d: &DMatrix<f64>, tol: f64, context: &'static str) -> Result<DVector<f64>> {
    let n = c.dim();
    let a = vstack(&[&row(c.comps()), &d.transpose()]);
    let rank = numerical_rank(&a, rank_tolerance(n + 1));
    if rank < n {
        return Err(Error::RankDeficient { rank, dim: n, context });
    }
    let mut b = DVector::zeros(n + 1);
    b[0] = 1.0;
    let r = lstsq_qr(&a, &b).ok_or(Error::RankDeficient { rank, dim: n, context })?;
    let residual = (&a * &r - &b).amax();
    if !(residual <= tol * (1.0 + a.amax() * r.amax())) {
        // Full column rank but inconsistent: no Reeb field exists.
        return Err(Error::RankDeficient { rank, dim: n, context });
    }
    Ok(r)
}

/// `v -> iota_v d eta + eta(v) eta` at `x`.
pub fn flat_map(c: &ContactStructure, x: &StatePoint, v: &DVector<f64>) -> Result<Covector> {
    check_dim(c.dim, v.len())?;
    Covector::new(c.flat_matrix(x)? * v)
}

/// The Reeb field: `eta(R) = 1`, `iota_R d eta = 0`.
pub fn reeb(c: &ContactStructure, x: &StatePoint, tol: f64) -> Result<DVector<f64>> {
    let eta = c.eta_at(x)?;
    let d = c.d_eta_at(x)?;
    reeb_solve(&eta, &d, tol, "Reeb system")
}

/// The contact Hamiltonian vector field, the unique solution of
/// `flat(X) = dH - (R(H) + H) eta`. The conformal factor of `L_X eta = f eta`
/// is `f = -R(H)`.
pub fn hamiltonian_vector_field(
    c: &ContactStructure,
    h: &HamiltonianSystem,
    x: &StatePoint,
    tol: f64,
) -> Result<DVector<f64>> {
    check_dim(c.dim, h.dim())?;
    let eta = c.eta_at(x)?;
    let d = c.d_eta_at(x)?;
    let r = reeb_solve(&eta, &d, tol, "Reeb system")?;
    let dh = h.gradient(x)?;
    let hx = h.value(x);
    let rh = dh.pair(&r);
    let rhs = dh.comps() - eta.comps() * (rh + hx);
    let f = flat_matrix_from(&d, &[&eta]);
    let xh = linalg::lu_solve(&f, &rhs, "contact flat map")?;

    let scale = hx.abs().max(1.0);
    let eta_residual = (eta.pair(&xh) + hx).abs();
    if !(eta_residual <= tol * scale) {
        return Err(Error::ResidualTooLarge {
            context: "eta(X_H) = -H",
            residual: eta_residual,
            tol,
        });
    }
    let flat_residual = (&f * &xh - &rhs).amax();
    if !(flat_residual <= tol * rhs.amax().max(1.0)) {
        return Err(Error::ResidualTooLarge {
            context: "flat(X_H) = dH - (R(H) + H) eta",
            residual: flat_residual,
            tol,
        });
    }
    Ok(xh)
}

/// Pointwise contactness check by singular-value thresholding at relative
/// tolerance `tol` (see [`linalg::rank_tolerance`] for the default).
pub fn verify_contact_pointwise(c: &ContactStructure, x: &StatePoint, tol: f64) -> Result<VerificationReport> {
    let eta = c.eta_at(x)?;
    check_dim(c.dim, x.dim())?;
    let d = c.d_eta.at(x);
    check_dim(c.dim, d.nrows())?;
    check_dim(c.dim, d.ncols())?;
    Ok(verify_pair(&eta, &d, tol))
}
