//! Cocontact structures `(theta, eta)`: a closed time form `theta` together
//! with a contact-like form `eta`, with flat map
//! `v -> theta(v) theta + iota_v d eta + eta(v) eta`.
//!
//! Distributions used by the verification:
//! `Hor_t = ker theta`, `Hor_z = ker eta`, `Hor_tz = Hor_t ∩ Hor_z`,
//! `Ver = ker d eta`, `Ver_t = Ver ∩ Hor_z`, `Ver_z = Ver ∩ Hor_t`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forms::{check_dim, checked_two_form, flat_matrix_from, Covector, OneForm, StatePoint, TwoForm};
use crate::hamiltonian::HamiltonianSystem;
use crate::linalg::{self, null_space, numerical_rank, row, vstack};

#[derive(Clone, Debug)]
pub struct CocontactStructure {
    dim: usize,
    theta: OneForm,
    eta: OneForm,
    d_eta: TwoForm,
}

impl CocontactStructure {
    pub fn new(dim: usize, theta: OneForm, eta: OneForm, d_eta: TwoForm) -> Result<Self> {
        for c in [&theta, &eta] {
            if let OneForm::Constant(c) = c {
                check_dim(dim, c.dim())?;
            }
        }
        if let TwoForm::Constant(d) = &d_eta {
            checked_two_form(d.clone(), dim)?;
        }
        Ok(Self { dim, theta, eta, d_eta })
    }

    /// `(t, q_1, p_1, ..., q_k, p_k, z)` with `theta = dt`, `eta = dz - sum p_i dq_i`.
    pub fn canonical(k: usize) -> Self {
        let n = 2 * k + 2;
        let eta = OneForm::field(move |x| {
            let mut c = DVector::zeros(n);
            for i in 0..k {
                c[1 + 2 * i] = -x[2 + 2 * i];
            }
            c[n - 1] = 1.0;
            Covector::new(c).expect("finite")
        });
        let mut d = DMatrix::zeros(n, n);
        d.view_mut((1, 1), (2 * k, 2 * k))
            .copy_from(&crate::forms::darboux_matrix(k, 1.0));
        Self {
            dim: n,
            theta: OneForm::Constant(Covector::basis(n, 0)),
            eta,
            d_eta: TwoForm::Constant(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> &OneForm {
        &self.theta
    }

    pub fn eta(&self) -> &OneForm {
        &self.eta
    }

    pub fn d_eta(&self) -> &TwoForm {
        &self.d_eta
    }

    pub fn theta_at(&self, x: &StatePoint) -> Result<Covector> {
        one_form_at(&self.theta, self.dim, x)
    }

    pub fn eta_at(&self, x: &StatePoint) -> Result<Covector> {
        one_form_at(&self.eta, self.dim, x)
    }

    pub fn d_eta_at(&self, x: &StatePoint) -> Result<DMatrix<f64>> {
        check_dim(self.dim, x.dim())?;
        checked_two_form(self.d_eta.at(x), self.dim)
    }

    pub fn flat_matrix(&self, x: &StatePoint) -> Result<DMatrix<f64>> {
        Ok(flat_matrix_from(&self.d_eta_at(x)?, &[&self.theta_at(x)?, &self.eta_at(x)?]))
    }

    pub fn with_theta(&self, theta: OneForm) -> Self {
        Self {
            theta,
            ..self.clone()
        }
    }

    pub fn with_eta(&self, eta: OneForm) -> Self {
        Self { eta, ..self.clone() }
    }

    pub fn with_d_eta(&self, d_eta: TwoForm) -> Self {
        Self {
            d_eta,
            ..self.clone()
        }
    }
}

fn one_form_at(form: &OneForm, n: usize, x: &StatePoint) -> Result<Covector> {
    check_dim(n, x.dim())?;
    let c = form.at(x);
    check_dim(n, c.dim())?;
    Ok(c)
}

pub fn flat_cocontact(s: &CocontactStructure, x: &StatePoint, v: &DVector<f64>) -> Result<Covector> {
    check_dim(s.dim, v.len())?;
    Covector::new(s.flat_matrix(x)? * v)
}

fn checked_solve(f: &DMatrix<f64>, rhs: &DVector<f64>, tol: f64, context: &'static str) -> Result<DVector<f64>> {
    let v = linalg::lu_solve(f, rhs, context)?;
    let residual = (f * &v - rhs).amax();
    if !(residual <= tol * rhs.amax().max(1.0)) {
        return Err(Error::ResidualTooLarge { context, residual, tol });
    }
    Ok(v)
}

/// `R_t = flat^{-1}(theta)` and `R_z = flat^{-1}(eta)`.
pub fn reeb_pair(s: &CocontactStructure, x: &StatePoint, tol: f64) -> Result<(DVector<f64>, DVector<f64>)> {
    let f = s.flat_matrix(x)?;
    let rt = checked_solve(&f, s.theta_at(x)?.comps(), tol, "cocontact Reeb pair")?;
    let rz = checked_solve(&f, s.eta_at(x)?.comps(), tol, "cocontact Reeb pair")?;
    Ok((rt, rz))
}

/// Solve `flat(X_H) = dH - (R_z(H) + H) eta + (1 - R_t(H)) theta`, then check
/// `theta(X_H) = 1` and `eta(X_H) = -H`.
pub fn cocontact_hamiltonian_vf(
    s: &CocontactStructure,
    h: &HamiltonianSystem,
    x: &StatePoint,
    tol: f64,
) -> Result<DVector<f64>> {
    check_dim(s.dim, h.dim())?;
    let theta = s.theta_at(x)?;
    let eta = s.eta_at(x)?;
    let f = flat_matrix_from(&s.d_eta_at(x)?, &[&theta, &eta]);
    let rt = checked_solve(&f, theta.comps(), tol, "cocontact Reeb pair")?;
    let rz = checked_solve(&f, eta.comps(), tol, "cocontact Reeb pair")?;
    let dh = h.gradient(x)?;
    let hx = h.value(x);
    let rhs = dh.comps() - eta.comps() * (dh.pair(&rz) + hx) + theta.comps() * (1.0 - dh.pair(&rt));
    let xh = checked_solve(&f, &rhs, tol, "cocontact flat map")?;

    let theta_residual = (theta.pair(&xh) - 1.0).abs();
    if !(theta_residual <= tol) {
        return Err(Error::ResidualTooLarge {
            context: "theta(X_H) = 1",
            residual: theta_residual,
            tol,
        });
    }
    let eta_residual = (eta.pair(&xh) + hx).abs();
    if !(eta_residual <= tol * hx.abs().max(1.0)) {
        return Err(Error::ResidualTooLarge {
            context: "eta(X_H) = -H",
            residual: eta_residual,
            tol,
        });
    }
    Ok(xh)
}

/// Dimensions of the splitting `TM = Hor_tz + Ver_t + Ver_z` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct CocontactReport {
    pub dim: usize,
    pub dim_hor_tz: usize,
    pub dim_ver_t: usize,
    pub dim_ver_z: usize,
    pub dim_hor_tz_ver_t: usize,
    pub dim_hor_tz_ver_z: usize,
    pub dim_ver_t_ver_z: usize,
    /// Dimension of `Hor_tz + Ver_t + Ver_z`.
    pub dim_sum: usize,
    pub flat_rank: usize,
    pub antisymmetry_defect: f64,
    /// `d eta` is degenerate on `Hor_t` and on `Hor_z` (`dim Ver_t, dim Ver_z >= 1`).
    pub degeneracy_holds: bool,
    /// The direct-sum condition on its own.
    pub splits: bool,
    pub passes: bool,
    pub tolerance_used: f64,
}

impl CocontactReport {
    /// The direct-sum condition holds exactly when the flat map is invertible.
    pub fn conditions_agree(&self) -> bool {
        self.splits == (self.flat_rank == self.dim)
    }
}

pub fn verify_cocontact(s: &CocontactStructure, x: &StatePoint, tol: f64) -> Result<CocontactReport> {
    let theta = s.theta_at(x)?;
    let eta = s.eta_at(x)?;
    let d = s.d_eta.at(x);
    check_dim(s.dim, d.nrows())?;
    check_dim(s.dim, d.ncols())?;
    Ok(cocontact_report(&theta, &eta, &d, tol))
}

pub(crate) fn cocontact_report(theta: &Covector, eta: &Covector, d: &DMatrix<f64>, tol: f64) -> CocontactReport {
    let n = theta.dim();
    let (t, e) = (row(theta.comps()), row(eta.comps()));
    let dt = d.transpose();
    let kernel = |rows: &[&DMatrix<f64>]| null_space(&vstack(rows), tol);

    let hor_tz = kernel(&[&t, &e]);
    let ver_t = kernel(&[&e, &dt]);
    let ver_z = kernel(&[&t, &dt]);
    // Every pairwise intersection is Hor_tz ∩ Ver = ker [theta; eta; D^T].
    let common = n - numerical_rank(&vstack(&[&t, &e, &dt]), tol);
    let dim_sum = if n == 0 {
        0
    } else {
        let mut cols = Vec::new();
        for b in [&hor_tz, &ver_t, &ver_z] {
            cols.extend(b.column_iter().map(|c| c.into_owned()));
        }
        if cols.is_empty() {
            0
        } else {
            numerical_rank(&DMatrix::from_columns(&cols), tol)
        }
    };
    let (dim_hor_tz, dim_ver_t, dim_ver_z) = (hor_tz.ncols(), ver_t.ncols(), ver_z.ncols());
    let splits = dim_hor_tz + dim_ver_t + dim_ver_z == n && dim_sum == n && common == 0;
    let flat_rank = numerical_rank(&flat_matrix_from(d, &[theta, eta]), tol);
    let antisymmetric = linalg::is_antisymmetric(d);
    CocontactReport {
        dim: n,
        dim_hor_tz,
        dim_ver_t,
        dim_ver_z,
        dim_hor_tz_ver_t: common,
        dim_hor_tz_ver_z: common,
        dim_ver_t_ver_z: common,
        dim_sum,
        flat_rank,
        antisymmetry_defect: linalg::antisymmetry_defect(d),
        degeneracy_holds: dim_ver_t >= 1 && dim_ver_z >= 1,
        splits,
        passes: antisymmetric && splits && flat_rank == n,
        tolerance_used: tol,
    }
}
