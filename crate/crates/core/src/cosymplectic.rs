//! Cosymplectic structures `(theta, omega)`: a closed one-form and a closed
//! two-form whose flat map `v -> iota_v omega + theta(v) theta` is invertible.

use nalgebra::{DMatrix, DVector};

use crate::contact::{reeb_solve, verify_pair, VerificationReport};
use crate::error::{Error, Result};
use crate::forms::{check_dim, checked_two_form, flat_matrix_from, Covector, OneForm, StatePoint, TwoForm};
use crate::hamiltonian::HamiltonianSystem;
use crate::linalg;

#[derive(Clone, Debug)]
pub struct CosymplecticStructure {
    dim: usize,
    theta: OneForm,
    omega: TwoForm,
}

impl CosymplecticStructure {
    pub fn new(dim: usize, theta: OneForm, omega: TwoForm) -> Result<Self> {
        if let OneForm::Constant(c) = &theta {
            check_dim(dim, c.dim())?;
        }
        if let TwoForm::Constant(d) = &omega {
            checked_two_form(d.clone(), dim)?;
        }
        Ok(Self { dim, theta, omega })
    }

    /// `theta = dt`, `omega = sum dq_i ^ dp_i` on `(t, q_1, p_1, ..., q_k, p_k)`.
    pub fn canonical(k: usize) -> Self {
        let n = 2 * k + 1;
        let mut omega = DMatrix::zeros(n, n);
        omega
            .view_mut((1, 1), (2 * k, 2 * k))
            .copy_from(&crate::forms::darboux_matrix(k, 1.0));
        Self {
            dim: n,
            theta: OneForm::Constant(Covector::basis(n, 0)),
            omega: TwoForm::Constant(omega),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> &OneForm {
        &self.theta
    }

    pub fn omega(&self) -> &TwoForm {
        &self.omega
    }

    pub fn theta_at(&self, x: &StatePoint) -> Result<Covector> {
        check_dim(self.dim, x.dim())?;
        let c = self.theta.at(x);
        check_dim(self.dim, c.dim())?;
        Ok(c)
    }

    pub fn omega_at(&self, x: &StatePoint) -> Result<DMatrix<f64>> {
        check_dim(self.dim, x.dim())?;
        checked_two_form(self.omega.at(x), self.dim)
    }

    pub fn flat_matrix(&self, x: &StatePoint) -> Result<DMatrix<f64>> {
        Ok(flat_matrix_from(&self.omega_at(x)?, &[&self.theta_at(x)?]))
    }

    pub fn with_theta(&self, theta: OneForm) -> Self {
        Self {
            theta,
            ..self.clone()
        }
    }

    pub fn with_omega(&self, omega: TwoForm) -> Self {
        Self {
            omega,
            ..self.clone()
        }
    }
}

/// `v -> iota_v omega + theta(v) theta` at `x`.
pub fn flat_cosym(s: &CosymplecticStructure, x: &StatePoint, v: &DVector<f64>) -> Result<Covector> {
    check_dim(s.dim, v.len())?;
    Covector::new(s.flat_matrix(x)? * v)
}

/// `theta(R) = 1`, `iota_R omega = 0`.
pub fn reeb_cosym(s: &CosymplecticStructure, x: &StatePoint, tol: f64) -> Result<DVector<f64>> {
    reeb_solve(&s.theta_at(x)?, &s.omega_at(x)?, tol, "cosymplectic Reeb system")
}

/// The evolution field: `flat(E_H) = dH + (1 - R(H)) theta`. Contracting with
/// `R` forces `theta(E_H) = 1`, which is checked against `tol`.
pub fn evolution_vector_field(
    s: &CosymplecticStructure,
    h: &HamiltonianSystem,
    x: &StatePoint,
    tol: f64,
) -> Result<DVector<f64>> {
    check_dim(s.dim, h.dim())?;
    let theta = s.theta_at(x)?;
    let omega = s.omega_at(x)?;
    let r = reeb_solve(&theta, &omega, tol, "cosymplectic Reeb system")?;
    let dh = h.gradient(x)?;
    let rhs = dh.comps() + theta.comps() * (1.0 - dh.pair(&r));
    let f = flat_matrix_from(&omega, &[&theta]);
    let e = linalg::lu_solve(&f, &rhs, "cosymplectic flat map")?;
    let theta_residual = (theta.pair(&e) - 1.0).abs();
    if !(theta_residual <= tol) {
        return Err(Error::ResidualTooLarge {
            context: "theta(E_H) = 1",
            residual: theta_residual,
            tol,
        });
    }
    Ok(e)
}

/// Rank checks of [`crate::verify_contact_pointwise`] with `(theta, omega)` in
/// place of `(eta, d eta)`.
pub fn verify_almost_contact(s: &CosymplecticStructure, x: &StatePoint, tol: f64) -> Result<VerificationReport> {
    let theta = s.theta_at(x)?;
    let omega = s.omega.at(x);
    check_dim(s.dim, omega.nrows())?;
    check_dim(s.dim, omega.ncols())?;
    Ok(verify_pair(&theta, &omega, tol))
}

/// Finite-difference closedness defects, diagnostic only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosednessProbe {
    /// Largest entry of `d theta`.
    pub d_theta: f64,
    /// Largest entry of `d omega`.
    pub d_omega: f64,
}

pub fn closedness_probe(s: &CosymplecticStructure, x: &StatePoint, h: f64) -> Result<ClosednessProbe> {
    check_dim(s.dim, x.dim())?;
    let d_theta = crate::forms::exterior_derivative(&s.theta, x, h).amax();
    let d_omega = two_form_derivative_defect(&s.omega, x, h);
    Ok(ClosednessProbe { d_theta, d_omega })
}

/// `max |d_i w_jk + d_j w_ki + d_k w_ij|` by central differences.
pub(crate) fn two_form_derivative_defect(w: &TwoForm, x: &StatePoint, h: f64) -> f64 {
    if w.is_constant() {
        return 0.0;
    }
    let n = x.dim();
    let partials: Vec<DMatrix<f64>> = (0..n)
        .map(|i| {
            let mut plus = x.coords().clone();
            let mut minus = x.coords().clone();
            plus[i] += h;
            minus[i] -= h;
            let wp = w.at(&StatePoint::new(plus).expect("finite"));
            let wm = w.at(&StatePoint::new(minus).expect("finite"));
            (wp - wm) / (2.0 * h)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let v = partials[i][(j, k)] + partials[j][(k, i)] + partials[k][(i, j)];
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank_tolerance;

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn flat_examples() {
        let s = CosymplecticStructure::canonical(1);
        let x = StatePoint::zeros(3);
        assert_eq!(flat_cosym(&s, &x, &e(3, 0)).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(flat_cosym(&s, &x, &e(3, 1)).unwrap().as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn reeb_is_dt_and_scales_inversely() {
        let s = CosymplecticStructure::canonical(2);
        let x = StatePoint::zeros(5);
        assert!((reeb_cosym(&s, &x, 1e-12).unwrap() - e(5, 0)).amax() < 1e-15);
        let scaled = s.with_theta(OneForm::Constant(Covector::new(e(5, 0) * 2.0).unwrap()));
        assert!((reeb_cosym(&scaled, &x, 1e-12).unwrap() - e(5, 0) * 0.5).amax() < 1e-15);
    }

    #[test]
    fn zero_hamiltonian_evolves_along_reeb() {
        let s = CosymplecticStructure::canonical(1);
        let h = HamiltonianSystem::constant(3, 0.0);
        let x = StatePoint::from_slice(&[0.5, 1.0, -2.0]).unwrap();
        let field = evolution_vector_field(&s, &h, &x, 1e-12).unwrap();
        assert!((field - e(3, 0)).amax() < 1e-15);
    }

    #[test]
    fn time_dependent_oscillator() {
        // H = t q + p^2/2: q' = p, p' = -t, t' = 1.
        let s = CosymplecticStructure::canonical(1);
        let h = HamiltonianSystem::new(3, |x| x[0] * x[1] + 0.5 * x[2] * x[2]);
        let x = StatePoint::from_slice(&[2.0, 1.0, 3.0]).unwrap();
        let field = evolution_vector_field(&s, &h, &x, 1e-8).unwrap();
        let expected = [1.0, 3.0, -2.0];
        for i in 0..3 {
            assert!((field[i] - expected[i]).abs() < 1e-8, "{field}");
        }
    }

    #[test]
    fn verification_pass_and_fail() {
        let s = CosymplecticStructure::canonical(2);
        let x = StatePoint::zeros(5);
        let ok = verify_almost_contact(&s, &x, rank_tolerance(5)).unwrap();
        assert!(ok.passes && ok.conditions_agree());
        let dead = s.with_omega(TwoForm::Constant(DMatrix::zeros(5, 5)));
        let bad = verify_almost_contact(&dead, &x, rank_tolerance(5)).unwrap();
        assert!(!bad.passes && bad.conditions_agree());
        assert!(matches!(reeb_cosym(&dead, &x, 1e-10), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn closedness_probe_sees_non_closed_forms() {
        let s = CosymplecticStructure::canonical(1);
        let x = StatePoint::from_slice(&[0.1, 0.2, 0.3]).unwrap();
        let p = closedness_probe(&s, &x, 1e-5).unwrap();
        assert_eq!((p.d_theta, p.d_omega), (0.0, 0.0));
        // theta = q dt is not closed; omega scaled by (1 + t) is not closed.
        let bent = s
            .with_theta(OneForm::field(|x| Covector::from_slice(&[x[1], 0.0, 0.0]).unwrap()))
            .with_omega(TwoForm::field(|x| {
                let mut m = DMatrix::zeros(3, 3);
                m[(1, 2)] = 1.0 + x[0];
                m[(2, 1)] = -1.0 - x[0];
                m
            }));
        let p = closedness_probe(&bent, &x, 1e-5).unwrap();
        assert!((p.d_theta - 1.0).abs() < 1e-8);
        assert!((p.d_omega - 1.0).abs() < 1e-8);
    }
}
