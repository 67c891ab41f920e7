//! Symplectic structures and the constructions built from them: symplectic
//! complements, direct sums, contactization and level sets of contact type.

use nalgebra::{DMatrix, DVector};

use crate::contact::{verify_pair, ContactStructure, VerificationReport};
use crate::error::{Error, Result};
use crate::forms::{
    check_dim, checked_two_form, darboux_matrix, exterior_derivative, Covector, OneForm, StatePoint, TwoForm,
    VectorFieldFn,
};
use crate::hamiltonian::HamiltonianSystem;
use crate::linalg::{null_space, numerical_rank, rank_tolerance, row};

/// An even-dimensional space with a two-form `omega` and optionally a
/// primitive `theta` with `d theta = omega`.
#[derive(Clone, Debug)]
pub struct SymplecticStructure {
    dim: usize,
    omega: TwoForm,
    primitive: Option<OneForm>,
}

impl SymplecticStructure {
    pub fn new(dim: usize, omega: TwoForm, primitive: Option<OneForm>) -> Result<Self> {
        if dim % 2 != 0 {
            return Err(Error::InvalidParameter(format!("symplectic dimension must be even, got {dim}")));
        }
        if let TwoForm::Constant(m) = &omega {
            checked_two_form(m.clone(), dim)?;
        }
        if let Some(OneForm::Constant(c)) = &primitive {
            check_dim(dim, c.dim())?;
        }
        Ok(Self { dim, omega, primitive })
    }

    /// `R^{2k}` with coordinates `(x_1, y_1, ..., x_k, y_k)`,
    /// `omega = sum dx_i ^ dy_i` and primitive `1/2 sum (x_i dy_i - y_i dx_i)`.
    pub fn standard(k: usize) -> Self {
        let n = 2 * k;
        let primitive = OneForm::field(move |x| {
            let mut c = DVector::zeros(n);
            for i in 0..k {
                c[2 * i] = -0.5 * x[2 * i + 1];
                c[2 * i + 1] = 0.5 * x[2 * i];
            }
            Covector::new(c).expect("finite")
        });
        Self {
            dim: n,
            omega: TwoForm::Constant(darboux_matrix(k, 1.0)),
            primitive: Some(primitive),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omega(&self) -> &TwoForm {
        &self.omega
    }

    pub fn primitive(&self) -> Option<&OneForm> {
        self.primitive.as_ref()
    }

    pub fn omega_at(&self, x: &StatePoint) -> Result<DMatrix<f64>> {
        check_dim(self.dim, x.dim())?;
        checked_two_form(self.omega.at(x), self.dim)
    }
}

/// Canonical basis of a symplectic subspace `W` and the projector onto `W`
/// along its symplectic complement.
#[derive(Clone, Debug)]
pub struct SymplecticSplitting {
    /// Pairs `(e_i, f_i)` with `omega(e_i, f_j) = delta_ij` and
    /// `omega(e_i, e_j) = omega(f_i, f_j) = 0`.
    pub pairs: Vec<(DVector<f64>, DVector<f64>)>,
    /// `P v = sum_i omega(e_i, v) f_i - omega(f_i, v) e_i`.
    pub projector: DMatrix<f64>,
}

impl SymplecticSplitting {
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.projector * v
    }

    /// Orthonormal basis of `ker P`, which is the symplectic complement of `W`.
    pub fn complement_basis(&self) -> DMatrix<f64> {
        null_space(&self.projector, rank_tolerance(self.projector.nrows()))
    }
}

/// Split `V = W + W^perp` for a symplectic subspace `W = span(w_basis)` of
/// `(V, omega)` by symplectic Gram-Schmidt with pair pivoting.
pub fn symplectic_complement(omega: &DMatrix<f64>, w_basis: &[DVector<f64>], tol: f64) -> Result<SymplecticSplitting> {
    let n = omega.nrows();
    let omega = checked_two_form(omega.clone(), n)?;
    for w in w_basis {
        check_dim(n, w.len())?;
    }
    let k = w_basis.len();
    if k % 2 != 0 {
        return Err(Error::DegenerateSubspace);
    }
    if k > 0 {
        let b = DMatrix::from_columns(w_basis);
        let gram = b.transpose() * &omega * &b;
        if numerical_rank(&gram, tol) < k {
            return Err(Error::DegenerateSubspace);
        }
    }

    let form = |u: &DVector<f64>, v: &DVector<f64>| u.dot(&(&omega * v));
    let scale = w_basis.iter().map(|w| w.amax()).fold(0.0, f64::max).powi(2) * omega.amax();
    let mut rest: Vec<DVector<f64>> = w_basis.to_vec();
    let mut pairs = Vec::with_capacity(k / 2);
    while !rest.is_empty() {
        let (mut bi, mut bj, mut best) = (0, 0, 0.0);
        for i in 0..rest.len() {
            for j in (i + 1)..rest.len() {
                let v = form(&rest[i], &rest[j]);
                if v.abs() > best {
                    (bi, bj, best) = (i, j, v.abs());
                }
            }
        }
        if !(best > tol * scale) {
            return Err(Error::DegenerateSubspace);
        }
        let e = rest[bi].clone();
        let f = &rest[bj] / form(&e, &rest[bj]);
        rest.remove(bj);
        rest.remove(bi);
        for v in rest.iter_mut() {
            let oe = form(&e, v);
            let of = form(&f, v);
            *v -= &f * oe;
            *v += &e * of;
        }
        pairs.push((e, f));
    }

    let omega_t = omega.transpose();
    let mut projector = DMatrix::zeros(n, n);
    for (e, f) in &pairs {
        projector.ger(1.0, f, &(&omega_t * e), 1.0);
        projector.ger(-1.0, e, &(&omega_t * f), 1.0);
    }
    Ok(SymplecticSplitting { pairs, projector })
}

/// Block-diagonal sum `omega_1 (+) omega_2` on concatenated coordinates.
pub fn direct_sum(s1: &SymplecticStructure, s2: &SymplecticStructure) -> SymplecticStructure {
    let (n1, n2) = (s1.dim, s2.dim);
    let n = n1 + n2;
    let split = move |x: &StatePoint| -> (StatePoint, StatePoint) {
        (
            StatePoint::new(x.rows(0, n1).into_owned()).expect("finite"),
            StatePoint::new(x.rows(n1, n2).into_owned()).expect("finite"),
        )
    };
    let block = move |a: DMatrix<f64>, b: DMatrix<f64>| {
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (n1, n1)).copy_from(&a);
        m.view_mut((n1, n1), (n2, n2)).copy_from(&b);
        m
    };
    let omega = match (&s1.omega, &s2.omega) {
        (TwoForm::Constant(a), TwoForm::Constant(b)) => TwoForm::Constant(block(a.clone(), b.clone())),
        (o1, o2) => {
            let (o1, o2) = (o1.clone(), o2.clone());
            TwoForm::field(move |x| {
                let (a, b) = split(x);
                block(o1.at(&a), o2.at(&b))
            })
        }
    };
    let primitive = match (&s1.primitive, &s2.primitive) {
        (Some(p1), Some(p2)) => {
            let (p1, p2) = (p1.clone(), p2.clone());
            Some(OneForm::field(move |x| {
                let (a, b) = split(x);
                let mut c = DVector::zeros(n);
                c.rows_mut(0, n1).copy_from(p1.at(&a).comps());
                c.rows_mut(n1, n2).copy_from(p2.at(&b).comps());
                Covector::new(c).expect("finite")
            }))
        }
        _ => None,
    };
    SymplecticStructure {
        dim: n,
        omega,
        primitive,
    }
}

/// Contact structure `eta = dz + theta` on `R x M`, with `z` as coordinate 0
/// and the original coordinates following. The Reeb field is `e_0`.
pub fn contactization(s: &SymplecticStructure) -> Result<ContactStructure> {
    let theta = s.primitive.clone().ok_or(Error::MissingPrimitive)?;
    let m = s.dim;
    if let TwoForm::Constant(omega) = &s.omega {
        for x in primitive_probe_points(m) {
            let d = exterior_derivative(&theta, &x, 1e-5);
            let defect = (&d - omega).amax();
            if !(defect <= 1e-6 * omega.amax().max(1.0)) {
                return Err(Error::PrimitiveMismatch { defect });
            }
        }
    }
    let n = m + 1;
    let tail = move |x: &StatePoint| StatePoint::new(x.rows(1, m).into_owned()).expect("finite");
    let eta = OneForm::field(move |x| {
        let mut c = DVector::zeros(n);
        c[0] = 1.0;
        c.rows_mut(1, m).copy_from(theta.at(&tail(x)).comps());
        Covector::new(c).expect("finite")
    });
    let lift = move |w: DMatrix<f64>| {
        let mut d = DMatrix::zeros(n, n);
        d.view_mut((1, 1), (m, m)).copy_from(&w);
        d
    };
    let d_eta = match &s.omega {
        TwoForm::Constant(w) => TwoForm::Constant(lift(w.clone())),
        TwoForm::Field(f) => {
            let f = f.clone();
            TwoForm::field(move |x| lift(f(&tail(x))))
        }
    };
    ContactStructure::new(n, eta, d_eta)
}

fn primitive_probe_points(m: usize) -> Vec<StatePoint> {
    let mut pts = vec![StatePoint::zeros(m)];
    let wiggle: Vec<f64> = (0..m).map(|i| 0.5 - 0.37 * i as f64 + 0.11 * (i * i % 7) as f64).collect();
    pts.push(StatePoint::from_slice(&wiggle).expect("finite"));
    pts
}

/// Restriction of `iota_Y omega` and `omega` to `T_x N`, `N = H^{-1}(level)`.
#[derive(Clone, Debug)]
pub struct LevelSetRestriction {
    /// Orthonormal basis of `T_x N = ker dH_x` as columns.
    pub tangent_basis: DMatrix<f64>,
    /// Induced contact form in tangent-basis coordinates.
    pub eta: Covector,
    /// Induced contact form as an ambient covector vanishing on the normal line.
    pub eta_ambient: Covector,
    /// `omega` restricted to `T_x N` in tangent-basis coordinates.
    pub d_eta: DMatrix<f64>,
    /// Kernel of the restricted `omega`, in ambient coordinates (columns).
    pub vertical: DMatrix<f64>,
    pub report: VerificationReport,
}

/// Check that `(N, i^* iota_Y omega)` is contact at `x`.
///
/// `d(i^* iota_Y omega) = f i^* omega` for the Liouville factor `f`; the rank
/// conditions are invariant under the nonzero scale `f`, so the restricted
/// `omega` is used directly.
pub fn contact_type_restriction(
    s: &SymplecticStructure,
    h: &HamiltonianSystem,
    y_field: &VectorFieldFn,
    x: &StatePoint,
    level: f64,
    tol: f64,
) -> Result<LevelSetRestriction> {
    let n = s.dim;
    check_dim(n, x.dim())?;
    let value = h.value(x);
    if !((value - level).abs() <= tol * level.abs().max(1.0)) {
        return Err(Error::NotOnLevelSet { value, level });
    }
    let dh = h.gradient(x)?;
    let y = y_field(x);
    check_dim(n, y.len())?;
    let omega = s.omega_at(x)?;
    let dh_y = dh.pair(&y);
    if !(dh_y.abs() > tol * dh.norm() * y.norm()) || y.norm() == 0.0 {
        return Err(Error::TangentLiouville { dh_y });
    }

    let basis = null_space(&row(dh.comps()), rank_tolerance(n));
    let iota = omega.transpose() * &y;
    let eta = Covector::new(basis.transpose() * &iota)?;
    let eta_ambient = Covector::new(&basis * eta.comps())?;
    let d_eta = basis.transpose() * &omega * &basis;
    let report = verify_pair(&eta, &d_eta, rank_tolerance(n - 1));
    let vertical = &basis * null_space(&d_eta, rank_tolerance(n - 1));
    Ok(LevelSetRestriction {
        tangent_basis: basis,
        eta,
        eta_ambient,
        d_eta,
        vertical,
        report,
    })
}

/// Least-squares Liouville factor `f` in `d(iota_Y omega) = f omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiouvilleFit {
    pub factor: f64,
    /// `|d(iota_Y omega) - f omega|_F / |omega|_F`.
    pub residual: f64,
}

/// Estimate the Liouville factor at `x` from central differences with step `h`.
pub fn liouville_factor(s: &SymplecticStructure, y_field: &VectorFieldFn, x: &StatePoint, h: f64) -> Result<LiouvilleFit> {
    let n = s.dim;
    check_dim(n, x.dim())?;
    let iota_at = |p: &StatePoint| -> Result<DVector<f64>> {
        let y = y_field(p);
        check_dim(n, y.len())?;
        Ok(s.omega_at(p)?.transpose() * y)
    };
    let mut jac = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut plus = x.coords().clone();
        let mut minus = x.coords().clone();
        plus[i] += h;
        minus[i] -= h;
        let cp = iota_at(&StatePoint::new(plus)?)?;
        let cm = iota_at(&StatePoint::new(minus)?)?;
        jac.row_mut(i).copy_from(&((cp - cm) / (2.0 * h)).transpose());
    }
    let d_iota = &jac - jac.transpose();
    let omega = s.omega_at(x)?;
    let norm2 = omega.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::DegenerateSubspace);
    }
    let factor = d_iota.dot(&omega) / norm2;
    let residual = (&d_iota - &omega * factor).norm() / norm2.sqrt();
    if !(residual <= 1e-3) {
        return Err(Error::PoorFit { residual });
    }
    Ok(LiouvilleFit { factor, residual })
}
