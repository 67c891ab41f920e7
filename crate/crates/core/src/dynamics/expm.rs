//! Matrix exponential by scaling and squaring with a degree-13 Pade approximant.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const THETA_13: f64 = 5.371920351148152;

const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn norm_1(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if !a.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let norm = norm_1(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / 2f64.powi(s);
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * B[13] + &a4 * B[11] + &a2 * B[9]) + &a6 * B[7] + &a4 * B[5] + &a2 * B[3] + &ident * B[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * B[12] + &a4 * B[10] + &a2 * B[8]) + &a6 * B[6] + &a4 * B[4] + &a2 * B[2] + &ident * B[0];

    let mut r = (&v - &u)
        .lu()
        .solve(&(&v + &u))
        .ok_or(Error::RankDeficient {
            rank: 0,
            dim: n,
            context: "Pade denominator",
        })?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// `exp(t A) x0`.
pub fn exact_linear_flow(a: &DMatrix<f64>, x0: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    if x0.len() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            got: x0.len(),
        });
    }
    Ok(expm(&(a * t))? * x0)
}
