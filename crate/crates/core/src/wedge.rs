//! Brute-force evaluation of `eta ^ (d eta)^k` on `2k + 1` vectors.
//!
//! Convention: the determinant (alternating-sum) convention,
//!
//! ```text
//! (eta ^ (d eta)^k)(v_0, ..., v_2k)
//!     = 1 / 2^k * sum_{s in S_{2k+1}} sgn(s) eta(v_s0) d eta(v_s1, v_s2) ... d eta(v_s(2k-1), v_s2k)
//! ```
//!
//! with no `1/k!`. On a Darboux tuple `(R, e_1, f_1, ..., e_k, f_k)` with
//! `eta(R) = 1` and `d eta(e_i, f_i) = 1` this gives `k!`, whereas the product
//! `eta(R) d eta(e_1, f_1) ... d eta(e_k, f_k)` gives 1. The ratio is exactly `k!`.
//!
//! Terms are accumulated with a correctly rounded sum, so swapping two
//! arguments flips the sign of the result bit for bit.

use nalgebra::DVector;

use crate::contact::ContactStructure;
use crate::error::{Error, Result};
use crate::forms::{check_dim, StatePoint};
use crate::linalg::exact_sum;

/// Largest tuple length accepted (9! = 362880 terms).
pub const MAX_ARITY: usize = 9;

pub fn eta_wedge_deta_power(c: &ContactStructure, x: &StatePoint, vectors: &[DVector<f64>]) -> Result<f64> {
    let m = vectors.len();
    if m > MAX_ARITY {
        return Err(Error::TooLarge { arity: m });
    }
    if m % 2 == 0 {
        return Err(Error::EvenArity(m));
    }
    for v in vectors {
        check_dim(c.dim(), v.len())?;
    }
    let eta = c.eta_at(x)?;
    let d = c.d_eta_at(x)?;
    let eta_vals: Vec<f64> = vectors.iter().map(|v| eta.pair(v)).collect();
    let pair: Vec<Vec<f64>> = vectors
        .iter()
        .map(|u| vectors.iter().map(|v| u.dot(&(&d * v))).collect())
        .collect();

    let k = (m - 1) / 2;
    let mut terms = Vec::with_capacity((1..=m).product());
    for_each_permutation(m, |perm, sign| {
        let mut t = eta_vals[perm[0]];
        for j in 0..k {
            t *= pair[perm[2 * j + 1]][perm[2 * j + 2]];
        }
        terms.push(sign * t);
    });
    Ok(exact_sum(terms) / f64::powi(2.0, k as i32))
}

/// Heap's algorithm; `sign` is the parity of each permutation.
fn for_each_permutation<F: FnMut(&[usize], f64)>(n: usize, mut f: F) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut sign = 1.0;
    f(&perm, sign);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            sign = -sign;
            f(&perm, sign);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}
