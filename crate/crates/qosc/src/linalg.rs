//! Dense complex linear algebra: norms, adjoints, linear solves, and the
//! matrix exponential. Everything here is desk-scale (n up to a few hundred),
//! so plain partial-pivot elimination and scaling-and-squaring are enough.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = Array2<C64>;

pub fn identity(n: usize) -> CMat {
    Array2::eye(n)
}

/// Conjugate transpose.
pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub fn trace(a: &CMat) -> C64 {
    a.diag().sum()
}

/// Induced 1-norm: maximum absolute column sum.
pub fn one_norm(a: &CMat) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum())
        .fold(0.0, f64::max)
}

/// Induced infinity-norm: maximum absolute row sum.
pub fn inf_norm(a: &CMat) -> f64 {
    a.rows()
        .into_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Solves A·X = B by Gaussian elimination with partial pivoting.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "solve requires a square matrix");
    assert_eq!(b.nrows(), n, "dimension mismatch between A and B");
    let m = b.ncols();
    let mut lu = a.clone();
    let mut x = b.clone();

    for k in 0..n {
        let mut piv = k;
        let mut piv_mag = lu[[k, k]].norm();
        for i in k + 1..n {
            let mag = lu[[i, k]].norm();
            if mag > piv_mag {
                piv = i;
                piv_mag = mag;
            }
        }
        if piv_mag == 0.0 {
            return Err(Error::SingularMatrix { row: k });
        }
        if piv != k {
            for j in 0..n {
                lu.swap([k, j], [piv, j]);
            }
            for j in 0..m {
                x.swap([k, j], [piv, j]);
            }
        }
        let d = lu[[k, k]];
        for i in k + 1..n {
            let f = lu[[i, k]] / d;
            if f == C64::ZERO {
                continue;
            }
            for j in k + 1..n {
                let s = lu[[k, j]];
                lu[[i, j]] -= f * s;
            }
            for j in 0..m {
                let s = x[[k, j]];
                x[[i, j]] -= f * s;
            }
        }
    }

    for k in (0..n).rev() {
        let d = lu[[k, k]];
        for j in 0..m {
            let mut s = x[[k, j]];
            for i in k + 1..n {
                s -= lu[[k, i]] * x[[i, j]];
            }
            x[[k, j]] = s / d;
        }
    }
    Ok(x)
}

// Numerator coefficients of the degree-13 Pade approximant to exp.
const PADE13: [f64; 14] = [
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

// 1-norm threshold below which the degree-13 approximant is accurate to
// machine precision without scaling.
const PADE13_THETA: f64 = 5.371920351148152;

/// Matrix exponential by scaling-and-squaring with a degree-13 Pade
/// approximant. Accurate to ~1e-14 relative for well-scaled inputs.
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "expm requires a square matrix");
    let norm = one_norm(a);
    let s: i32 = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as i32
    } else {
        0
    };
    let scale = C64::new(0.5f64.powi(s), 0.0);
    let a1 = a.mapv(|z| z * scale);
    let a2 = a1.dot(&a1);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let eye = identity(n);

    let c = |k: usize| C64::new(PADE13[k], 0.0);
    let u_inner = &a6 * c(13) + &a4 * c(11) + &a2 * c(9);
    let u = a1.dot(&(a6.dot(&u_inner) + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &eye * c(1)));
    let v_inner = &a6 * c(12) + &a4 * c(10) + &a2 * c(8);
    let v = a6.dot(&v_inner) + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &eye * c(0);

    let mut f = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        f = f.dot(&f);
    }
    Ok(f)
}
