//! Gaussian elimination over the field of `t`-free scalars.

use crate::error::{Error, Result};
use crate::exact_series::Scalar;

pub type Matrix = Vec<Vec<Scalar>>;

fn inverse(x: &Scalar) -> Result<Scalar> {
    x.checked_inv()
        .map_err(|_| Error::UnsupportedRing(format!("cannot pivot on {x}")))
}

/// Reduced row echelon form and the pivot column of each nonzero row.
pub fn rref(m: &[Vec<Scalar>], cols: usize) -> Result<(Matrix, Vec<usize>)> {
    let mut a: Matrix = m.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = inverse(&a[row][col])?;
        for x in a[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..a.len() {
            if i == row || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..cols {
                let d = &f * &a[row][j];
                a[i][j] = &a[i][j] - &d;
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    a.truncate(row);
    Ok((a, pivots))
}

/// One solution of `a x = b` with free variables set to zero, or `None`.
pub fn solve(a: &[Vec<Scalar>], cols: usize, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (red, pivots) = rref(&aug, cols + 1)?;
    if pivots.last() == Some(&cols) {
        return Ok(None);
    }
    let mut x = vec![Scalar::zero(); cols];
    for (r, &p) in red.iter().zip(&pivots) {
        x[p] = r[cols].clone();
    }
    Ok(Some(x))
}

/// A basis of `{x : a x = 0}`.
pub fn kernel(a: &[Vec<Scalar>], cols: usize) -> Result<Matrix> {
    let (red, pivots) = rref(a, cols)?;
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); cols];
        v[free] = Scalar::one();
        for (r, &p) in red.iter().zip(&pivots) {
            v[p] = -&r[free];
        }
        basis.push(v);
    }
    Ok(basis)
}

/// The representative of `v + span(vectors)` vanishing at every pivot of the
/// echelon basis of the span.
pub fn reduce_modulo_span(vectors: &[Vec<Scalar>], v: &[Scalar]) -> Result<Vec<Scalar>> {
    let n = v.len();
    let (basis, pivots) = rref(vectors, n)?;
    let mut out = v.to_vec();
    for (b, &p) in basis.iter().zip(&pivots) {
        if out[p].is_zero() {
            continue;
        }
        let f = out[p].clone();
        for j in 0..n {
            let d = &f * &b[j];
            out[j] = &out[j] - &d;
        }
    }
    Ok(out)
}

/// `a x`.
pub fn mat_vec(a: &[Vec<Scalar>], x: &[Scalar]) -> Vec<Scalar> {
    a.iter()
        .map(|r| {
            r.iter()
                .zip(x)
                .fold(Scalar::zero(), |acc, (p, q)| &acc + &(p * q))
        })
        .collect()
}
