//! Singular value decomposition built on the symmetric eigensolver
//! (eigen of AᵀA plus sign recovery), reusing the same numerical kernel.

use super::eigen::sym_eigen_raw;
use super::mat::Mat;
use crate::error::{Error, Result};

pub(crate) struct Svd {
    /// Left singular vectors, columns paired with `singular_values`.
    pub u: Mat,
    /// Singular values, descending.
    #[allow(dead_code)] // polar factor ignores the magnitudes
    pub singular_values: Vec<f64>,
    /// Right singular vectors, columns paired with `singular_values`.
    pub v: Mat,
}

/// SVD of a square matrix. Singular values come back descending; columns for
/// (numerically) zero singular values are completed to an orthonormal basis.
pub(crate) fn svd_square(a: &Mat) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let gram = a.transpose().matmul(a);
    // Symmetrize against rounding before handing to the eigensolver.
    let gram = gram.add(&gram.transpose()).scale(0.5);
    let (eigs, basis) = sym_eigen_raw(&gram)?;

    // Ascending eigenvalues → descending singular values.
    let mut singular_values = Vec::with_capacity(n);
    let mut v = Mat::zeros(n, n);
    for k in 0..n {
        let src = n - 1 - k;
        singular_values.push(eigs[src].max(0.0).sqrt());
        v.set_col(k, &basis.col(src));
    }

    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let rank_tol = sigma_max * 1e-13;

    let mut u = Mat::zeros(n, n);
    for k in 0..n {
        if singular_values[k] > rank_tol && singular_values[k] > 0.0 {
            let col = a.mul_vec(&v.col(k));
            let inv = 1.0 / singular_values[k];
            let scaled: Vec<f64> = col.iter().map(|x| x * inv).collect();
            u.set_col(k, &scaled);
        } else {
            // Null-direction column: fill from the standard basis, orthogonal
            // to everything already placed.
            let col = complete_column(&u, k);
            u.set_col(k, &col);
        }
    }
    // One modified Gram-Schmidt pass keeps U orthonormal even when tiny
    // singular values made the recovered columns slightly non-orthogonal.
    reorthonormalize(&mut u);

    Ok(Svd { u, singular_values, v })
}

fn complete_column(u: &Mat, up_to: usize) -> Vec<f64> {
    let n = u.rows();
    for cand in 0..n {
        let mut col = vec![0.0; n];
        col[cand] = 1.0;
        for j in 0..up_to {
            let prev = u.col(j);
            let dot: f64 = col.iter().zip(&prev).map(|(a, b)| a * b).sum();
            for (c, p) in col.iter_mut().zip(&prev) {
                *c -= dot * p;
            }
        }
        let norm: f64 = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for c in col.iter_mut() {
                *c /= norm;
            }
            return col;
        }
    }
    unreachable!("an orthogonal complement direction always exists");
}

fn reorthonormalize(u: &mut Mat) {
    let n = u.rows();
    for k in 0..n {
        let mut col = u.col(k);
        for j in 0..k {
            let prev = u.col(j);
            let dot: f64 = col.iter().zip(&prev).map(|(a, b)| a * b).sum();
            for (c, p) in col.iter_mut().zip(&prev) {
                *c -= dot * p;
            }
        }
        let norm: f64 = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for c in col.iter_mut() {
                *c /= norm;
            }
        }
        u.set_col(k, &col);
    }
}

/// Orthogonal factor maximizing `tr(θA)` over O(n), or over SO(n) when
/// `restrict_special` (Kabsch correction: negate the V column paired with the
/// smallest singular value before forming `V·Uᵀ`).
pub(crate) fn polar_factor_raw(a: &Mat, restrict_special: bool) -> Result<Mat> {
    let Svd { u, singular_values: _, mut v } = svd_square(a)?;
    let mut theta = v.matmul(&u.transpose());
    if restrict_special && theta.det() < 0.0 {
        let n = v.rows();
        let flipped: Vec<f64> = v.col(n - 1).iter().map(|x| -x).collect();
        v.set_col(n - 1, &flipped);
        theta = v.matmul(&u.transpose());
    }
    Ok(theta)
}
