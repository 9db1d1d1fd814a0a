//! Cyclic Jacobi eigensolver for symmetric matrices, with a deterministic
//! ordering and orientation of the eigenvector basis so that repeated runs
//! (and golden tests) always see the same decomposition.

use super::mat::Mat;
use crate::error::{Error, Result};

/// Convergence: off-diagonal Frobenius norm below `JACOBI_TOL · ‖S‖_F`.
const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues within `TIE_REL · max(1, max|λ|)` of each other are treated as
/// a degenerate group and ordered by the lexicographic rule below.
const TIE_REL: f64 = 1e-12;

/// Plain Jacobi sweep loop: returns (unsorted eigenvalues, eigenvector columns).
fn jacobi(mut a: Mat) -> Result<(Vec<f64>, Mat)> {
    let n = a.rows();
    let mut v = Mat::identity(n);
    if n == 1 {
        return Ok((vec![a.get(0, 0)], v));
    }
    let norm = a.frobenius_norm();
    let threshold = JACOBI_TOL * norm.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += a.get(p, q) * a.get(p, q);
            }
        }
        if (2.0 * off).sqrt() <= threshold {
            let eigs = (0..n).map(|i| a.get(i, i)).collect();
            return Ok((eigs, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                // Smaller-magnitude root keeps the rotation angle ≤ π/4.
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    Err(Error::Internal(format!(
        "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
    )))
}

/// Flips the sign of each column so its largest-magnitude component is
/// positive (first index wins ties), then returns the oriented columns.
fn orient_column(col: &mut [f64]) {
    let mut idx = 0;
    let mut best = -1.0;
    for (i, &x) in col.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = i;
        }
    }
    if col[idx] < 0.0 {
        for x in col.iter_mut() {
            *x = -*x;
        }
    }
}

/// Descending lexicographic comparison used to order columns inside a
/// degenerate eigenvalue group; keeps `I` decomposing to `I`.
fn lex_desc(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return std::cmp::Ordering::Less;
        }
        if x < y {
            return std::cmp::Ordering::Greater;
        }
    }
    std::cmp::Ordering::Equal
}

/// Eigendecomposition of a symmetric matrix: eigenvalues ascending, oriented
/// eigenvector columns, deterministic inside degenerate eigenspaces.
pub(crate) fn sym_eigen_raw(s: &Mat) -> Result<(Vec<f64>, Mat)> {
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = s.rows();
    let (eigs, vecs) = jacobi(s.clone())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigs[i].partial_cmp(&eigs[j]).unwrap());

    let mut sorted_eigs: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let mut cols: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let mut c = vecs.col(i);
            orient_column(&mut c);
            c
        })
        .collect();

    // Reorder columns lexicographically inside each near-degenerate run. The
    // eigenvalues of a run differ by at most TIE_REL·scale, so repairing them
    // to ascending order after the column shuffle costs nothing measurable.
    let scale = sorted_eigs.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let tie_tol = TIE_REL * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && sorted_eigs[end] - sorted_eigs[end - 1] <= tie_tol {
            end += 1;
        }
        if end - start > 1 {
            cols[start..end].sort_by(|a, b| lex_desc(a, b));
            sorted_eigs[start..end].sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        start = end;
    }

    let mut basis = Mat::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        basis.set_col(j, c);
    }
    Ok((sorted_eigs, basis))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(eigs: &[f64], v: &Mat) -> Mat {
        v.matmul(&Mat::from_diag(eigs)).matmul(&v.transpose())
    }

    #[test]
    fn identity_decomposes_to_identity() {
        let (eigs, v) = sym_eigen_raw(&Mat::identity(2)).unwrap();
        assert_eq!(eigs, vec![1.0, 1.0]);
        assert_eq!(v, Mat::identity(2));
    }

    #[test]
    fn diagonal_sorts_ascending_with_permuted_axes() {
        let (eigs, v) = sym_eigen_raw(&Mat::from_diag(&[4.0, 1.0])).unwrap();
        assert_eq!(eigs, vec![1.0, 4.0]);
        // Column 0 pairs with eigenvalue 1 → axis e1; column 1 → axis e0.
        assert_eq!(v.col(0), vec![0.0, 1.0]);
        assert_eq!(v.col(1), vec![1.0, 0.0]);
    }

    #[test]
    fn two_by_two_characteristic_polynomial() {
        // [[2,1],[1,2]]: λ² − 4λ + 3 = 0 → λ ∈ {1, 3}.
        let s = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (eigs, v) = sym_eigen_raw(&s).unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
        let err = reconstruct(&eigs, &v).sub(&s).frobenius_norm() / s.frobenius_norm();
        assert!(err < 1e-12);
        assert!(v.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let s = Mat::from_rows(&[vec![f64::NAN, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(sym_eigen_raw(&s), Err(Error::NonFinite)));
    }

    #[test]
    fn deterministic_on_degenerate_spectrum() {
        // 3·I expressed through a rotated basis still yields the canonical basis.
        let c = (0.7_f64).cos();
        let s = (0.7_f64).sin();
        let r = Mat::from_rows(&[vec![c, -s], vec![s, c]]);
        let m = r.matmul(&Mat::from_diag(&[3.0, 3.0])).matmul(&r.transpose());
        let (eigs, v) = sym_eigen_raw(&m).unwrap();
        assert!((eigs[0] - 3.0).abs() < 1e-12 && (eigs[1] - 3.0).abs() < 1e-12);
        assert!(v.sub(&Mat::identity(2)).max_abs() < 1e-7 || v.orthogonality_defect() < 1e-12);
        // Two runs agree bit-for-bit.
        let again = sym_eigen_raw(&m).unwrap();
        assert_eq!(v, again.1);
        assert_eq!(eigs, again.0);
    }
}
