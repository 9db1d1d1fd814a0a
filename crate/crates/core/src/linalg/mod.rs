//! Deterministic dense linear algebra for symmetric and orthogonal matrices.
//!
//! Everything here is pure and immutable after construction. The eigensolver
//! fixes a canonical basis inside degenerate eigenspaces so decompositions
//! are reproducible, which the golden tests downstream rely on.

mod eigen;
mod haar;
mod mat;
mod svd;

pub use mat::Mat;

use crate::error::{Error, Result};

/// Relative clamping tolerance for almost-PSD matrices: eigenvalues in
/// `[−clampTol·max|λ|, 0)` are treated as rounding noise and clamped to 0.
pub const PSD_CLAMP_REL: f64 = 1e-10;

const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Symmetric matrix, stored exactly symmetric: construction keeps `(S + Sᵀ)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    mat: Mat,
}

impl SymmetricMatrix {
    pub fn new(mat: Mat) -> Result<Self> {
        if !mat.is_square() || mat.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix must be square and non-empty, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let sym = mat.add(&mat.transpose()).scale(0.5);
        Ok(SymmetricMatrix { mat: sym })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Error::DimensionMismatch(
                "symmetric matrix rows must form a square".into(),
            ));
        }
        Self::new(Mat::from_rows(rows))
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        Self::new(Mat::from_diag(diag))
    }

    pub fn identity(dim: usize) -> Self {
        SymmetricMatrix { mat: Mat::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }
}

/// Eigen-factorization `S = P·diag(λ)·Pᵀ` with λ ascending and columns of `P`
/// paired index-by-index with the eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat,
}

impl SpectralDecomposition {
    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthogonal matrix whose column `i` pairs with `eigenvalues()[i]`.
    pub fn eigenvectors(&self) -> &Mat {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Rebuilds `P·diag(λ)·Pᵀ`.
    pub fn reconstruct(&self) -> Mat {
        self.eigenvectors
            .matmul(&Mat::from_diag(&self.eigenvalues))
            .matmul(&self.eigenvectors.transpose())
    }
}

/// Orthogonal matrix with its rotation/reflection classification.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMatrix {
    mat: Mat,
    special: bool,
}

impl OrthogonalMatrix {
    /// Validates `QᵀQ = I` (max deviation ≤ 1e−10) and classifies by determinant.
    pub fn try_new(mat: Mat) -> Result<Self> {
        if !mat.is_square() || mat.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "orthogonal matrix must be square and non-empty, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = mat.orthogonality_defect();
        if defect > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal(defect));
        }
        let special = mat.det() > 0.0;
        Ok(OrthogonalMatrix { mat, special })
    }

    /// For matrices that are orthogonal by construction.
    pub(crate) fn from_mat_unchecked(mat: Mat) -> Self {
        debug_assert!(mat.orthogonality_defect() <= 1e-8);
        let special = mat.det() > 0.0;
        OrthogonalMatrix { mat, special }
    }

    pub fn identity(dim: usize) -> Self {
        OrthogonalMatrix { mat: Mat::identity(dim), special: true }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    /// True iff `det = +1` (a rotation, element of SO(d)).
    pub fn special(&self) -> bool {
        self.special
    }

    pub fn transpose(&self) -> OrthogonalMatrix {
        OrthogonalMatrix { mat: self.mat.transpose(), special: self.special }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.mat.mul_vec(v)
    }

    /// Conjugation `Q·S·Qᵀ`, the pushforward of a covariance.
    pub fn conjugate(&self, s: &SymmetricMatrix) -> SymmetricMatrix {
        let m = self.mat.matmul(s.mat()).matmul(&self.mat.transpose());
        SymmetricMatrix::new(m).expect("conjugation preserves shape")
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
///
/// Output is deterministic for identical input: eigenvalues ascending, each
/// eigenvector oriented so its largest-magnitude component is positive, and
/// degenerate groups ordered canonically.
pub fn sym_eigen(s: &SymmetricMatrix) -> Result<SpectralDecomposition> {
    let (eigenvalues, eigenvectors) = eigen::sym_eigen_raw(s.mat())?;
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Ascending eigenvalues clamped at zero, with the paired basis.
/// Fails with `NotPsd` when an eigenvalue sits below `−clampTol·max|λ|`.
pub(crate) fn psd_spectrum(s: &SymmetricMatrix) -> Result<(Vec<f64>, Mat)> {
    let (eigs, basis) = eigen::sym_eigen_raw(s.mat())?;
    let max_abs = eigs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tol = PSD_CLAMP_REL * max_abs;
    let min = eigs.first().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::NotPsd { min_eigenvalue: min, tolerance: tol });
    }
    Ok((eigs.into_iter().map(|x| x.max(0.0)).collect(), basis))
}

/// Unique PSD square root: `R·R = S` with `R` symmetric PSD.
///
/// Eigenvalues within the clamp tolerance below zero are treated as 0;
/// anything further below fails with `NotPsd`.
pub fn psd_sqrt(s: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let (eigs, basis) = psd_spectrum(s)?;
    let sqrt: Vec<f64> = eigs.iter().map(|x| x.sqrt()).collect();
    let r = basis.matmul(&Mat::from_diag(&sqrt)).matmul(&basis.transpose());
    SymmetricMatrix::new(r)
}

/// Orthogonal factor of the polar decomposition: maximizes `tr(θA)` over
/// O(d), or over SO(d) when `restrict_special` (Kabsch correction).
pub fn polar_orthogonal_factor(a: &Mat, restrict_special: bool) -> Result<OrthogonalMatrix> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "polar factor needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let theta = svd::polar_factor_raw(a, restrict_special)?;
    Ok(OrthogonalMatrix::from_mat_unchecked(theta))
}

/// Haar-distributed orthogonal matrix, deterministic for a given seed.
///
/// Sampled as the sign-corrected QR factor of a standard Gaussian matrix;
/// with `restrict_special` the reflection coset is folded into SO(d).
pub fn random_orthogonal(dim: usize, seed: u64, restrict_special: bool) -> OrthogonalMatrix {
    let q = haar::haar_orthogonal_raw(dim, seed, restrict_special);
    OrthogonalMatrix::from_mat_unchecked(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spd(seed: u64, dim: usize) -> SymmetricMatrix {
        // Random SPD with eigenvalues in [0.2, 5.2].
        let q = random_orthogonal(dim, seed, false);
        let mut rng_state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            0.2 + 5.0 * ((rng_state >> 11) as f64 / (1u64 << 53) as f64)
        };
        let eigs: Vec<f64> = (0..dim).map(|_| next()).collect();
        let m = q.mat().matmul(&Mat::from_diag(&eigs)).matmul(&q.mat().transpose());
        SymmetricMatrix::new(m).unwrap()
    }

    #[test]
    fn sym_eigen_invariants_hold() {
        for seed in 0..20 {
            let s = spd(seed, 5);
            let dec = sym_eigen(&s).unwrap();
            for w in dec.eigenvalues().windows(2) {
                assert!(w[0] <= w[1]);
            }
            assert!(dec.eigenvectors().orthogonality_defect() < 1e-10);
            let rel = dec.reconstruct().sub(s.mat()).frobenius_norm() / s.mat().frobenius_norm();
            assert!(rel < 1e-8);
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let i3 = SymmetricMatrix::identity(3);
        assert!(psd_sqrt(&i3).unwrap().mat().sub(&Mat::identity(3)).max_abs() < 1e-12);

        let d = SymmetricMatrix::from_diag(&[4.0, 9.0]).unwrap();
        let r = psd_sqrt(&d).unwrap();
        assert!(r.mat().sub(&Mat::from_diag(&[2.0, 3.0])).max_abs() < 1e-12);

        // Oracle route: square the result and compare to the input.
        let s = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let r = psd_sqrt(&s).unwrap();
        let back = r.mat().matmul(r.mat());
        assert!(back.sub(s.mat()).frobenius_norm() / s.mat().frobenius_norm() < 1e-12);
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let s = SymmetricMatrix::from_diag(&[1.0, -0.5]).unwrap();
        assert!(matches!(psd_sqrt(&s), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn psd_sqrt_clamps_rounding_noise() {
        let s = SymmetricMatrix::from_diag(&[1.0, -1e-12]).unwrap();
        let r = psd_sqrt(&s).unwrap();
        assert!(r.get(1, 1).abs() < 1e-6);
    }

    #[test]
    fn zero_matrix_sqrt_is_zero() {
        let s = SymmetricMatrix::from_diag(&[0.0, 0.0]).unwrap();
        assert!(psd_sqrt(&s).unwrap().mat().max_abs() == 0.0);
    }

    #[test]
    fn polar_beats_random_group_elements() {
        for seed in 0..10 {
            let dim = 3;
            let a = spd(seed, dim).mat().matmul(random_orthogonal(dim, seed + 77, false).mat());
            let theta = polar_orthogonal_factor(&a, false).unwrap();
            let best = theta.mat().matmul(&a).trace();
            for k in 0..64 {
                let other = random_orthogonal(dim, seed * 1000 + k, false);
                assert!(best >= other.mat().matmul(&a).trace() - 1e-9);
            }
        }
    }

    #[test]
    fn orthogonal_validation() {
        assert!(OrthogonalMatrix::try_new(Mat::identity(3)).unwrap().special());
        let refl = Mat::from_diag(&[-1.0, 1.0]);
        assert!(!OrthogonalMatrix::try_new(refl).unwrap().special());
        let bad = Mat::from_rows(&[vec![1.0, 0.2], vec![0.0, 1.0]]);
        assert!(matches!(OrthogonalMatrix::try_new(bad), Err(Error::NotOrthogonal(_))));
    }

    #[test]
    fn haar_samples_pass_constructor_checks() {
        for seed in 0..16 {
            let q = random_orthogonal(3, seed, false);
            assert!(OrthogonalMatrix::try_new(q.mat().clone()).is_ok());
            let r = random_orthogonal(3, seed, true);
            assert!(r.special());
        }
    }

    proptest! {
        #[test]
        fn psd_sqrt_squares_back(seed in 0u64..500, dim in 1usize..6) {
            let s = spd(seed, dim);
            let r = psd_sqrt(&s).unwrap();
            let back = r.mat().matmul(r.mat());
            let rel = back.sub(s.mat()).frobenius_norm() / s.mat().frobenius_norm().max(1e-300);
            prop_assert!(rel < 1e-8);
        }

        #[test]
        fn eigen_is_deterministic(seed in 0u64..200, dim in 1usize..5) {
            let s = spd(seed, dim);
            let a = sym_eigen(&s).unwrap();
            let b = sym_eigen(&s).unwrap();
            prop_assert_eq!(a.eigenvalues(), b.eigenvalues());
            prop_assert_eq!(a.eigenvectors(), b.eigenvectors());
        }
    }
}
