//! Closed-form distances between Gaussian measures: the Bures-Wasserstein
//! metric and its quotient by orthogonal transformations, which reduces to
//! the Euclidean distance between sorted square-root spectra.

use crate::error::{Error, Result};
use crate::linalg::{
    psd_spectrum, psd_sqrt, sym_eigen, Mat, OrthogonalMatrix, SymmetricMatrix,
};

/// Gaussian `N(mean, covariance)` with a PSD covariance.
#[derive(Debug, Clone)]
pub struct GaussianDistribution {
    mean: Vec<f64>,
    covariance: SymmetricMatrix,
}

impl GaussianDistribution {
    /// Validates that the mean length matches the covariance dimension and
    /// that the covariance is PSD up to the clamp tolerance.
    pub fn new(mean: Vec<f64>, covariance: SymmetricMatrix) -> Result<Self> {
        if mean.len() != covariance.dim() {
            return Err(Error::DimensionMismatch(format!(
                "mean has length {} but covariance is {}-dimensional",
                mean.len(),
                covariance.dim()
            )));
        }
        if !mean.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        psd_spectrum(&covariance)?;
        Ok(GaussianDistribution { mean, covariance })
    }

    pub fn centered(covariance: SymmetricMatrix) -> Result<Self> {
        let d = covariance.dim();
        Self::new(vec![0.0; d], covariance)
    }

    pub fn dim(&self) -> usize {
        self.covariance.dim()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &SymmetricMatrix {
        &self.covariance
    }

    /// Pushforward by an orthogonal matrix: `N(Qm, QΣQᵀ)`.
    pub fn pushforward(&self, q: &OrthogonalMatrix) -> Result<Self> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "pushforward by {}-dim orthogonal of a {}-dim Gaussian",
                q.dim(),
                self.dim()
            )));
        }
        GaussianDistribution::new(q.apply(&self.mean), q.conjugate(&self.covariance))
    }
}

/// Orthogonal-equivalence class of a centered Gaussian, identified by the
/// ascending square roots of the covariance eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianClass {
    sqrt_eigenvalues: Vec<f64>,
}

impl GaussianClass {
    pub fn new(sqrt_eigenvalues: Vec<f64>) -> Result<Self> {
        if sqrt_eigenvalues.is_empty() {
            return Err(Error::DimensionMismatch("class must have dimension >= 1".into()));
        }
        if sqrt_eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if sqrt_eigenvalues.iter().any(|x| *x < 0.0) {
            return Err(Error::NotPsd {
                min_eigenvalue: sqrt_eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min),
                tolerance: 0.0,
            });
        }
        if sqrt_eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Internal("class entries must be sorted ascending".into()));
        }
        Ok(GaussianClass { sqrt_eigenvalues })
    }

    /// Sorts the entries, for callers assembling candidates by hand.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self::new(values)
    }

    pub fn dim(&self) -> usize {
        self.sqrt_eigenvalues.len()
    }

    /// Ascending square-root eigenvalues (standard-deviation units).
    pub fn sqrt_eigenvalues(&self) -> &[f64] {
        &self.sqrt_eigenvalues
    }
}

/// Affine map `x ↦ matrix·x + offset`.
#[derive(Debug, Clone)]
pub struct LinearMap {
    pub matrix: Mat,
    pub offset: Vec<f64>,
}

impl LinearMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.matrix.mul_vec(x);
        for (yi, oi) in y.iter_mut().zip(&self.offset) {
            *yi += oi;
        }
        y
    }
}

/// Result of the Gaussian Procrustes-Wasserstein computation.
#[derive(Debug, Clone)]
pub struct PwGaussian {
    /// `‖√a0 − √a1‖₂` over ascending-sorted covariance eigenvalues.
    pub distance: f64,
    /// Orthogonal transformation certified to attain `sup F(θ)`.
    pub theta_star: OrthogonalMatrix,
    /// `‖m0 − m1‖`, reported separately since the metric ignores means.
    pub mean_gap: f64,
}

fn check_same_dim(d0: usize, d1: usize, what: &str) -> Result<()> {
    if d0 != d1 {
        return Err(Error::DimensionMismatch(format!("{what}: {d0} vs {d1}")));
    }
    Ok(())
}

/// Bures-Wasserstein distance
/// `√(‖m0−m1‖² + tr(Σ0 + Σ1 − 2(Σ1^{1/2} Σ0 Σ1^{1/2})^{1/2}))`,
/// with the trace term clamped at zero before the outer square root.
pub fn bures_w2(g0: &GaussianDistribution, g1: &GaussianDistribution) -> Result<f64> {
    check_same_dim(g0.dim(), g1.dim(), "bures_w2")?;
    let mean_sq: f64 = g0
        .mean
        .iter()
        .zip(&g1.mean)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();

    let s1h = psd_sqrt(g1.covariance())?;
    let inner = s1h.mat().matmul(g0.covariance().mat()).matmul(s1h.mat());
    let cross = psd_sqrt(&SymmetricMatrix::new(inner)?)?;
    let trace_term =
        g0.covariance().trace() + g1.covariance().trace() - 2.0 * cross.trace();
    Ok((mean_sq + trace_term.max(0.0)).sqrt())
}

/// `F(θ) = tr((Σ1^{1/2} θ Σ0 θᵀ Σ1^{1/2})^{1/2})`, the coupling term of the
/// Procrustes-Wasserstein objective between centered Gaussians.
pub fn gaussian_f(
    theta: &OrthogonalMatrix,
    sigma0: &SymmetricMatrix,
    sigma1: &SymmetricMatrix,
) -> Result<f64> {
    check_same_dim(sigma0.dim(), sigma1.dim(), "gaussian_f covariances")?;
    check_same_dim(theta.dim(), sigma0.dim(), "gaussian_f theta")?;
    let s1h = psd_sqrt(sigma1)?;
    let rotated = theta.conjugate(sigma0);
    let inner = s1h.mat().matmul(rotated.mat()).matmul(s1h.mat());
    let (eigs, _) = psd_spectrum(&SymmetricMatrix::new(inner)?)?;
    Ok(eigs.iter().map(|x| x.sqrt()).sum())
}

/// Ascending square-root spectrum of a PSD matrix.
fn sqrt_spectrum_of(s: &SymmetricMatrix) -> Result<(Vec<f64>, Mat)> {
    let (eigs, basis) = psd_spectrum(s)?;
    Ok((eigs.iter().map(|x| x.sqrt()).collect(), basis))
}

/// Procrustes-Wasserstein distance between Gaussians: the Euclidean distance
/// between their ascending square-root eigenvalue vectors. Means are ignored
/// (the metric lives on centered measures); `mean_gap` reports them.
///
/// `theta_star` is chosen between the two eigenbasis products (both transpose
/// orders) by evaluating `F` on each and keeping the certified maximizer.
pub fn pw_gaussian(g0: &GaussianDistribution, g1: &GaussianDistribution) -> Result<PwGaussian> {
    check_same_dim(g0.dim(), g1.dim(), "pw_gaussian")?;
    let (s0, p0) = sqrt_spectrum_of(g0.covariance())?;
    let (s1, p1) = sqrt_spectrum_of(g1.covariance())?;

    let distance = s0
        .iter()
        .zip(&s1)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();

    let cand_a = OrthogonalMatrix::from_mat_unchecked(p1.matmul(&p0.transpose()));
    let cand_b = OrthogonalMatrix::from_mat_unchecked(p0.transpose().matmul(&p1));
    let f_a = gaussian_f(&cand_a, g0.covariance(), g1.covariance())?;
    let f_b = gaussian_f(&cand_b, g0.covariance(), g1.covariance())?;
    let theta_star = if f_a >= f_b { cand_a } else { cand_b };

    let mean_gap = g0
        .mean
        .iter()
        .zip(&g1.mean)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();

    Ok(PwGaussian { distance, theta_star, mean_gap })
}

/// Canonical representative of the orthogonal-equivalence class: the
/// ascending square-root spectrum of the covariance. The mean is discarded.
pub fn canonical_class(g: &GaussianDistribution) -> Result<GaussianClass> {
    let (s, _) = sqrt_spectrum_of(g.covariance())?;
    GaussianClass::new(s)
}

/// Euclidean distance between two class representatives.
pub fn class_distance(c0: &GaussianClass, c1: &GaussianClass) -> Result<f64> {
    check_same_dim(c0.dim(), c1.dim(), "class_distance")?;
    Ok(c0
        .sqrt_eigenvalues
        .iter()
        .zip(&c1.sqrt_eigenvalues)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Relative eigenvalue floor below which a covariance counts as singular
/// for the Monge map.
const MONGE_SINGULAR_REL: f64 = 1e-12;

/// Optimal Gaussian Monge map `T(x) = m1 + A(x − m0)` with
/// `A = Σ0^{−1/2}(Σ0^{1/2} Σ1 Σ0^{1/2})^{1/2} Σ0^{−1/2}`.
///
/// Requires Σ0 strictly positive definite. For the Procrustes-optimal map,
/// push `g0` forward by `theta_star` from [`pw_gaussian`] first.
pub fn monge_map(g0: &GaussianDistribution, g1: &GaussianDistribution) -> Result<LinearMap> {
    check_same_dim(g0.dim(), g1.dim(), "monge_map")?;
    let dec0 = sym_eigen(g0.covariance())?;
    let eigs0 = dec0.eigenvalues();
    let max0 = eigs0.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let min0 = eigs0[0];
    if min0 <= MONGE_SINGULAR_REL * max0 || min0 <= 0.0 {
        return Err(Error::SingularCovariance { min_eigenvalue: min0 });
    }
    let basis = dec0.eigenvectors();
    let half: Vec<f64> = eigs0.iter().map(|x| x.sqrt()).collect();
    let inv_half: Vec<f64> = half.iter().map(|x| 1.0 / x).collect();
    let s0h = basis.matmul(&Mat::from_diag(&half)).matmul(&basis.transpose());
    let s0ih = basis.matmul(&Mat::from_diag(&inv_half)).matmul(&basis.transpose());

    let mid = psd_sqrt(&SymmetricMatrix::new(
        s0h.matmul(g1.covariance().mat()).matmul(&s0h),
    )?)?;
    let a = s0ih.matmul(mid.mat()).matmul(&s0ih);
    // Symmetrize: A is symmetric PSD in exact arithmetic.
    let a = a.add(&a.transpose()).scale(0.5);

    let a_m0 = a.mul_vec(&g0.mean);
    let offset: Vec<f64> = g1.mean.iter().zip(&a_m0).map(|(m1, am0)| m1 - am0).collect();
    Ok(LinearMap { matrix: a, offset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_orthogonal;

    const SQRT_10: f64 = 3.1622776601683795;
    const TWO_SQRT_2: f64 = 2.8284271247461903;

    fn gauss(mean: &[f64], cov_rows: &[Vec<f64>]) -> GaussianDistribution {
        GaussianDistribution::new(mean.to_vec(), SymmetricMatrix::from_rows(cov_rows).unwrap())
            .unwrap()
    }

    fn gauss_diag(mean: &[f64], diag: &[f64]) -> GaussianDistribution {
        GaussianDistribution::new(mean.to_vec(), SymmetricMatrix::from_diag(diag).unwrap())
            .unwrap()
    }

    fn rotation(angle: f64) -> OrthogonalMatrix {
        let (s, c) = angle.sin_cos();
        OrthogonalMatrix::try_new(Mat::from_rows(&[vec![c, -s], vec![s, c]])).unwrap()
    }

    fn rotated_cov(angle: f64, diag: &[f64]) -> SymmetricMatrix {
        rotation(angle).conjugate(&SymmetricMatrix::from_diag(diag).unwrap())
    }

    /// Inverse standard normal CDF (Acklam's rational approximation),
    /// used only by the 1-D quantile-map oracle.
    fn inverse_normal_cdf(p: f64) -> f64 {
        const A: [f64; 6] = [
            -3.969683028665376e+01,
            2.209460984245205e+02,
            -2.759285104469687e+02,
            1.383577518672690e+02,
            -3.066479806614716e+01,
            2.506628277459239e+00,
        ];
        const B: [f64; 5] = [
            -5.447609879822406e+01,
            1.615858368580409e+02,
            -1.556989798598866e+02,
            6.680131188771972e+01,
            -1.328068155288572e+01,
        ];
        const C: [f64; 6] = [
            -7.784894002430293e-03,
            -3.223964580411365e-01,
            -2.400758277161838e+00,
            -2.549732539343734e+00,
            4.374664141464968e+00,
            2.938163982698783e+00,
        ];
        const D: [f64; 4] = [
            7.784695709041462e-03,
            3.224671290700398e-01,
            2.445134137142996e+00,
            3.754408661907416e+00,
        ];
        let plow = 0.02425;
        if p < plow {
            let q = (-2.0 * p.ln()).sqrt();
            (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
                / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
        } else if p <= 1.0 - plow {
            let q = p - 0.5;
            let r = q * q;
            (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
                / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
        } else {
            -inverse_normal_cdf(1.0 - p)
        }
    }

    /// 1-D W2 by the monotone-rearrangement quantile integral.
    fn w2_1d_quantile_oracle(m0: f64, s0: f64, m1: f64, s1: f64) -> f64 {
        let n = 400_000;
        let mut acc = 0.0;
        for k in 0..n {
            let t = (k as f64 + 0.5) / n as f64;
            let z = inverse_normal_cdf(t);
            let d = (m0 + s0 * z) - (m1 + s1 * z);
            acc += d * d;
        }
        (acc / n as f64).sqrt()
    }

    #[test]
    fn bures_identity_of_indiscernibles() {
        let g = gauss(&[0.3, -1.0], &[vec![2.0, 0.5], vec![0.5, 1.0]]);
        assert!(bures_w2(&g, &g).unwrap() < 1e-9);
    }

    #[test]
    fn bures_one_dimensional_matches_quantile_oracle() {
        let g0 = gauss_diag(&[0.0], &[1.0]);
        let g1 = gauss_diag(&[3.0], &[4.0]);
        let d = bures_w2(&g0, &g1).unwrap();
        assert!((d - SQRT_10).abs() < 1e-12, "closed form {d} vs √10");
        let oracle = w2_1d_quantile_oracle(0.0, 1.0, 3.0, 2.0);
        assert!((d - oracle).abs() < 2e-3, "closed form {d} vs quantile oracle {oracle}");
    }

    #[test]
    fn bures_commuting_diagonal_case() {
        let g0 = gauss_diag(&[0.0, 0.0], &[1.0, 4.0]);
        let g1 = gauss_diag(&[0.0, 0.0], &[4.0, 1.0]);
        // tr(Σ0+Σ1−2(Σ1Σ0)^{1/2} for commuting) = (1−2)²+(2−1)² = 2.
        assert!((bures_w2(&g0, &g1).unwrap() - 2.0_f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn bures_dimension_mismatch() {
        let g0 = gauss_diag(&[0.0], &[1.0]);
        let g1 = gauss_diag(&[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(bures_w2(&g0, &g1), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn gaussian_f_on_identity_covariances() {
        for d in [1, 2, 4] {
            let theta = random_orthogonal(d, 5, false);
            let eye = SymmetricMatrix::identity(d);
            let f = gaussian_f(&theta, &eye, &eye).unwrap();
            assert!((f - d as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_f_diagonal_case() {
        let s0 = SymmetricMatrix::from_diag(&[1.0, 4.0]).unwrap();
        let s1 = SymmetricMatrix::from_diag(&[9.0, 16.0]).unwrap();
        let f = gaussian_f(&OrthogonalMatrix::identity(2), &s0, &s1).unwrap();
        // tr diag(√(9·1), √(16·4)) = 3 + 8 = 11.
        assert!((f - 11.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_f_bounded_by_spectral_inner_product() {
        fn rotated_cov3(seed: u64, diag: &[f64]) -> SymmetricMatrix {
            random_orthogonal(3, seed, false).conjugate(&SymmetricMatrix::from_diag(diag).unwrap())
        }
        let s0 = rotated_cov3(1, &[0.5, 2.0, 7.0]);
        let s1 = rotated_cov3(2, &[1.0, 3.0, 4.0]);
        let bound: f64 = [0.5_f64, 2.0, 7.0]
            .iter()
            .zip(&[1.0_f64, 3.0, 4.0])
            .map(|(a, b)| (a * b).sqrt())
            .sum();
        for seed in 0..200 {
            let theta = random_orthogonal(3, seed, false);
            let f = gaussian_f(&theta, &s0, &s1).unwrap();
            assert!(f <= bound + 1e-8, "F(θ) = {f} exceeds ⟨√a0,√a1⟩ = {bound}");
        }
    }

    #[test]
    fn pw_gaussian_identical_inputs() {
        let g = gauss(&[0.0, 0.0], &[vec![2.0, 0.7], vec![0.7, 1.2]]);
        let r = pw_gaussian(&g, &g).unwrap();
        assert!(r.distance < 1e-9);
        assert!(r.theta_star.mat().sub(&Mat::identity(2)).max_abs() < 1e-8);
    }

    #[test]
    fn pw_gaussian_vanishes_on_orthogonal_pushforward() {
        for seed in 0..20 {
            let cov = rotated_cov(0.4, &[0.5, 3.0]);
            let g = GaussianDistribution::centered(cov).unwrap();
            let o = random_orthogonal(2, seed, false);
            let pushed = g.pushforward(&o).unwrap();
            assert!(pw_gaussian(&pushed, &g).unwrap().distance < 1e-8);
        }
    }

    #[test]
    fn pw_gaussian_matches_planar_brute_force() {
        // Oracle: maximize F over 10⁵ rotations and rotation·reflections in O(2).
        let g0 = GaussianDistribution::centered(rotated_cov(30.0_f64.to_radians(), &[1.0, 4.0]))
            .unwrap();
        let g1 = GaussianDistribution::centered(rotated_cov(-45.0_f64.to_radians(), &[9.0, 16.0]))
            .unwrap();
        let r = pw_gaussian(&g0, &g1).unwrap();
        assert!((r.distance - TWO_SQRT_2).abs() < 1e-10);

        let reflection = OrthogonalMatrix::try_new(Mat::from_diag(&[1.0, -1.0])).unwrap();
        let mut best_f = f64::NEG_INFINITY;
        for k in 0..100_000 {
            let ang = 2.0 * std::f64::consts::PI * (k as f64) / 100_000.0;
            let rot = rotation(ang);
            let f_rot = gaussian_f(&rot, g0.covariance(), g1.covariance()).unwrap();
            let with_refl = OrthogonalMatrix::from_mat_unchecked(
                rot.mat().matmul(reflection.mat()),
            );
            let f_ref = gaussian_f(&with_refl, g0.covariance(), g1.covariance()).unwrap();
            best_f = best_f.max(f_rot).max(f_ref);
        }
        let tr_sum = g0.covariance().trace() + g1.covariance().trace();
        let oracle = (tr_sum - 2.0 * best_f).max(0.0).sqrt();
        assert!(
            (r.distance - oracle).abs() < 1e-4,
            "closed form {} vs brute force {}",
            r.distance,
            oracle
        );
        // Certificate: F at theta_star attains the spectral inner product.
        let f_star = gaussian_f(&r.theta_star, g0.covariance(), g1.covariance()).unwrap();
        let inner: f64 = [1.0_f64, 2.0].iter().zip(&[3.0_f64, 4.0]).map(|(a, b)| a * b).sum();
        assert!((f_star - inner).abs() < 1e-8);
    }

    #[test]
    fn canonical_class_examples() {
        let g = gauss_diag(&[5.0, -2.0, 0.1], &[1.0, 1.0, 1.0]);
        assert_eq!(canonical_class(&g).unwrap().sqrt_eigenvalues(), &[1.0, 1.0, 1.0]);

        let g = gauss_diag(&[0.0, 0.0, 0.0], &[9.0, 1.0, 4.0]);
        let c = canonical_class(&g).unwrap();
        assert!((c.sqrt_eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!((c.sqrt_eigenvalues()[1] - 2.0).abs() < 1e-12);
        assert!((c.sqrt_eigenvalues()[2] - 3.0).abs() < 1e-12);

        // Similarity by any orthogonal matrix preserves the class.
        for seed in 0..10 {
            let o = random_orthogonal(3, seed, false);
            let pushed = g.pushforward(&o).unwrap();
            let c2 = canonical_class(&pushed).unwrap();
            assert!(class_distance(&c, &c2).unwrap() < 1e-10);
        }
    }

    #[test]
    fn class_distance_examples() {
        let c0 = GaussianClass::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(class_distance(&c0, &c0).unwrap(), 0.0);
        let c1 = GaussianClass::new(vec![3.0, 4.0]).unwrap();
        assert!((class_distance(&c0, &c1).unwrap() - TWO_SQRT_2).abs() < 1e-12);
        let c2 = GaussianClass::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(class_distance(&c0, &c2), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn class_distance_consistent_with_pw_gaussian() {
        for seed in 0..20 {
            let g0 = GaussianDistribution::centered(
                random_orthogonal(3, seed, false)
                    .conjugate(&SymmetricMatrix::from_diag(&[0.3, 1.0, 2.5]).unwrap()),
            )
            .unwrap();
            let g1 = GaussianDistribution::centered(
                random_orthogonal(3, seed + 100, false)
                    .conjugate(&SymmetricMatrix::from_diag(&[0.8, 1.7, 4.0]).unwrap()),
            )
            .unwrap();
            let via_classes = class_distance(
                &canonical_class(&g0).unwrap(),
                &canonical_class(&g1).unwrap(),
            )
            .unwrap();
            let direct = pw_gaussian(&g0, &g1).unwrap().distance;
            assert!((via_classes - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn monge_map_identity_case() {
        let g = gauss(&[1.0, -2.0], &[vec![2.0, 0.3], vec![0.3, 1.5]]);
        let t = monge_map(&g, &g).unwrap();
        assert!(t.matrix.sub(&Mat::identity(2)).max_abs() < 1e-9);
        assert!(t.offset.iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn monge_map_one_dimensional() {
        let g0 = gauss_diag(&[0.0], &[1.0]);
        let g1 = gauss_diag(&[2.0], &[9.0]);
        let t = monge_map(&g0, &g1).unwrap();
        assert!((t.matrix.get(0, 0) - 3.0).abs() < 1e-10);
        assert!((t.offset[0] - 2.0).abs() < 1e-10);
        assert!((t.apply(&[1.0])[0] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn monge_map_commuting_diagonal() {
        let g0 = gauss_diag(&[0.0, 0.0], &[1.0, 4.0]);
        let g1 = gauss_diag(&[0.0, 0.0], &[4.0, 16.0]);
        let t = monge_map(&g0, &g1).unwrap();
        assert!(t.matrix.sub(&Mat::from_diag(&[2.0, 2.0])).max_abs() < 1e-9);
    }

    #[test]
    fn monge_map_pushes_covariance_forward() {
        for seed in 0..10 {
            let cov0 = random_orthogonal(3, seed, false)
                .conjugate(&SymmetricMatrix::from_diag(&[0.4, 1.0, 3.0]).unwrap());
            let cov1 = random_orthogonal(3, seed + 50, false)
                .conjugate(&SymmetricMatrix::from_diag(&[0.9, 2.0, 5.0]).unwrap());
            let g0 = GaussianDistribution::centered(cov0).unwrap();
            let g1 = GaussianDistribution::centered(cov1).unwrap();
            let t = monge_map(&g0, &g1).unwrap();
            let pushed = t.matrix.matmul(g0.covariance().mat()).matmul(&t.matrix.transpose());
            let rel = pushed.sub(g1.covariance().mat()).frobenius_norm()
                / g1.covariance().mat().frobenius_norm();
            assert!(rel < 1e-6, "pushforward error {rel}");
        }
    }

    #[test]
    fn monge_map_rejects_singular_source() {
        let g0 = gauss_diag(&[0.0, 0.0], &[1.0, 0.0]);
        let g1 = gauss_diag(&[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(monge_map(&g0, &g1), Err(Error::SingularCovariance { .. })));
    }

    #[test]
    fn degenerate_covariance_allowed_in_distances() {
        // Rank-deficient covariances flow through the spectral formulas.
        let g0 = gauss_diag(&[0.0, 0.0], &[0.0, 4.0]);
        let g1 = gauss_diag(&[0.0, 0.0], &[1.0, 1.0]);
        let r = pw_gaussian(&g0, &g1).unwrap();
        // sqrt spectra (0,2) vs (1,1): distance √(1+1) = √2.
        assert!((r.distance - 2.0_f64.sqrt()).abs() < 1e-10);
        assert!(bures_w2(&g0, &g1).is_ok());
    }
}
