//! Empirical Procrustes-Wasserstein distance for point clouds: center both
//! measures, then alternate between an OT solve at fixed orientation and an
//! orthogonal Procrustes step at fixed plan, over several restarts.
//!
//! The problem is nonconvex, so the restart schedule seeds the alternation
//! with the identity, both eigenbasis-alignment candidates of the empirical
//! covariances (near-optimal for elliptical data), and Haar-random draws.

use crate::error::{Error, Result};
use crate::linalg::{
    polar_orthogonal_factor, random_orthogonal, sym_eigen, Mat, OrthogonalMatrix, SymmetricMatrix,
};
use crate::ot::{
    cost_matrix, plan_cost, solve_exact, solve_sinkhorn, DiscreteMeasure, TransportPlan,
    DEFAULT_SINKHORN_EPS_FRACTION, DEFAULT_SINKHORN_MAX_ITER, DEFAULT_SINKHORN_TOL,
};
use crate::seed;
use rayon::prelude::*;

/// Entropic regularization, either absolute or relative to the mean of the
/// current cost matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SinkhornEpsilon {
    Absolute(f64),
    MeanCostFraction(f64),
}

impl SinkhornEpsilon {
    fn resolve(&self, mean_cost: f64) -> f64 {
        match *self {
            SinkhornEpsilon::Absolute(e) => e,
            SinkhornEpsilon::MeanCostFraction(f) => (f * mean_cost).max(f64::MIN_POSITIVE),
        }
    }
}

/// Which OT solver backs the inner transport step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OtBackend {
    Exact,
    Sinkhorn { epsilon: SinkhornEpsilon },
}

/// Configuration of the alternating solver.
#[derive(Debug, Clone)]
pub struct AlignConfig {
    /// Optimize over SO(d) instead of O(d).
    pub restrict_special: bool,
    /// Total number of initializations: identity, then the two eigenbasis
    /// candidates, then Haar-random draws.
    pub num_restarts: usize,
    pub max_outer_iter: usize,
    /// Stop a restart once the relative objective decrease falls below this.
    pub rel_tol: f64,
    pub ot_backend: OtBackend,
    pub seed: u64,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            restrict_special: false,
            num_restarts: 6,
            max_outer_iter: 200,
            rel_tol: 1e-9,
            ot_backend: OtBackend::Exact,
            seed: 0,
        }
    }
}

impl AlignConfig {
    fn validate(&self) -> Result<()> {
        if self.num_restarts < 1 {
            return Err(Error::InfeasibleWeights("num_restarts must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InfeasibleWeights("rel_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of the alternating minimization.
#[derive(Debug, Clone)]
pub struct PwResult {
    /// `√(final objective)`: the empirical Procrustes-Wasserstein distance.
    pub distance: f64,
    /// Orientation applied to the first (centered) measure.
    pub theta_star: OrthogonalMatrix,
    /// Final transport plan of the winning restart.
    pub plan: TransportPlan,
    /// Recovered optimal translation `θ*·mean(X) − mean(Y)`.
    pub translation: Vec<f64>,
    /// Objective value after each OT solve of the winning restart.
    pub trace: Vec<f64>,
    /// Whether that restart stopped by tolerance rather than iteration cap.
    pub converged: bool,
}

/// Removes the weighted barycenter; returns the centered measure and the
/// removed mean.
pub fn center(m: &DiscreteMeasure) -> (DiscreteMeasure, Vec<f64>) {
    let mean = m.weighted_mean();
    let neg: Vec<f64> = mean.iter().map(|x| -x).collect();
    let centered = m.translated(&neg).expect("translation preserves shape");
    (centered, mean)
}

/// Orthogonal matrix minimizing `Σ_ij Π_ij ‖θx_i − y_j‖²` at a fixed plan:
/// the polar factor of the plan-weighted cross-correlation `Σ Π_ij x_i y_jᵀ`.
pub fn procrustes_step(
    x: &DiscreteMeasure,
    y: &DiscreteMeasure,
    plan: &TransportPlan,
    restrict_special: bool,
) -> Result<OrthogonalMatrix> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!(
            "procrustes step between {}-dim and {}-dim clouds",
            x.dim(),
            y.dim()
        )));
    }
    if plan.shape() != (x.len(), y.len()) {
        return Err(Error::DimensionMismatch(format!(
            "plan shape {:?} for clouds of size {} and {}",
            plan.shape(),
            x.len(),
            y.len()
        )));
    }
    let d = x.dim();
    let mut cross = Mat::zeros(d, d);
    plan.for_each_entry(|i, j, w| {
        let xi = x.points().row(i);
        let yj = y.points().row(j);
        for k in 0..d {
            let wx = w * xi[k];
            for l in 0..d {
                let v = cross.get(k, l) + wx * yj[l];
                cross.set(k, l, v);
            }
        }
    });
    polar_orthogonal_factor(&cross, restrict_special)
}

/// Weighted second-moment matrix of a (centered) measure.
fn weighted_covariance(m: &DiscreteMeasure) -> SymmetricMatrix {
    let d = m.dim();
    let mut cov = Mat::zeros(d, d);
    for i in 0..m.len() {
        let row = m.points().row(i);
        let w = m.weights()[i];
        for k in 0..d {
            for l in k..d {
                let v = cov.get(k, l) + w * row[k] * row[l];
                cov.set(k, l, v);
            }
        }
    }
    for k in 0..d {
        for l in 0..k {
            cov.set(k, l, cov.get(l, k));
        }
    }
    SymmetricMatrix::new(cov).expect("covariance is square")
}

fn into_group(mat: Mat, restrict_special: bool) -> OrthogonalMatrix {
    let mut mat = mat;
    if restrict_special && mat.det() < 0.0 {
        let last = mat.cols() - 1;
        let flipped: Vec<f64> = mat.col(last).iter().map(|x| -x).collect();
        mat.set_col(last, &flipped);
    }
    OrthogonalMatrix::from_mat_unchecked(mat)
}

/// Largest dimension at which the eigenbasis candidates are expanded over
/// all 2^d eigenvector sign patterns. The canonical orientation of each
/// eigenbasis is arbitrary relative to the other cloud's, so without the
/// expansion an exactly-rotated copy can land in a sign-flipped basin.
const SIGN_VARIANT_MAX_DIM: usize = 3;

/// Restart schedule: identity, eigenbasis products in both transpose orders
/// (each expanded over sign patterns in low dimension), then Haar draws.
/// `num_restarts` counts schedule slots, not expanded candidates.
fn initial_thetas(
    x: &DiscreteMeasure,
    y: &DiscreteMeasure,
    cfg: &AlignConfig,
) -> Result<Vec<OrthogonalMatrix>> {
    let d = x.dim();
    let mut thetas = vec![OrthogonalMatrix::identity(d)];
    if cfg.num_restarts > 1 {
        let px = sym_eigen(&weighted_covariance(x))?;
        let py = sym_eigen(&weighted_covariance(y))?;
        let signs: Vec<Vec<f64>> = if d <= SIGN_VARIANT_MAX_DIM {
            (0..1usize << d)
                .map(|bits| (0..d).map(|k| if bits >> k & 1 == 1 { -1.0 } else { 1.0 }).collect())
                .collect()
        } else {
            vec![vec![1.0; d]]
        };
        for s in &signs {
            let flip = Mat::from_diag(s);
            let a = py.eigenvectors().matmul(&flip).matmul(&px.eigenvectors().transpose());
            thetas.push(into_group(a, cfg.restrict_special));
        }
        if cfg.num_restarts > 2 {
            for s in &signs {
                let flip = Mat::from_diag(s);
                let b = px.eigenvectors().transpose().matmul(&flip).matmul(py.eigenvectors());
                thetas.push(into_group(b, cfg.restrict_special));
            }
        }
    }
    for r in 3..cfg.num_restarts {
        thetas.push(random_orthogonal(
            d,
            seed::derive(cfg.seed, 0xA119, r as u64),
            cfg.restrict_special,
        ));
    }
    Ok(thetas)
}

struct RestartOutcome {
    objective: f64,
    theta: OrthogonalMatrix,
    plan: TransportPlan,
    trace: Vec<f64>,
    converged: bool,
}

fn run_restart(
    xc: &DiscreteMeasure,
    yc: &DiscreteMeasure,
    theta0: OrthogonalMatrix,
    cfg: &AlignConfig,
) -> Result<RestartOutcome> {
    let mut theta = theta0;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut prev_obj = f64::INFINITY;
    let mut current: Option<(OrthogonalMatrix, TransportPlan, f64)> = None;

    for iter in 0..cfg.max_outer_iter.max(1) {
        let rotated = xc.pushforward(&theta)?;
        let c = cost_matrix(&rotated, yc)?;
        let plan = match cfg.ot_backend {
            OtBackend::Exact => solve_exact(&rotated, yc, &c)?,
            OtBackend::Sinkhorn { epsilon } => {
                let eps = epsilon.resolve(c.mean());
                solve_sinkhorn(
                    &rotated,
                    yc,
                    &c,
                    eps,
                    DEFAULT_SINKHORN_MAX_ITER,
                    DEFAULT_SINKHORN_TOL,
                )?
            }
        };
        let obj = plan_cost(&plan, &c)?;
        trace.push(obj);
        current = Some((theta.clone(), plan, obj));
        if iter > 0 && prev_obj - obj <= cfg.rel_tol * prev_obj.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        prev_obj = obj;
        let (_, ref plan_ref, _) = current.as_ref().unwrap();
        theta = procrustes_step(xc, yc, plan_ref, cfg.restrict_special)?;
    }

    let (theta, plan, objective) = current.expect("at least one outer iteration ran");
    Ok(RestartOutcome { objective, theta, plan, trace, converged })
}

/// Empirical Procrustes-Wasserstein distance between two point clouds.
///
/// Centers both measures (recording the recovered optimal translation),
/// alternates OT solves on `‖θx_i − y_j‖²` with Procrustes updates of θ,
/// and returns the best of `num_restarts` initializations. The trace of the
/// winning restart is non-increasing with the exact backend.
pub fn pw_empirical(
    x: &DiscreteMeasure,
    y: &DiscreteMeasure,
    cfg: &AlignConfig,
) -> Result<PwResult> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!(
            "point clouds have dimensions {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    cfg.validate()?;

    let (xc, mean_x) = center(x);
    let (yc, mean_y) = center(y);
    let thetas = initial_thetas(&xc, &yc, cfg)?;

    // Restarts are independent; results are combined deterministically
    // (lowest objective, ties broken by restart index) regardless of how
    // rayon schedules them.
    let outcomes: Vec<Result<RestartOutcome>> = thetas
        .into_par_iter()
        .map(|theta0| run_restart(&xc, &yc, theta0, cfg))
        .collect();

    let mut best: Option<RestartOutcome> = None;
    for outcome in outcomes {
        let outcome = outcome?;
        let better = match &best {
            None => true,
            Some(b) => outcome.objective < b.objective,
        };
        if better {
            best = Some(outcome);
        }
    }
    let best = best.expect("num_restarts >= 1");

    let translation: Vec<f64> = best
        .theta
        .apply(&mean_x)
        .iter()
        .zip(&mean_y)
        .map(|(tx, my)| tx - my)
        .collect();

    Ok(PwResult {
        distance: best.objective.max(0.0).sqrt(),
        theta_star: best.theta,
        plan: best.plan,
        translation,
        trace: best.trace,
        converged: best.converged,
    })
}
