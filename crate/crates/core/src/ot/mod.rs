//! Discrete optimal transport with squared Euclidean ground cost: an exact
//! solver (assignment shortcut for uniform equal-size measures, transportation
//! simplex otherwise) and a log-domain entropic Sinkhorn solver.

mod assignment;
mod simplex;
mod sinkhorn;

use crate::error::{Error, Result};
use crate::linalg::{Mat, OrthogonalMatrix};
use rayon::prelude::*;

/// Default entropic regularization as a fraction of the mean cost.
pub const DEFAULT_SINKHORN_EPS_FRACTION: f64 = 0.05;
/// Default L1 marginal tolerance for Sinkhorn convergence.
pub const DEFAULT_SINKHORN_TOL: f64 = 1e-9;
/// Default Sinkhorn iteration cap.
pub const DEFAULT_SINKHORN_MAX_ITER: usize = 10_000;

const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Weighted point cloud: `n` support points in ℝ^d with weights summing to 1.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    points: Mat,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Validates points and weights; nonnegative weights with a positive sum
    /// are renormalized to total mass 1.
    pub fn new(points: Mat, weights: Vec<f64>) -> Result<Self> {
        if points.rows() == 0 || points.cols() == 0 {
            return Err(Error::DimensionMismatch(
                "a measure needs at least one point and one coordinate".into(),
            ));
        }
        if weights.len() != points.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} points",
                weights.len(),
                points.rows()
            )));
        }
        if !points.is_finite() {
            return Err(Error::NonFinite);
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InfeasibleWeights(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InfeasibleWeights("weights sum to zero".into()));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(DiscreteMeasure { points, weights })
    }

    /// Uniform weights `1/n` on the given points.
    pub fn uniform(points: Mat) -> Result<Self> {
        let n = points.rows();
        Self::new(points, vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires n >= 1
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn points(&self) -> &Mat {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|x| (x - w).abs() <= 1e-12)
    }

    pub fn weighted_mean(&self) -> Vec<f64> {
        let d = self.dim();
        let mut mean = vec![0.0; d];
        for i in 0..self.len() {
            let row = self.points.row(i);
            let w = self.weights[i];
            for k in 0..d {
                mean[k] += w * row[k];
            }
        }
        mean
    }

    /// Pushforward by an orthogonal matrix: every point becomes `Q·x`.
    pub fn pushforward(&self, q: &OrthogonalMatrix) -> Result<Self> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "pushforward by {}-dim orthogonal of {}-dim points",
                q.dim(),
                self.dim()
            )));
        }
        // Row convention: (Q x_i)ᵀ = x_iᵀ Qᵀ.
        let points = self.points.matmul(&q.mat().transpose());
        Ok(DiscreteMeasure { points, weights: self.weights.clone() })
    }

    /// Shifts every point by `v`.
    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "translation of length {} for {}-dim points",
                v.len(),
                self.dim()
            )));
        }
        let mut points = self.points.clone();
        for i in 0..points.rows() {
            let row = points.row_mut(i);
            for (x, t) in row.iter_mut().zip(v) {
                *x += t;
            }
        }
        Ok(DiscreteMeasure { points, weights: self.weights.clone() })
    }
}

/// Matrix of pairwise squared Euclidean distances.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    values: Mat,
}

impl CostMatrix {
    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn mat(&self) -> &Mat {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        let total: f64 = self.values.data().iter().sum();
        total / (self.rows() * self.cols()) as f64
    }
}

/// `values[i][j] = ‖x_i − y_j‖²`. Rows are computed in parallel; the output
/// is exactly transposed under swapping the arguments.
pub fn cost_matrix(x: &DiscreteMeasure, y: &DiscreteMeasure) -> Result<CostMatrix> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cost matrix between {}-dim and {}-dim points",
            x.dim(),
            y.dim()
        )));
    }
    let n = x.len();
    let m = y.len();
    let d = x.dim();
    let xp = x.points();
    let yp = y.points();
    let data: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let xi = xp.row(i);
            (0..m).map(move |j| {
                let yj = yp.row(j);
                let mut acc = 0.0;
                for k in 0..d {
                    let diff = xi[k] - yj[k];
                    acc += diff * diff;
                }
                acc
            })
        })
        .collect();
    Ok(CostMatrix { values: Mat::from_vec(n, m, data) })
}

/// Which algorithm produced a plan, and at what regularization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverTag {
    Exact,
    Sinkhorn { epsilon: f64 },
}

#[derive(Debug, Clone)]
enum PlanRepr {
    Dense(Mat),
    /// One entry per source point: mass `mass[i]` at `(i, cols[i])`.
    Matching { cols: Vec<usize>, mass: Vec<f64>, num_cols: usize },
}

/// Coupling with prescribed marginals, plus the dual potentials recovered by
/// the solver that produced it.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    repr: PlanRepr,
    dual_potentials: Option<(Vec<f64>, Vec<f64>)>,
    solver_tag: SolverTag,
}

impl TransportPlan {
    pub fn shape(&self) -> (usize, usize) {
        match &self.repr {
            PlanRepr::Dense(m) => (m.rows(), m.cols()),
            PlanRepr::Matching { cols, num_cols, .. } => (cols.len(), *num_cols),
        }
    }

    pub fn solver_tag(&self) -> SolverTag {
        self.solver_tag
    }

    /// Kantorovich potentials `(φ, ψ)` when the solver recovered them.
    pub fn dual_potentials(&self) -> Option<(&[f64], &[f64])> {
        self.dual_potentials
            .as_ref()
            .map(|(u, v)| (u.as_slice(), v.as_slice()))
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            PlanRepr::Dense(m) => m.get(i, j),
            PlanRepr::Matching { cols, mass, .. } => {
                if cols[i] == j {
                    mass[i]
                } else {
                    0.0
                }
            }
        }
    }

    /// Visits every stored (possibly zero) entry as `(row, col, mass)`.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, f64)) {
        match &self.repr {
            PlanRepr::Dense(m) => {
                for i in 0..m.rows() {
                    for (j, &v) in m.row(i).iter().enumerate() {
                        if v != 0.0 {
                            f(i, j, v);
                        }
                    }
                }
            }
            PlanRepr::Matching { cols, mass, .. } => {
                for (i, (&j, &w)) in cols.iter().zip(mass).enumerate() {
                    f(i, j, w);
                }
            }
        }
    }

    /// Nonzero entries as triplets.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        self.for_each_entry(|i, j, v| out.push((i, j, v)));
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let (n, _) = self.shape();
        let mut sums = vec![0.0; n];
        self.for_each_entry(|i, _, v| sums[i] += v);
        sums
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let (_, m) = self.shape();
        let mut sums = vec![0.0; m];
        self.for_each_entry(|_, j, v| sums[j] += v);
        sums
    }

    pub fn to_dense(&self) -> Mat {
        match &self.repr {
            PlanRepr::Dense(m) => m.clone(),
            PlanRepr::Matching { cols, mass, num_cols } => {
                let mut m = Mat::zeros(cols.len(), *num_cols);
                for (i, (&j, &w)) in cols.iter().zip(mass).enumerate() {
                    m.set(i, j, w);
                }
                m
            }
        }
    }

    /// Max absolute row/column marginal deviation from the given measures.
    pub fn marginal_violation(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let rows = self.row_sums();
        let cols = self.col_sums();
        let r = rows
            .iter()
            .zip(mu.weights())
            .fold(0.0_f64, |m, (s, w)| m.max((s - w).abs()));
        let c = cols
            .iter()
            .zip(nu.weights())
            .fold(0.0_f64, |m, (s, w)| m.max((s - w).abs()));
        r.max(c)
    }

    /// Dual objective `Σ φ_i μ_i + Σ ψ_j ν_j`, when potentials are present.
    pub fn dual_objective(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Option<f64> {
        let (u, v) = self.dual_potentials()?;
        let a: f64 = u.iter().zip(mu.weights()).map(|(x, w)| x * w).sum();
        let b: f64 = v.iter().zip(nu.weights()).map(|(x, w)| x * w).sum();
        Some(a + b)
    }
}

/// Max violation of dual feasibility `φ_i + ψ_j ≤ C_ij` over all cells;
/// `None` when the plan carries no potentials.
pub fn dual_feasibility_violation(plan: &TransportPlan, c: &CostMatrix) -> Option<f64> {
    let (u, v) = plan.dual_potentials()?;
    let mut worst = 0.0_f64;
    for i in 0..c.rows() {
        for j in 0..c.cols() {
            worst = worst.max(u[i] + v[j] - c.get(i, j));
        }
    }
    Some(worst)
}

/// `Σ_ij Π_ij C_ij`; the squared W2 distance when `C` holds squared distances.
pub fn plan_cost(plan: &TransportPlan, c: &CostMatrix) -> Result<f64> {
    if plan.shape() != (c.rows(), c.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "plan shape {:?} vs cost {}x{}",
            plan.shape(),
            c.rows(),
            c.cols()
        )));
    }
    let mut acc = 0.0;
    plan.for_each_entry(|i, j, v| acc += v * c.get(i, j));
    Ok(acc)
}

fn check_instance(mu: &DiscreteMeasure, nu: &DiscreteMeasure, c: &CostMatrix) -> Result<()> {
    if c.rows() != mu.len() || c.cols() != nu.len() {
        return Err(Error::DimensionMismatch(format!(
            "cost is {}x{} for measures of size {} and {}",
            c.rows(),
            c.cols(),
            mu.len(),
            nu.len()
        )));
    }
    let sa: f64 = mu.weights().iter().sum();
    let sb: f64 = nu.weights().iter().sum();
    if (sa - 1.0).abs() > WEIGHT_SUM_TOL || (sb - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InfeasibleWeights(format!(
            "weight sums {sa} and {sb} are not both 1"
        )));
    }
    Ok(())
}

/// Exact Kantorovich solver. Uniform equal-size instances go through a
/// shortest-augmenting-path assignment solver; everything else through the
/// transportation simplex. Deterministic for fixed input, and the recovered
/// duals certify optimality by complementary slackness.
pub fn solve_exact(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    c: &CostMatrix,
) -> Result<TransportPlan> {
    check_instance(mu, nu, c)?;
    let plan = if mu.len() == nu.len() && mu.is_uniform() && nu.is_uniform() {
        let (cols, u, v) = assignment::solve_assignment(c.mat())?;
        let mass = mu.weights().to_vec();
        TransportPlan {
            repr: PlanRepr::Matching { cols, mass, num_cols: nu.len() },
            dual_potentials: Some((u, v)),
            solver_tag: SolverTag::Exact,
        }
    } else {
        let (dense, u, v) = simplex::solve_transportation(mu.weights(), nu.weights(), c.mat())?;
        TransportPlan {
            repr: PlanRepr::Dense(dense),
            dual_potentials: Some((u, v)),
            solver_tag: SolverTag::Exact,
        }
    };
    debug_assert!({
        let primal = plan_cost(&plan, c).unwrap();
        let dual = plan.dual_objective(mu, nu).unwrap();
        let scale = 1.0 + primal.abs();
        let feas = dual_feasibility_violation(&plan, c).unwrap();
        primal - dual <= 1e-7 * scale && feas <= 1e-7 * (1.0 + c.mat().max_abs())
    });
    Ok(plan)
}

/// Log-domain Sinkhorn with a final rounding step that restores the marginals.
///
/// Iterates log-sum-exp updates until the L1 marginal violation drops below
/// `tol`, then rounds the entropic plan onto the transport polytope. The dual
/// potentials approximate the Kantorovich potentials as ε → 0.
pub fn solve_sinkhorn(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    c: &CostMatrix,
    epsilon: f64,
    max_iter: usize,
    tol: f64,
) -> Result<TransportPlan> {
    Ok(solve_sinkhorn_traced(mu, nu, c, epsilon, max_iter, tol, false)?.0)
}

/// [`solve_sinkhorn`] that optionally records the transport cost of the
/// rounded (feasible) iterate after every iteration at the target ε, for
/// convergence diagnostics. Warm-start iterations at larger ε are not traced.
pub fn solve_sinkhorn_traced(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    c: &CostMatrix,
    epsilon: f64,
    max_iter: usize,
    tol: f64,
    want_trace: bool,
) -> Result<(TransportPlan, Vec<f64>)> {
    check_instance(mu, nu, c)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InfeasibleWeights(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InfeasibleWeights(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let out = sinkhorn::sinkhorn_log(
        mu.weights(),
        nu.weights(),
        c.mat(),
        epsilon,
        max_iter,
        tol,
        want_trace,
    )?;
    let plan = TransportPlan {
        repr: PlanRepr::Dense(out.plan),
        dual_potentials: Some((out.f, out.g)),
        solver_tag: SolverTag::Sinkhorn { epsilon },
    };
    Ok((plan, out.cost_trace))
}
