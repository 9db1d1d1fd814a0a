//! Entropic OT in the log domain: log-sum-exp potential updates from the
//! first iteration, an ε-scaling warm start for small regularization, and a
//! final rounding step that projects the entropic plan onto the polytope.

use crate::error::{Error, Result};
use crate::linalg::Mat;

pub(crate) struct SinkhornOutcome {
    pub plan: Mat,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    #[allow(dead_code)]
    pub iterations: usize,
    /// Transport cost of the rounded (feasible) iterate per iteration at the
    /// target ε, when tracing was requested.
    pub cost_trace: Vec<f64>,
}

#[inline]
fn logsumexp(iter: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = iter.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = iter.map(|x| (x - max).exp()).sum();
    max + sum.ln()
}

struct State<'a> {
    a: &'a [f64],
    b: &'a [f64],
    log_a: Vec<f64>,
    log_b: Vec<f64>,
    cost: &'a Mat,
    f: Vec<f64>,
    g: Vec<f64>,
}

impl State<'_> {
    /// One full (f, g) update at regularization `eps`; returns the L1 row
    /// marginal violation (columns are exact right after the g-update).
    fn iterate(&mut self, eps: f64) -> Result<f64> {
        let n = self.a.len();
        let m = self.b.len();
        for i in 0..n {
            if self.log_a[i] == f64::NEG_INFINITY {
                self.f[i] = f64::NEG_INFINITY;
                continue;
            }
            let row = self.cost.row(i);
            let g = &self.g;
            let lse = logsumexp((0..m).map(|j| (g[j] - row[j]) / eps));
            self.f[i] = eps * (self.log_a[i] - lse);
        }
        for j in 0..m {
            if self.log_b[j] == f64::NEG_INFINITY {
                self.g[j] = f64::NEG_INFINITY;
                continue;
            }
            let cost = self.cost;
            let f = &self.f;
            let lse = logsumexp((0..n).map(|i| (f[i] - cost.get(i, j)) / eps));
            self.g[j] = eps * (self.log_b[j] - lse);
        }
        if self.f.iter().chain(&self.g).any(|x| x.is_nan() || *x == f64::INFINITY) {
            return Err(Error::NumericalOverflow);
        }

        let mut violation = 0.0;
        for i in 0..n {
            if self.log_a[i] == f64::NEG_INFINITY {
                continue;
            }
            let row = self.cost.row(i);
            let g = &self.g;
            let lse = logsumexp((0..m).map(|j| (g[j] - row[j]) / eps));
            let row_sum = ((self.f[i] / eps) + lse).exp();
            violation += (row_sum - self.a[i]).abs();
        }
        Ok(violation)
    }

    /// Rescales potentials when moving from `old_eps` to `new_eps`, keeping
    /// the Gibbs plan exp((f⊕g−C)/ε) continuous across the switch.
    fn rescale(&mut self, old_eps: f64, new_eps: f64) {
        let ratio = new_eps / old_eps;
        for x in self.f.iter_mut().chain(self.g.iter_mut()) {
            if x.is_finite() {
                *x *= ratio;
            }
        }
    }
}

pub(crate) fn sinkhorn_log(
    a: &[f64],
    b: &[f64],
    cost: &Mat,
    eps: f64,
    max_iter: usize,
    tol: f64,
    want_trace: bool,
) -> Result<SinkhornOutcome> {
    let n = a.len();
    let m = b.len();
    let mut state = State {
        a,
        b,
        log_a: a.iter().map(|&x| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY }).collect(),
        log_b: b.iter().map(|&x| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY }).collect(),
        cost,
        f: vec![0.0; n],
        g: vec![0.0; m],
    };

    let mean_cost = cost.data().iter().sum::<f64>() / (n * m) as f64;
    let mut iterations_used = 0usize;
    let mut violation = f64::INFINITY;

    // ε-scaling warm start: halve from mean(C) down to the target, carrying
    // the potentials along. Keeps small-ε runs from crawling.
    let warm_tol = tol.max(1e-6);
    let mut level_eps = mean_cost;
    let mut previous_eps = None;
    while level_eps > eps && iterations_used < max_iter {
        if let Some(prev) = previous_eps {
            state.rescale(prev, level_eps);
        }
        for _ in 0..200 {
            if iterations_used >= max_iter {
                break;
            }
            violation = state.iterate(level_eps)?;
            iterations_used += 1;
            if violation < warm_tol {
                break;
            }
        }
        previous_eps = Some(level_eps);
        level_eps /= 2.0;
    }
    if let Some(prev) = previous_eps {
        state.rescale(prev, eps);
    }

    let mut cost_trace = Vec::new();
    while iterations_used < max_iter {
        violation = state.iterate(eps)?;
        iterations_used += 1;
        if want_trace {
            let plan = build_and_round(a, b, cost, &state.f, &state.g, eps);
            let c: f64 = plan.data().iter().zip(cost.data()).map(|(p, c)| p * c).sum();
            cost_trace.push(c);
        }
        if violation < tol {
            let plan = build_and_round(a, b, cost, &state.f, &state.g, eps);
            return Ok(SinkhornOutcome {
                plan,
                f: state.f,
                g: state.g,
                iterations: iterations_used,
                cost_trace,
            });
        }
    }
    Err(Error::NotConverged { iterations: max_iter, residual: violation })
}

/// Materializes the entropic plan and rounds it onto the polytope:
/// row scaling capped at 1, then column scaling capped at 1, then a rank-one
/// correction spreading the leftover mass. Restores both marginals exactly
/// up to floating-point addition error.
fn build_and_round(a: &[f64], b: &[f64], cost: &Mat, f: &[f64], g: &[f64], eps: f64) -> Mat {
    let n = a.len();
    let m = b.len();
    let mut plan = Mat::zeros(n, m);
    for i in 0..n {
        if f[i] == f64::NEG_INFINITY {
            continue;
        }
        let row = cost.row(i);
        let out = plan.row_mut(i);
        for j in 0..m {
            if g[j] == f64::NEG_INFINITY {
                continue;
            }
            let lp = (f[i] + g[j] - row[j]) / eps;
            if lp > -700.0 {
                out[j] = lp.exp();
            }
        }
    }

    for i in 0..n {
        let sum: f64 = plan.row(i).iter().sum();
        if sum > 0.0 {
            let s = (a[i] / sum).min(1.0);
            if s < 1.0 {
                for x in plan.row_mut(i) {
                    *x *= s;
                }
            }
        }
    }
    let mut col_sums = vec![0.0_f64; m];
    for i in 0..n {
        for (j, &x) in plan.row(i).iter().enumerate() {
            col_sums[j] += x;
        }
    }
    let col_scale: Vec<f64> = (0..m)
        .map(|j| if col_sums[j] > 0.0 { (b[j] / col_sums[j]).min(1.0) } else { 1.0 })
        .collect();
    for i in 0..n {
        for (j, x) in plan.row_mut(i).iter_mut().enumerate() {
            *x *= col_scale[j];
        }
    }

    let mut row_err: Vec<f64> = vec![0.0; n];
    let mut col_err: Vec<f64> = b.to_vec();
    let mut total_err = 0.0;
    for i in 0..n {
        let sum: f64 = plan.row(i).iter().sum();
        row_err[i] = (a[i] - sum).max(0.0);
        total_err += row_err[i];
        for (j, &x) in plan.row(i).iter().enumerate() {
            col_err[j] -= x;
        }
    }
    if total_err > 0.0 {
        for i in 0..n {
            if row_err[i] == 0.0 {
                continue;
            }
            let scale = row_err[i] / total_err;
            let row = plan.row_mut(i);
            for (j, x) in row.iter_mut().enumerate() {
                *x += scale * col_err[j].max(0.0);
            }
        }
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logsumexp_handles_degenerate_inputs() {
        assert_eq!(logsumexp([f64::NEG_INFINITY].into_iter()), f64::NEG_INFINITY);
        let v = logsumexp([0.0, 0.0].into_iter());
        assert!((v - (2.0_f64).ln()).abs() < 1e-15);
        let v = logsumexp([-1e6, -1e6 + 1.0].into_iter());
        assert!(v.is_finite());
    }

    #[test]
    fn trivial_one_by_one() {
        let cost = Mat::from_rows(&[vec![4.2]]);
        for eps in [1.0, 0.1, 0.003] {
            let out = sinkhorn_log(&[1.0], &[1.0], &cost, eps, 1000, 1e-12, false).unwrap();
            assert!((out.plan.get(0, 0) - 1.0).abs() < 1e-9, "eps {eps}");
        }
    }

    #[test]
    fn zero_weight_rows_carry_no_mass() {
        let cost = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let out = sinkhorn_log(&[1.0, 0.0], &[0.5, 0.5], &cost, 0.5, 5000, 1e-10, false).unwrap();
        assert!(out.plan.get(1, 0).abs() < 1e-12);
        assert!(out.plan.get(1, 1).abs() < 1e-12);
        let top: f64 = out.plan.row(0).iter().sum();
        assert!((top - 1.0).abs() < 1e-8);
    }
}
