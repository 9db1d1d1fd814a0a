//! Network-simplex-style solver for the transportation problem on the
//! complete bipartite graph: spanning-tree basis, dual (u, v) pricing,
//! cycle pivots. Handles degenerate bases with a Bland fallback.

use crate::error::{Error, Result};
use crate::linalg::Mat;

#[derive(Debug, Clone, Copy)]
struct BasisCell {
    row: usize,
    col: usize,
    flow: f64,
}

/// Exact solution of `min Σ Π_ij C_ij` over the transportation polytope with
/// marginals `a` (rows) and `b` (cols). Returns the dense plan and the duals.
pub(crate) fn solve_transportation(
    a: &[f64],
    b: &[f64],
    cost: &Mat,
) -> Result<(Mat, Vec<f64>, Vec<f64>)> {
    let n = a.len();
    let m = b.len();
    debug_assert_eq!(cost.rows(), n);
    debug_assert_eq!(cost.cols(), m);

    let mut basis = northwest_corner(a, b);
    debug_assert_eq!(basis.len(), n + m - 1);

    let scale = 1.0 + cost.max_abs();
    let opt_tol = 1e-11 * scale;
    let degenerate_flow = 1e-14;

    // A generous cap: the simplex terminates long before this on desk-scale
    // instances; hitting it means something is genuinely wrong.
    let max_pivots = 1000 * (n + m) * (n + m) + 10_000;
    let mut degenerate_streak = 0usize;
    let mut bland = false;

    let mut u = vec![0.0_f64; n];
    let mut v = vec![0.0_f64; m];

    for _pivot in 0..max_pivots {
        compute_duals(&basis, cost, n, m, &mut u, &mut v)?;

        // Entering arc: most negative reduced cost, or first negative under
        // Bland's rule once degeneracy persists.
        let mut enter: Option<(usize, usize)> = None;
        let mut most_negative = -opt_tol;
        'scan: for i in 0..n {
            let row = cost.row(i);
            for j in 0..m {
                let r = row[j] - u[i] - v[j];
                if r < most_negative {
                    enter = Some((i, j));
                    most_negative = r;
                    if bland {
                        break 'scan;
                    }
                }
            }
        }
        let Some((ei, ej)) = enter else {
            // Optimal: no improving arc remains.
            let mut plan = Mat::zeros(n, m);
            for cell in &basis {
                plan.set(cell.row, cell.col, cell.flow.max(0.0));
            }
            return Ok((plan, u, v));
        };

        // The unique tree path from row ei to col ej, then pivot around the
        // cycle closed by the entering arc.
        let path = tree_path(&basis, n, m, ei, ej)?;
        // Entering arc takes +δ; path edges alternate −, +, − … starting at −.
        let mut delta = f64::INFINITY;
        let mut leaving = usize::MAX;
        for (pos, &edge) in path.iter().enumerate() {
            if pos % 2 == 0 {
                let f = basis[edge].flow;
                if f < delta {
                    delta = f;
                    leaving = edge;
                }
            }
        }
        if leaving == usize::MAX {
            return Err(Error::Internal("transportation pivot found no leaving arc".into()));
        }
        for (pos, &edge) in path.iter().enumerate() {
            if pos % 2 == 0 {
                basis[edge].flow -= delta;
            } else {
                basis[edge].flow += delta;
            }
        }
        basis[leaving] = BasisCell { row: ei, col: ej, flow: delta };

        if delta <= degenerate_flow {
            degenerate_streak += 1;
            if degenerate_streak > 64 {
                bland = true;
            }
        } else {
            degenerate_streak = 0;
            bland = false;
        }
    }
    Err(Error::Internal("transportation simplex exceeded its pivot budget".into()))
}

/// Northwest-corner initial basis: exactly n+m−1 cells forming a staircase
/// spanning tree, including degenerate zero-flow cells.
fn northwest_corner(a: &[f64], b: &[f64]) -> Vec<BasisCell> {
    let n = a.len();
    let m = b.len();
    let mut a_rem = a.to_vec();
    let mut b_rem = b.to_vec();
    let mut basis = Vec::with_capacity(n + m - 1);
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let f = a_rem[i].min(b_rem[j]).max(0.0);
        basis.push(BasisCell { row: i, col: j, flow: f });
        a_rem[i] -= f;
        b_rem[j] -= f;
        if i == n - 1 && j == m - 1 {
            break;
        }
        if a_rem[i] <= b_rem[j] && i < n - 1 {
            i += 1;
        } else if j < m - 1 {
            j += 1;
        } else {
            i += 1;
        }
    }
    basis
}

/// Solves `u_i + v_j = C_ij` over the basis tree, anchored at `u_0 = 0`.
fn compute_duals(
    basis: &[BasisCell],
    cost: &Mat,
    n: usize,
    m: usize,
    u: &mut [f64],
    v: &mut [f64],
) -> Result<()> {
    let mut row_known = vec![false; n];
    let mut col_known = vec![false; m];
    let mut row_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut col_edges: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (e, cell) in basis.iter().enumerate() {
        row_edges[cell.row].push(e);
        col_edges[cell.col].push(e);
    }

    u[0] = 0.0;
    row_known[0] = true;
    // Frontier of nodes whose dual is fixed; rows are 0..n, cols n..n+m.
    let mut stack = vec![0usize];
    let mut fixed = 1usize;
    while let Some(node) = stack.pop() {
        if node < n {
            for &e in &row_edges[node] {
                let cell = basis[e];
                if !col_known[cell.col] {
                    v[cell.col] = cost.get(cell.row, cell.col) - u[cell.row];
                    col_known[cell.col] = true;
                    fixed += 1;
                    stack.push(n + cell.col);
                }
            }
        } else {
            let col = node - n;
            for &e in &col_edges[col] {
                let cell = basis[e];
                if !row_known[cell.row] {
                    u[cell.row] = cost.get(cell.row, cell.col) - v[cell.col];
                    row_known[cell.row] = true;
                    fixed += 1;
                    stack.push(cell.row);
                }
            }
        }
    }
    if fixed != n + m {
        return Err(Error::Internal("transportation basis is not a spanning tree".into()));
    }
    Ok(())
}

/// Edge sequence of the unique tree path from row node `ri` to col node `cj`.
fn tree_path(basis: &[BasisCell], n: usize, m: usize, ri: usize, cj: usize) -> Result<Vec<usize>> {
    let total = n + m;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); total]; // (neighbor, edge)
    for (e, cell) in basis.iter().enumerate() {
        adj[cell.row].push((n + cell.col, e));
        adj[n + cell.col].push((cell.row, e));
    }
    let start = ri;
    let goal = n + cj;
    let mut parent_edge = vec![usize::MAX; total];
    let mut parent_node = vec![usize::MAX; total];
    let mut visited = vec![false; total];
    visited[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == goal {
            break;
        }
        for &(next, e) in &adj[node] {
            if !visited[next] {
                visited[next] = true;
                parent_edge[next] = e;
                parent_node[next] = node;
                queue.push_back(next);
            }
        }
    }
    if !visited[goal] {
        return Err(Error::Internal("basis tree is disconnected".into()));
    }
    let mut path = Vec::new();
    let mut node = goal;
    while node != start {
        path.push(parent_edge[node]);
        node = parent_node[node];
    }
    // Path currently runs goal→start; the pivot needs start→goal ordering so
    // that alternation begins at the arc adjacent to the entering row.
    path.reverse();
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan_cost(plan: &Mat, cost: &Mat) -> f64 {
        plan.data().iter().zip(cost.data()).map(|(p, c)| p * c).sum()
    }

    #[test]
    fn single_cell_instance() {
        let (plan, _, _) =
            solve_transportation(&[1.0], &[1.0], &Mat::from_rows(&[vec![9.0]])).unwrap();
        assert_eq!(plan.get(0, 0), 1.0);
    }

    #[test]
    fn rectangular_instance_is_feasible_and_optimal() {
        // 2 sources, 3 sinks; optimum routes everything along the zeros.
        let cost = Mat::from_rows(&[vec![0.0, 5.0, 5.0], vec![5.0, 0.0, 0.0]]);
        let a = [0.5, 0.5];
        let b = [0.5, 0.25, 0.25];
        let (plan, u, v) = solve_transportation(&a, &b, &cost).unwrap();
        assert!((plan_cost(&plan, &cost) - 0.0).abs() < 1e-12);
        for i in 0..2 {
            let s: f64 = plan.row(i).iter().sum();
            assert!((s - a[i]).abs() < 1e-12);
        }
        for j in 0..3 {
            let s: f64 = plan.col(j).iter().sum();
            assert!((s - b[j]).abs() < 1e-12);
        }
        for i in 0..2 {
            for j in 0..3 {
                assert!(cost.get(i, j) - u[i] - v[j] >= -1e-10);
            }
        }
    }

    #[test]
    fn nonuniform_weights_match_small_lp_by_hand() {
        // min over Π with marginals (0.75, 0.25) / (0.25, 0.75):
        // C = [[0,1],[1,0]] → move 0.5 across at cost 0.5.
        let cost = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let (plan, _, _) = solve_transportation(&[0.75, 0.25], &[0.25, 0.75], &cost).unwrap();
        assert!((plan_cost(&plan, &cost) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_weights_terminate() {
        // Zero-weight source point forces degenerate pivots.
        let cost = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0], vec![2.0, 0.5]]);
        let (plan, _, _) = solve_transportation(&[0.5, 0.0, 0.5], &[0.5, 0.5], &cost).unwrap();
        let rows: Vec<f64> = (0..3).map(|i| plan.row(i).iter().sum()).collect();
        assert!((rows[0] - 0.5).abs() < 1e-12);
        assert!(rows[1].abs() < 1e-12);
        assert!((rows[2] - 0.5).abs() < 1e-12);
    }
}
