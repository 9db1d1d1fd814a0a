//! Exact linear assignment by shortest augmenting paths over reduced costs
//! (Jonker-Volgenant family). Used as the fast path of the exact OT solver
//! when both measures are uniform with equal support sizes.

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Minimum-cost perfect matching on a square cost matrix.
///
/// Returns `(cols, u, v)` where row `i` is matched to column `cols[i]` and
/// `(u, v)` are dual prices satisfying `C[i][j] − u[i] − v[j] ≥ 0` with
/// equality on matched pairs (up to floating-point noise).
pub(crate) fn solve_assignment(cost: &Mat) -> Result<(Vec<usize>, Vec<f64>, Vec<f64>)> {
    let n = cost.rows();
    debug_assert_eq!(n, cost.cols());
    const UNSET: usize = usize::MAX;

    let mut u = vec![0.0_f64; n];
    let mut v = vec![0.0_f64; n];
    let mut col4row = vec![UNSET; n];
    let mut row4col = vec![UNSET; n];

    let mut shortest = vec![0.0_f64; n];
    let mut path = vec![UNSET; n];
    let mut scanned_rows = vec![false; n];
    let mut scanned_cols = vec![false; n];
    let mut remaining: Vec<usize> = Vec::with_capacity(n);

    for cur_row in 0..n {
        shortest.fill(f64::INFINITY);
        path.fill(UNSET);
        scanned_rows.fill(false);
        scanned_cols.fill(false);
        remaining.clear();
        remaining.extend((0..n).rev());

        let mut min_val = 0.0_f64;
        let mut i = cur_row;
        let mut sink = UNSET;
        while sink == UNSET {
            scanned_rows[i] = true;
            let row = cost.row(i);
            let ui = u[i];
            let mut lowest = f64::INFINITY;
            let mut index = UNSET;
            for (it, &j) in remaining.iter().enumerate() {
                let r = min_val + row[j] - ui - v[j];
                if r < shortest[j] {
                    shortest[j] = r;
                    path[j] = i;
                }
                // Prefer unassigned columns on ties so augmentation ends sooner.
                if shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == UNSET) {
                    lowest = shortest[j];
                    index = it;
                }
            }
            min_val = lowest;
            if !min_val.is_finite() {
                return Err(Error::Internal("assignment search ran out of columns".into()));
            }
            let j = remaining[index];
            if row4col[j] == UNSET {
                sink = j;
            } else {
                i = row4col[j];
            }
            scanned_cols[j] = true;
            remaining.swap_remove(index);
        }

        u[cur_row] += min_val;
        for r in 0..n {
            if scanned_rows[r] && r != cur_row {
                u[r] += min_val - shortest[col4row[r]];
            }
        }
        for j in 0..n {
            if scanned_cols[j] {
                v[j] -= min_val - shortest[j];
            }
        }

        let mut j = sink;
        loop {
            let r = path[j];
            row4col[j] = r;
            let prev = col4row[r];
            col4row[r] = j;
            if r == cur_row {
                break;
            }
            j = prev;
        }
    }

    Ok((col4row, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost_of(cost: &Mat, cols: &[usize]) -> f64 {
        cols.iter().enumerate().map(|(i, &j)| cost.get(i, j)).sum()
    }

    fn brute_force_min(cost: &Mat) -> f64 {
        let n = cost.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, &mut |p| {
            best = best.min(cost_of(cost, p));
        });
        best
    }

    fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }

    fn pseudo_random_matrix(n: usize, seed: u64) -> Mat {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        Mat::from_fn(n, n, |_, _| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0
        })
    }

    #[test]
    fn matches_brute_force_on_small_instances() {
        for n in 1..=7 {
            for seed in 0..20 {
                let cost = pseudo_random_matrix(n, seed * 31 + n as u64);
                let (cols, u, v) = solve_assignment(&cost).unwrap();
                let found = cost_of(&cost, &cols);
                let best = brute_force_min(&cost);
                assert!(
                    (found - best).abs() < 1e-9,
                    "n={n} seed={seed}: got {found}, brute force {best}"
                );
                // Dual feasibility and complementary slackness.
                for i in 0..n {
                    for j in 0..n {
                        assert!(cost.get(i, j) - u[i] - v[j] >= -1e-9);
                    }
                    let j = cols[i];
                    assert!((cost.get(i, j) - u[i] - v[j]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn assignment_is_a_permutation() {
        let cost = pseudo_random_matrix(40, 7);
        let (cols, _, _) = solve_assignment(&cost).unwrap();
        let mut seen = vec![false; 40];
        for &j in &cols {
            assert!(!seen[j]);
            seen[j] = true;
        }
    }
}
