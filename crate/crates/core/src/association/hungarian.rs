//! Minimum-cost rectangular assignment (shortest augmenting paths with
//! dual potentials, O(n² m) for n ≤ m).

use crate::error::{Error, Result};

use super::cost::CostMatrix;

/// Optimal matching of size `min(rows, cols)` as `(row, col)` pairs sorted
/// by row.
pub fn hungarian(m: &CostMatrix) -> Result<Vec<(usize, usize)>> {
    if m.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("cost matrix"));
    }
    let (rows, cols) = (m.rows(), m.cols());
    if rows == 0 || cols == 0 {
        return Ok(Vec::new());
    }
    let mut pairs = if rows <= cols {
        solve(rows, cols, |i, j| m.get(i, j))
    } else {
        solve(cols, rows, |i, j| m.get(j, i))
            .into_iter()
            .map(|(c, r)| (r, c))
            .collect()
    };
    pairs.sort_unstable();
    Ok(pairs)
}

/// Rows `0..n` against columns `0..m`, `n <= m`.
fn solve(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<(usize, usize)> {
    // 1-based arrays; column 0 is the virtual start of each augmenting path.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=m).filter(|&j| owner[j] != 0).map(|j| (owner[j] - 1, j - 1)).collect()
}

/// Optimal matching with gated pairs (entries `>= gate_cost`) removed.
pub fn hungarian_solve(m: &CostMatrix, gate_cost: f64) -> Result<Vec<(usize, usize)>> {
    Ok(hungarian(m)?
        .into_iter()
        .filter(|&(i, j)| m.get(i, j) < gate_cost)
        .collect())
}

pub fn assignment_cost(m: &CostMatrix, pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(i, j)| m.get(i, j)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, v: &[f64]) -> CostMatrix {
        CostMatrix::from_vec(rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn small_cases() {
        let m = mat(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let p = hungarian(&m).unwrap();
        assert_eq!(p, vec![(0, 0), (1, 1)]);
        assert_eq!(assignment_cost(&m, &p), 2.0);
        assert_eq!(hungarian(&mat(1, 1, &[5.0])).unwrap(), vec![(0, 0)]);
        assert!(hungarian(&mat(0, 3, &[])).unwrap().is_empty());
    }

    #[test]
    fn rectangular_both_ways() {
        let wide = mat(2, 3, &[4.0, 1.0, 3.5, 2.0, 0.0, 5.0]);
        assert_eq!(hungarian(&wide).unwrap(), vec![(0, 1), (1, 0)]);
        let tall = mat(3, 2, &[4.0, 2.0, 1.0, 0.0, 6.0, 5.0]);
        assert_eq!(hungarian(&tall).unwrap(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn gated_pairs_are_removed() {
        let k = 10.0;
        let m = mat(2, 2, &[0.3, k, k, k]);
        assert_eq!(hungarian_solve(&m, k).unwrap(), vec![(0, 0)]);
        let all = mat(2, 2, &[k; 4]);
        assert!(hungarian_solve(&all, k).unwrap().is_empty());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(hungarian(&CostMatrix::from_vec_unchecked(1, 1, vec![f64::NAN])).is_err());
    }
}
