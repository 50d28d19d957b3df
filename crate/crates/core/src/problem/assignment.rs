//! Exact linear sum assignment via the Kuhn–Munkres (Hungarian) method.

use super::{Direction, Permutation, WeightMatrix};
use crate::error::{invalid, Result};

/// Optimal assignment of an integer weight matrix in its own direction.
///
/// Returns the assignment and its exact value. When several assignments are
/// optimal any one of them may be returned.
pub fn solve_ap_exact(matrix: &WeightMatrix) -> Result<(Permutation, i64)> {
    if !matrix.is_square() {
        return Err(invalid(format!("assignment matrix must be square, got {}x{}", matrix.rows(), matrix.cols())));
    }
    let weights: Vec<f64> = matrix.entries().iter().map(|&c| c as f64).collect();
    let perm = solve_assignment_real(matrix.rows(), &weights, matrix.direction())?;
    let value = perm.as_slice().iter().enumerate().map(|(i, &j)| matrix.get(i, j)).sum();
    Ok((perm, value))
}

/// Optimal assignment for a real-valued square matrix given row-major.
pub fn solve_assignment_real(n: usize, weights: &[f64], direction: Direction) -> Result<Permutation> {
    if weights.len() != n * n {
        return Err(invalid(format!("expected {} weights for an {n}x{n} matrix, got {}", n * n, weights.len())));
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(invalid("assignment weights must be finite"));
    }
    if n == 0 {
        return Ok(Permutation::identity(0));
    }
    let sign = match direction {
        Direction::Maximize => -1.0,
        Direction::Minimize => 1.0,
    };
    let cost = |i: usize, j: usize| sign * weights[(i - 1) * n + (j - 1)];

    // Shortest augmenting path with row/column potentials, O(n^3).
    // Indices are 1-based; column 0 is a virtual source.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0, j) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut mapping = vec![0usize; n];
    for j in 1..=n {
        mapping[matched_row[j] - 1] = j - 1;
    }
    Ok(Permutation::from_vec_unchecked(mapping))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let m = WeightMatrix::from_rows(Direction::Maximize, &[vec![1, 2], vec![3, 4]]).unwrap();
        let (perm, value) = solve_ap_exact(&m).unwrap();
        assert_eq!(value, 5);
        assert!(perm.is_valid());
    }

    #[test]
    fn minimization() {
        let m = WeightMatrix::from_rows(Direction::Minimize, &[vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]]).unwrap();
        let (_, value) = solve_ap_exact(&m).unwrap();
        assert_eq!(value, 5);
    }

    #[test]
    fn non_square_rejected() {
        let m = WeightMatrix::new(2, 3, Direction::Maximize, vec![0; 6]).unwrap();
        assert!(solve_ap_exact(&m).is_err());
    }

    #[test]
    fn real_weights() {
        let w = [0.5, 0.25, 0.75, 0.1];
        let p = solve_assignment_real(2, &w, Direction::Maximize).unwrap();
        assert_eq!(p.as_slice(), &[1, 0]);
    }
}
