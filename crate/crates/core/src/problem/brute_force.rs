use super::{Permutation, ProblemInstance};
use crate::error::{Error, Result};
use crate::pareto::{dominates, non_dominated_points};

/// Largest size accepted by [`brute_force_optimum`] (10! ≈ 3.6M permutations).
pub const BRUTE_FORCE_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub enum BruteForceOptimum {
    /// Best permutation and its value for single-objective instances.
    Single { solution: Permutation, value: i64 },
    /// Exact Pareto front (objective vectors, deduplicated) for multi-objective instances.
    Front(Vec<Vec<f64>>),
}

/// Exhaustive search over all `n!` permutations.
pub fn brute_force_optimum(instance: &ProblemInstance) -> Result<BruteForceOptimum> {
    let n = instance.size();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    if instance.num_objectives() == 1 {
        let direction = instance.direction(0);
        let mut best = (perm.clone(), instance.evaluate_unchecked(0, &perm));
        while next_permutation(&mut perm) {
            let value = instance.evaluate_unchecked(0, &perm);
            if direction.is_better(value as f64, best.1 as f64) {
                best = (perm.clone(), value);
            }
        }
        return Ok(BruteForceOptimum::Single { solution: Permutation::from_vec_unchecked(best.0), value: best.1 });
    }

    let signs: Vec<f64> = (0..instance.num_objectives()).map(|k| instance.direction(k).sign()).collect();
    // Running archive of mutually non-dominated points, oriented so larger is better.
    let mut archive: Vec<Vec<f64>> = Vec::new();
    let mut point = vec![0.0; signs.len()];
    loop {
        for (k, s) in signs.iter().enumerate() {
            point[k] = s * instance.evaluate_unchecked(k, &perm) as f64;
        }
        if !archive.iter().any(|q| q == &point || dominates(q, &point)) {
            archive.retain(|q| !dominates(&point, q));
            archive.push(point.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let front = non_dominated_points(archive)
        .into_iter()
        .map(|p| p.iter().zip(&signs).map(|(x, s)| x * s).collect())
        .collect();
    Ok(BruteForceOptimum::Front(front))
}

/// Advances `v` to the next lexicographic permutation; `false` once exhausted.
fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Direction, ProblemKind, WeightMatrix};

    #[test]
    fn enumerates_all_permutations() {
        let mut v = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn ap_two_by_two() {
        let m = WeightMatrix::from_rows(Direction::Maximize, &[vec![1, 2], vec![3, 4]]).unwrap();
        let inst = ProblemInstance::new("t", ProblemKind::Ap, vec![m]).unwrap();
        match brute_force_optimum(&inst).unwrap() {
            BruteForceOptimum::Single { value, .. } => assert_eq!(value, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unit_square_tour() {
        let optimum = |pts: &[(f64, f64)]| {
            let inst = crate::problem::tsplib::euclidean_instance("square", pts).unwrap();
            match brute_force_optimum(&inst).unwrap() {
                BruteForceOptimum::Single { value, .. } => value,
                other => panic!("unexpected {other:?}"),
            }
        };
        assert_eq!(optimum(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]), 4);
        // Scaled by 10 the rounded diagonals (14) make crossing tours strictly worse.
        assert_eq!(optimum(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)]), 40);
    }

    #[test]
    fn refuses_large_instances() {
        let inst = crate::problem::generate_ap_instance(0, 11, 11, 1, 0, 5).unwrap();
        assert!(matches!(brute_force_optimum(&inst), Err(Error::TooLarge { n: 11, .. })));
    }
}
