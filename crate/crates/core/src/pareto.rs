//! Pareto dominance on objective vectors oriented so that larger is better.

/// `true` if `a` weakly improves on `b` everywhere and strictly somewhere.
#[inline]
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

/// Removes duplicates and dominated points, returning the rest sorted
/// lexicographically (descending on the first objective).
pub fn non_dominated_points(mut points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    points.sort_by(|a, b| b.partial_cmp(a).expect("objective values must not be NaN"));
    points.dedup();
    let mut front: Vec<Vec<f64>> = Vec::new();
    for p in points {
        // Lexicographic descending order: nothing later can dominate anything earlier.
        if !front.iter().any(|q| dominates(q, &p)) {
            front.push(p);
        }
    }
    front
}
