//! Population-dependent obfuscation mappings.
//!
//! Every function takes fitness values oriented so that larger is better and
//! breaks ties by input order. Label `0` (or `true`) is always the best.

use crate::error::{invalid, Result};

/// Indices sorted by descending fitness, stable on ties.
pub(crate) fn descending_order(fitness: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[b].partial_cmp(&fitness[a]).expect("fitness must not be NaN"));
    order
}

fn extrema(fitness: &[f64]) -> (f64, f64) {
    fitness
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &f| (lo.min(f), hi.max(f)))
}

/// Unique consecutive ranks, `0` for the best individual.
pub fn obfuscate_order(fitness: &[f64]) -> Vec<usize> {
    let mut ranks = vec![0; fitness.len()];
    for (rank, idx) in descending_order(fitness).into_iter().enumerate() {
        ranks[idx] = rank;
    }
    ranks
}

/// Splits the sorted population into `k` consecutive groups whose sizes differ
/// by at most one, smaller groups first, and returns each group index.
pub fn obfuscate_quantiles(fitness: &[f64], k: usize) -> Result<Vec<usize>> {
    let n = fitness.len();
    if k == 0 || k > n {
        return Err(invalid(format!("quantile count {k} must lie in 1..={n}")));
    }
    let sizes = quantile_sizes(n, k);
    let mut labels = vec![0; n];
    let mut order = descending_order(fitness).into_iter();
    for (group, size) in sizes.into_iter().enumerate() {
        for idx in order.by_ref().take(size) {
            labels[idx] = group;
        }
    }
    Ok(labels)
}

/// Group sizes for `n` individuals in `k` quantiles, best quantile first.
pub fn quantile_sizes(n: usize, k: usize) -> Vec<usize> {
    let (base, extra) = (n / k, n % k);
    (0..k).map(|g| if g < k - extra { base } else { base + 1 }).collect()
}

/// Splits `[f_min, f_max]` into `k` equal-width buckets, each closed at its
/// lower end (the best bucket is closed at both ends), and returns the bucket
/// index counted from the best. A constant population lands in bucket 0.
pub fn obfuscate_buckets(fitness: &[f64], k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(invalid("bucket count must be at least 1"));
    }
    let (lo, hi) = extrema(fitness);
    let span = hi - lo;
    if !(span > 0.0) {
        return Ok(vec![0; fitness.len()]);
    }
    Ok(fitness
        .iter()
        .map(|&f| {
            // (f - lo) / (span / k), written to stay exact for integer fitness.
            let from_bottom = (((f - lo) * k as f64 / span).floor() as usize).min(k - 1);
            k - 1 - from_bottom
        })
        .collect())
}

/// Marks exactly the `k` best individuals.
pub fn obfuscate_top(fitness: &[f64], k: usize) -> Result<Vec<bool>> {
    let n = fitness.len();
    if k == 0 || k > n {
        return Err(invalid(format!("top count {k} must lie in 1..={n}")));
    }
    let mut flags = vec![false; n];
    for idx in descending_order(fitness).into_iter().take(k) {
        flags[idx] = true;
    }
    Ok(flags)
}

/// Minimum number of individuals reported above the threshold.
pub const THRESHOLD_MIN_SELECTED: usize = 3;

/// Marks individuals with fitness at least `f_min + k% · (f_max − f_min)`,
/// padded with the next best so that at least three are marked.
pub fn obfuscate_threshold(fitness: &[f64], k_percent: f64) -> Result<Vec<bool>> {
    if !(0.0..=100.0).contains(&k_percent) {
        return Err(invalid(format!("threshold percentage {k_percent} outside [0, 100]")));
    }
    let (lo, hi) = extrema(fitness);
    let tau = lo + k_percent * (hi - lo) / 100.0;
    let mut flags: Vec<bool> = fitness.iter().map(|&f| f >= tau).collect();
    let selected = flags.iter().filter(|&&f| f).count();
    if selected < THRESHOLD_MIN_SELECTED {
        for idx in descending_order(fitness).into_iter().take(THRESHOLD_MIN_SELECTED) {
            flags[idx] = true;
        }
    }
    Ok(flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: [f64; 11] = [100.0, 90.0, 80.0, 70.0, 70.0, 65.0, 30.0, 30.0, 20.0, 10.0, 0.0];

    #[test]
    fn order_table() {
        assert_eq!(obfuscate_order(&TABLE), (0..11).collect::<Vec<_>>());
        assert_eq!(obfuscate_order(&[3.0, 3.0, 3.0]), vec![0, 1, 2]);
        assert_eq!(obfuscate_order(&[1.0]), vec![0]);
        assert_eq!(obfuscate_order(&[1.0, 5.0, 3.0]), vec![2, 0, 1]);
    }

    #[test]
    fn quantiles_table() {
        assert_eq!(obfuscate_quantiles(&TABLE, 3).unwrap(), vec![0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]);
        assert_eq!(obfuscate_quantiles(&TABLE, 11).unwrap(), obfuscate_order(&TABLE));
        assert_eq!(obfuscate_quantiles(&TABLE, 1).unwrap(), vec![0; 11]);
        assert!(obfuscate_quantiles(&TABLE, 12).is_err());
        assert!(obfuscate_quantiles(&TABLE, 0).is_err());
        assert_eq!(quantile_sizes(300, 10), vec![30; 10]);
    }

    #[test]
    fn buckets_table() {
        assert_eq!(obfuscate_buckets(&TABLE, 3).unwrap(), vec![0, 0, 0, 0, 0, 1, 2, 2, 2, 2, 2]);
        assert_eq!(obfuscate_buckets(&[4.0, 4.0, 4.0], 5).unwrap(), vec![0, 0, 0]);
        assert_eq!(obfuscate_buckets(&[1.0, 9.0], 2).unwrap(), vec![1, 0]);
        // A value on a bucket boundary belongs to the better bucket.
        assert_eq!(obfuscate_buckets(&[0.0, 20.0, 80.0, 100.0], 5).unwrap(), vec![4, 3, 0, 0]);
    }

    #[test]
    fn top_table() {
        let expected = [true, true, true, true, false, false, false, false, false, false, false];
        assert_eq!(obfuscate_top(&TABLE, 4).unwrap(), expected);
        assert!(obfuscate_top(&TABLE, 11).unwrap().iter().all(|&f| f));
        assert_eq!(obfuscate_top(&[1.0, 7.0, 3.0], 1).unwrap(), vec![false, true, false]);
        assert!(obfuscate_top(&TABLE, 12).is_err());
    }

    #[test]
    fn threshold_table() {
        let expected = [true, true, true, true, true, false, false, false, false, false, false];
        assert_eq!(obfuscate_threshold(&TABLE, 70.0).unwrap(), expected);
        // Threshold at the maximum selects only the best, then pads to three.
        let padded = obfuscate_threshold(&TABLE, 100.0).unwrap();
        assert_eq!(padded.iter().filter(|&&f| f).count(), 3);
        assert!(padded[..3].iter().all(|&f| f));
        assert!(obfuscate_threshold(&TABLE, 0.0).unwrap().iter().all(|&f| f));
        assert_eq!(obfuscate_threshold(&[2.0, 1.0], 100.0).unwrap(), vec![true, true]);
        assert!(obfuscate_threshold(&TABLE, 101.0).is_err());
    }
}
