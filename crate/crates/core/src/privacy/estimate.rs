//! Optimizer-side reconstruction of usable fitness values from obfuscated labels.

use super::Labels;

/// The optimizer's guess of the population minimum: `f_max − 2·|f_max|`.
pub fn estimated_minimum(f_max: f64) -> f64 {
    f_max - 2.0 * f_max.abs()
}

/// Spacing between adjacent label levels; zero when only one level exists.
pub fn level_distance(f_max: f64, levels: usize) -> f64 {
    if levels <= 1 {
        return 0.0;
    }
    (f_max - estimated_minimum(f_max)) / (levels - 1) as f64
}

/// Estimated fitness `f_max − m(label) · d` for every individual.
///
/// `m` is 0 for `true`, 1 for `false`, and the index itself for ranks,
/// quantiles and buckets. Pass-through labels are returned unchanged.
pub fn estimate_fitness(labels: &Labels, f_max: f64, levels: usize) -> Vec<f64> {
    let d = level_distance(f_max, levels);
    match labels {
        Labels::Actual(values) => values.clone(),
        Labels::Index(idx) => idx.iter().map(|&i| f_max - i as f64 * d).collect(),
        Labels::Flag(flags) => flags
            .iter()
            .map(|&f| if f { f_max } else { f_max - d })
            .collect(),
    }
}
