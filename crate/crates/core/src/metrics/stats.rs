//! Paired nonparametric comparison of configurations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{invalid, Result};

/// Significance level for all comparisons.
pub const ALPHA: f64 = 0.05;

/// Below this many nonzero differences the null distribution is enumerated exactly.
pub const EXACT_LIMIT: usize = 20;

/// Signed ranks of the nonzero differences, with mid-ranks for ties in `|d|`.
/// Returns `(rank, is_positive)` pairs.
fn signed_ranks(diffs: &[f64]) -> Vec<(f64, bool)> {
    let mut nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    nz.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("differences must not be NaN"));
    let mut out = Vec::with_capacity(nz.len());
    let mut i = 0;
    while i < nz.len() {
        let mut j = i;
        while j + 1 < nz.len() && nz[j + 1].abs() == nz[i].abs() {
            j += 1;
        }
        // Positions i..=j share the mean of ranks i+1..=j+1.
        let rank = (i + j + 2) as f64 / 2.0;
        out.extend(nz[i..=j].iter().map(|d| (rank, *d > 0.0)));
        i = j + 1;
    }
    out
}

/// Sizes of the groups of tied `|d|` values (only groups larger than one matter).
fn tie_groups(ranks: &[(f64, bool)]) -> Vec<usize> {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for (r, _) in ranks {
        *counts.entry((r * 2.0) as u64).or_default() += 1;
    }
    counts.into_values().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of ranks of positive differences.
    pub w_plus: f64,
    /// Sum of ranks of negative differences.
    pub w_minus: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Number of nonzero differences.
    pub n: usize,
    pub exact: bool,
    /// All differences were zero; `p_value` is 1.
    pub degenerate: bool,
}

/// Two-sided Wilcoxon signed-rank test on paired differences.
///
/// Zeros are dropped and tied magnitudes get mid-ranks. With fewer than 20
/// nonzero differences the p-value comes from the exact null distribution
/// over all sign assignments; otherwise from the normal approximation with
/// tie and continuity corrections.
pub fn wilcoxon_signed_rank(diffs: &[f64]) -> WilcoxonResult {
    let ranks = signed_ranks(diffs);
    let n = ranks.len();
    let w_plus: f64 = ranks.iter().filter(|r| r.1).map(|r| r.0).sum();
    let w_minus: f64 = ranks.iter().filter(|r| !r.1).map(|r| r.0).sum();
    if n == 0 {
        return WilcoxonResult { w_plus, w_minus, p_value: 1.0, n, exact: true, degenerate: true };
    }
    let (p_value, exact) = if n < EXACT_LIMIT {
        (exact_p_value(&ranks, w_plus), true)
    } else {
        (normal_p_value(&ranks, w_plus), false)
    };
    WilcoxonResult { w_plus, w_minus, p_value: p_value.clamp(0.0, 1.0), n, exact, degenerate: false }
}

fn exact_p_value(ranks: &[(f64, bool)], w_plus: f64) -> f64 {
    // Mid-ranks are multiples of 1/2, so doubled ranks are integers and the
    // null distribution of the doubled statistic is a subset-sum count.
    let weights: Vec<usize> = ranks.iter().map(|(r, _)| (r * 2.0).round() as usize).collect();
    let total: usize = weights.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &w in &weights {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + w] += counts[s];
            }
        }
        reach += w;
    }
    let observed = (w_plus * 2.0).round() as usize;
    let all = 2f64.powi(ranks.len() as i32);
    let lower: f64 = counts[..=observed].iter().sum::<f64>() / all;
    let upper: f64 = counts[observed..].iter().sum::<f64>() / all;
    (2.0 * lower.min(upper)).min(1.0)
}

fn normal_p_value(ranks: &[(f64, bool)], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let tie_correction: f64 = tie_groups(ranks).into_iter().map(|t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_correction;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2)
}

/// Matched-pairs rank-biserial correlation and whether all differences were zero.
///
/// `(R⁺ − R⁻)/(R⁺ + R⁻)` over the signed ranks of the nonzero differences.
pub fn rank_biserial(diffs: &[f64]) -> (f64, bool) {
    let ranks = signed_ranks(diffs);
    if ranks.is_empty() {
        return (0.0, true);
    }
    let pos: f64 = ranks.iter().filter(|r| r.1).map(|r| r.0).sum();
    let neg: f64 = ranks.iter().filter(|r| !r.1).map(|r| r.0).sum();
    ((pos - neg) / (pos + neg), false)
}

/// Last generation whose evaluation fits in `budget` seconds when every
/// generation (including the initial population) costs `avg_eval_time`,
/// capped at `max_generation`.
pub fn comparison_generation(avg_eval_time: f64, budget: f64, max_generation: usize) -> Result<usize> {
    if !(avg_eval_time > 0.0) || !budget.is_finite() || budget < 0.0 {
        return Err(invalid("evaluation time must be positive and the budget non-negative"));
    }
    // Tolerance absorbs decimal representation error (e.g. 135.27 / 0.27).
    let evaluations = (budget / avg_eval_time + 1e-9).floor() as usize;
    Ok(evaluations.saturating_sub(1).min(max_generation))
}

/// Budget for `generations` generations plus the initial population.
pub fn time_budget(avg_eval_time: f64, generations: usize) -> f64 {
    avg_eval_time * (generations + 1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCell {
    pub p_value: f64,
    pub rank_biserial: f64,
    pub significant: bool,
    pub n_pairs: usize,
    /// The row configuration is significantly better than the column one.
    pub row_wins: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WinMatrix {
    pub names: Vec<String>,
    /// `cells[x][y]` compares configuration `x` (row) with `y` (column);
    /// the diagonal is `None`.
    pub cells: Vec<Vec<Option<ComparisonCell>>>,
    pub wins: Vec<usize>,
}

/// Pairs runs by seed and compares every ordered pair of configurations.
pub fn win_matrix(configs: &[(String, BTreeMap<u64, f64>)], higher_is_better: bool) -> Result<WinMatrix> {
    if let Some((_, first)) = configs.first() {
        for (name, runs) in configs {
            if !runs.keys().eq(first.keys()) {
                return Err(invalid(format!("configuration `{name}` does not share the common seed set")));
            }
        }
    }
    let k = configs.len();
    let mut cells = vec![vec![None; k]; k];
    let mut wins = vec![0; k];
    for x in 0..k {
        for y in 0..k {
            if x == y {
                continue;
            }
            let diffs: Vec<f64> = configs[x]
                .1
                .iter()
                .zip(configs[y].1.values())
                .map(|((_, a), b)| a - b)
                .collect();
            let test = wilcoxon_signed_rank(&diffs);
            let (r, _) = rank_biserial(&diffs);
            let significant = test.p_value < ALPHA;
            let favours_row = if higher_is_better { r > 0.0 } else { r < 0.0 };
            let row_wins = significant && favours_row;
            if row_wins {
                wins[x] += 1;
            }
            cells[x][y] = Some(ComparisonCell {
                p_value: test.p_value,
                rank_biserial: r,
                significant,
                n_pairs: diffs.len(),
                row_wins,
            });
        }
    }
    Ok(WinMatrix { names: configs.iter().map(|(n, _)| n.clone()).collect(), cells, wins })
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("values must not be NaN"));
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

pub fn median(values: &[f64]) -> Option<f64> {
    quantile(values, 0.5)
}

/// Interquartile range `Q3 − Q1`.
pub fn iqr(values: &[f64]) -> Option<f64> {
    Some(quantile(values, 0.75)? - quantile(values, 0.25)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mid_ranks() {
        let r = signed_ranks(&[1.0, -2.0, 2.0, 0.0, 3.0]);
        assert_eq!(r, vec![(1.0, true), (2.5, false), (2.5, true), (4.0, true)]);
    }

    #[test]
    fn rank_biserial_hand_computed() {
        assert_eq!(rank_biserial(&[1.0, -2.0]).0, -1.0 / 3.0);
        assert_eq!(rank_biserial(&[3.0, 1.0, 2.0]).0, 1.0);
        assert_eq!(rank_biserial(&[0.0, 0.0]), (0.0, true));
    }

    #[test]
    fn wilcoxon_extremes() {
        let all_positive: Vec<f64> = (1..=31).map(f64::from).collect();
        let t = wilcoxon_signed_rank(&all_positive);
        assert!(!t.exact);
        assert!(t.p_value < 0.001);

        let balanced = [1.0, -1.0, 2.0, -2.0, 3.0, -3.0];
        assert_eq!(wilcoxon_signed_rank(&balanced).p_value, 1.0);

        let zeros = wilcoxon_signed_rank(&[0.0; 5]);
        assert!(zeros.degenerate);
        assert_eq!(zeros.p_value, 1.0);
    }

    #[test]
    fn wilcoxon_exact_reference() {
        // Reference value from scipy.stats.wilcoxon on the same data (exact mode).
        let d = [6.0, 8.0, 14.0, 16.0, 23.0, 24.0, 28.0, 29.0, 41.0, -48.0, 49.0, 56.0, 60.0, -67.0, 75.0];
        let t = wilcoxon_signed_rank(&d);
        assert!(t.exact);
        assert_eq!(t.w_minus, 24.0);
        assert!((t.p_value - 0.041259765625).abs() < 1e-12);
    }

    #[test]
    fn comparison_generations() {
        let budget = 135.27;
        let expected = [(0.27, 500), (2.45, 54), (0.74, 181), (0.78, 172), (1.22, 109), (0.79, 170), (135.27, 0)];
        for (t, g) in expected {
            assert_eq!(comparison_generation(t, budget, 500).unwrap(), g, "time {t}");
        }
        assert_eq!(comparison_generation(0.1, budget, 500).unwrap(), 500);
        assert_eq!(comparison_generation(200.0, budget, 500).unwrap(), 0);
        assert!(comparison_generation(0.0, budget, 500).is_err());
        assert!((time_budget(0.27, 500) - 135.27).abs() < 1e-9);
    }

    #[test]
    fn win_matrix_cases() {
        let seeds = 0..31u64;
        let better: BTreeMap<u64, f64> = seeds.clone().map(|s| (s, 10.0 + s as f64)).collect();
        let worse: BTreeMap<u64, f64> = seeds.clone().map(|s| (s, s as f64 * 0.5)).collect();
        let m = win_matrix(&[("a".into(), better.clone()), ("b".into(), worse.clone())], true).unwrap();
        assert_eq!(m.wins, vec![1, 0]);
        let ab = m.cells[0][1].unwrap();
        assert_eq!(ab.rank_biserial, 1.0);
        assert_eq!(m.cells[1][0].unwrap().rank_biserial, -1.0);
        assert!(m.cells[0][0].is_none());

        let lower = win_matrix(&[("a".into(), better.clone()), ("b".into(), worse.clone())], false).unwrap();
        assert_eq!(lower.wins, vec![0, 1]);

        let same = win_matrix(&[("a".into(), better.clone()), ("b".into(), better.clone())], true).unwrap();
        assert_eq!(same.wins, vec![0, 0]);

        let mut short = worse;
        short.remove(&3);
        assert!(win_matrix(&[("a".into(), better), ("b".into(), short)], true).is_err());
    }

    #[test]
    fn quantiles() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(median(&v), Some(2.5));
        assert_eq!(iqr(&v), Some(1.5));
        assert_eq!(median(&[]), None);
    }
}
