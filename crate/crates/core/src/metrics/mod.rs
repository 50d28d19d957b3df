//! Solution-quality indicators and the statistics used to compare
//! obfuscation configurations.

mod indicators;
pub mod stats;

pub use indicators::{gd_plus, igd_plus, mean, normalize, relative_error, MetricKind, MetricValue};
pub use stats::{
    comparison_generation, iqr, median, quantile, rank_biserial, time_budget, wilcoxon_signed_rank, win_matrix,
    ComparisonCell, WilcoxonResult, WinMatrix, ALPHA,
};
