//! Experiment harness: instance generation, grid execution, analysis and plots.

pub mod analyze;
pub mod instances;
pub mod plot;
pub mod runner;
pub mod spec;
pub mod store;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "OBFEVO_OUT";
