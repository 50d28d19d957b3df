//! Experiment specification files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use obfevo_core::{EAConfig, ObfuscationMethod};
use serde::{Deserialize, Serialize};

/// Budget in seconds: 501 evaluations at the unobfuscated average of 0.27 s.
pub const DEFAULT_BUDGET: f64 = 135.27;

/// The fourteen obfuscation configurations compared for every problem.
pub const DEFAULT_CONFIGURATIONS: [&str; 14] =
    ["none", "B5", "B10", "B20", "A80", "A90", "A95", "O", "Q5", "Q10", "Q20", "T15", "T30", "T60"];

/// Measured average evaluation time (seconds) per method family.
pub fn default_eval_times() -> BTreeMap<String, f64> {
    [("none", 0.27), ("buckets", 2.45), ("threshold", 0.74), ("order", 0.78), ("quantiles", 1.22), ("top", 0.79)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "GA-AP")]
    GaAp,
    #[serde(rename = "GA-TSP")]
    GaTsp,
    #[serde(rename = "NSGA2-MOAP")]
    Nsga2Moap,
}

impl Preset {
    pub fn config(self) -> EAConfig {
        match self {
            Preset::GaAp => EAConfig::ga_ap(),
            Preset::GaTsp => EAConfig::ga_tsp(),
            Preset::Nsga2Moap => EAConfig::nsga2_moap(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgorithmSpec {
    Preset(Preset),
    Explicit(EAConfig),
}

impl AlgorithmSpec {
    pub fn config(&self) -> EAConfig {
        match self {
            AlgorithmSpec::Preset(p) => p.config(),
            AlgorithmSpec::Explicit(c) => c.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultSets {
    /// Keep the result set of every generation in the trace.
    #[default]
    All,
    /// Keep only the final generation's result set (metrics are kept for all).
    Final,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Instance files, relative to the spec file's directory.
    pub instances: Vec<PathBuf>,
    pub algorithm: AlgorithmSpec,
    /// Overrides the algorithm's generation count.
    #[serde(default)]
    pub generations: Option<usize>,
    #[serde(default = "default_configurations")]
    pub configurations: Vec<ObfuscationMethod>,
    /// Objectives the configuration applies to; all objectives when empty.
    #[serde(default)]
    pub obfuscated_objectives: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_eval_times")]
    pub eval_times: BTreeMap<String, f64>,
    #[serde(default = "default_budget")]
    pub budget: f64,
    /// Metrics used by the analysis; defaults depend on the problem kind.
    #[serde(default)]
    pub metrics: Vec<obfevo_core::MetricKind>,
    /// Run each configuration only up to its comparison generation.
    #[serde(default)]
    pub stop_at_comparison: bool,
    #[serde(default)]
    pub result_sets: ResultSets,
    #[serde(default)]
    pub keep_genomes: bool,
}

fn default_configurations() -> Vec<ObfuscationMethod> {
    DEFAULT_CONFIGURATIONS.iter().map(|t| t.parse().expect("valid tag")).collect()
}

fn default_seeds() -> Vec<u64> {
    (0..=30).collect()
}

fn default_budget() -> f64 {
    DEFAULT_BUDGET
}

impl ExperimentSpec {
    pub fn new(instances: Vec<PathBuf>, algorithm: AlgorithmSpec) -> Self {
        Self {
            instances,
            algorithm,
            generations: None,
            configurations: default_configurations(),
            obfuscated_objectives: Vec::new(),
            seeds: default_seeds(),
            eval_times: default_eval_times(),
            budget: DEFAULT_BUDGET,
            metrics: Vec::new(),
            stop_at_comparison: false,
            result_sets: ResultSets::All,
            keep_genomes: false,
        }
    }

    /// Reads a spec and resolves instance paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut spec: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in &mut spec.instances {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn ea_config(&self) -> EAConfig {
        let mut c = self.algorithm.config();
        if let Some(g) = self.generations {
            c.generations = g;
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.seeds.is_empty(), "seed list is empty");
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        ensure!(seeds.len() == self.seeds.len(), "seed list contains duplicates");
        ensure!(!self.configurations.is_empty(), "no obfuscation configurations");
        for c in &self.configurations {
            c.validate()?;
        }
        let mut labels: Vec<String> = self.configurations.iter().map(|c| c.to_string()).collect();
        labels.sort();
        labels.dedup();
        ensure!(labels.len() == self.configurations.len(), "duplicate obfuscation configurations");
        ensure!(self.budget >= 0.0, "budget must be non-negative");
        self.ea_config().validate()?;
        if self.stop_at_comparison {
            for c in &self.configurations {
                self.eval_time(c)?;
            }
        }
        Ok(())
    }

    /// Average evaluation time for the family of `method`.
    pub fn eval_time(&self, method: &ObfuscationMethod) -> Result<f64> {
        match self.eval_times.get(method.family()) {
            Some(&t) => Ok(t),
            None => bail!("no evaluation time configured for `{}`", method.family()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spec_gets_defaults() {
        let spec: ExperimentSpec = serde_json::from_str(r#"{"instances": ["a.json"], "algorithm": "GA-AP"}"#).unwrap();
        assert_eq!(spec.configurations.len(), 14);
        assert_eq!(spec.seeds.len(), 31);
        assert_eq!(spec.ea_config(), EAConfig::ga_ap());
        assert_eq!(spec.eval_time(&ObfuscationMethod::FitnessBuckets(5)).unwrap(), 2.45);
        spec.validate().unwrap();
    }

    #[test]
    fn explicit_config_and_errors() {
        let explicit = serde_json::to_string(&EAConfig { mu: 10, kappa: 1, ..EAConfig::ga_ap() }).unwrap();
        let text = format!(r#"{{"instances": [], "algorithm": {explicit}, "seeds": [1, 2], "configurations": ["T3"]}}"#);
        let spec: ExperimentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec.ea_config().mu, 10);
        let dup = ExperimentSpec { seeds: vec![1, 1], ..spec.clone() };
        assert!(dup.validate().is_err());
        assert!(serde_json::from_str::<ExperimentSpec>(r#"{"instances": [], "algorithm": "GA-AP", "configurations": ["X1"]}"#).is_err());
    }
}
