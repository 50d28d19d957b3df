//! On-disk layout of experiment results.
//!
//! ```text
//! <root>/<instance>/<config>/info.json        run configuration
//! <root>/<instance>/<config>/seed_007.json    one trace per seed
//! <root>/<instance>/<config>/metrics.csv      per-generation metrics, all seeds
//! <root>/analysis/<instance>/...              comparison tables
//! <root>/plots/<instance>/...                 SVG figures
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use obfevo_core::evolution::RunTrace;
use obfevo_core::{Direction, EAConfig, MetricKind, ObfuscationMethod, ObfuscationPlan, ProblemKind};
use serde::{Deserialize, Serialize};

pub const ANALYSIS_DIR: &str = "analysis";
pub const PLOTS_DIR: &str = "plots";
pub const INFO_FILE: &str = "info.json";
pub const METRICS_FILE: &str = "metrics.csv";

/// Everything analysis and plotting need to know about one (instance, configuration) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigInfo {
    pub instance: String,
    pub kind: ProblemKind,
    pub directions: Vec<Direction>,
    pub label: String,
    pub method: ObfuscationMethod,
    pub plan: ObfuscationPlan,
    pub config: EAConfig,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub known_optimum: Option<Vec<f64>>,
    #[serde(default)]
    pub ground_truth: Option<Vec<Vec<f64>>>,
}

/// One row of `metrics.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub generation: usize,
    pub seed: u64,
    pub metric: MetricKind,
    pub objective: Option<usize>,
    pub value: f64,
    pub normalized: bool,
}

/// Rows of one trace in generation order.
pub fn metric_rows(trace: &RunTrace) -> Vec<MetricRow> {
    trace
        .records
        .iter()
        .flat_map(|r| {
            r.metrics.iter().map(move |m| MetricRow {
                generation: r.generation,
                seed: trace.seed,
                metric: m.kind,
                objective: m.objective,
                value: m.value,
                normalized: m.normalized,
            })
        })
        .collect()
}

/// Directory name of a configuration. Partially obfuscated multi-objective
/// runs carry the obfuscated objective indices, e.g. `B5_obj0`.
pub fn config_label(method: &ObfuscationMethod, obfuscated: &[usize], n_obj: usize) -> String {
    let tag = method.to_string();
    if !method.is_obfuscated() || obfuscated.is_empty() || obfuscated.len() == n_obj {
        tag
    } else {
        let objs: Vec<String> = obfuscated.iter().map(|o| o.to_string()).collect();
        format!("{tag}_obj{}", objs.join("+"))
    }
}

pub fn config_dir(root: &Path, instance: &str, label: &str) -> PathBuf {
    root.join(instance).join(label)
}

pub fn trace_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("seed_{seed:03}.json"))
}

pub fn error_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("seed_{seed:03}.error.txt"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string(value)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_metrics(path: &Path, rows: &[MetricRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.deserialize().collect::<Result<Vec<MetricRow>, _>>().with_context(|| format!("parsing {}", path.display()))
}

/// A configuration directory found under a results root.
#[derive(Clone, Debug)]
pub struct StoredConfig {
    pub dir: PathBuf,
    pub info: ConfigInfo,
}

/// Lists `(instance, configurations)` in name order; configurations keep
/// the order in which the experiment listed them when `order.json` exists.
pub fn discover(root: &Path) -> Result<Vec<(String, Vec<StoredConfig>)>> {
    let mut out = Vec::new();
    if !root.exists() {
        return Ok(out);
    }
    for instance_dir in sorted_dirs(root)? {
        let name = instance_dir.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        if name == ANALYSIS_DIR || name == PLOTS_DIR {
            continue;
        }
        let mut configs = Vec::new();
        for dir in sorted_dirs(&instance_dir)? {
            let info_path = dir.join(INFO_FILE);
            if info_path.exists() {
                configs.push(StoredConfig { info: read_json(&info_path)?, dir });
            }
        }
        let order_path = instance_dir.join(ORDER_FILE);
        if order_path.exists() {
            let order: Vec<String> = read_json(&order_path)?;
            configs.sort_by_key(|c| order.iter().position(|l| *l == c.info.label).unwrap_or(usize::MAX));
        }
        if !configs.is_empty() {
            out.push((name, configs));
        }
    }
    Ok(out)
}

/// Configuration labels of an instance in experiment order.
pub const ORDER_FILE: &str = "order.json";

fn sorted_dirs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    Ok(dirs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(config_label(&ObfuscationMethod::None, &[0], 2), "none");
        assert_eq!(config_label(&ObfuscationMethod::FitnessBuckets(5), &[], 1), "B5");
        assert_eq!(config_label(&ObfuscationMethod::FitnessBuckets(5), &[0], 2), "B5_obj0");
        assert_eq!(config_label(&ObfuscationMethod::TopIndividuals(15), &[0, 1], 2), "T15");
    }

    #[test]
    fn metrics_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            MetricRow { generation: 0, seed: 3, metric: MetricKind::MeanFitness, objective: Some(0), value: 1.5, normalized: false },
            MetricRow { generation: 0, seed: 3, metric: MetricKind::IgdPlus, objective: None, value: 2.0, normalized: false },
        ];
        let path = dir.path().join("m.csv");
        write_metrics(&path, &rows).unwrap();
        assert_eq!(read_metrics(&path).unwrap(), rows);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("generation,seed,metric,objective,value,normalized\n"));
        assert!(text.contains("0,3,igd_plus,,2.0,false"));
    }
}
