//! Comparison tables: comparison generations, win matrices and median/IQR summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use obfevo_core::metrics::{comparison_generation, iqr, median, win_matrix, WinMatrix};
use obfevo_core::{Direction, MetricKind, ProblemKind};
use serde::{Deserialize, Serialize};

use crate::spec::{default_eval_times, DEFAULT_BUDGET};
use crate::store::{self, MetricRow, StoredConfig};

/// Evaluation times and budget used to derive comparison generations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetConfig {
    #[serde(default = "default_eval_times")]
    pub eval_times: BTreeMap<String, f64>,
    #[serde(default = "default_budget")]
    pub budget: f64,
}

fn default_budget() -> f64 {
    DEFAULT_BUDGET
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self { eval_times: default_eval_times(), budget: DEFAULT_BUDGET }
    }
}

/// Identifies one metric series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricKey {
    pub kind: MetricKind,
    pub objective: Option<usize>,
    pub normalized: bool,
}

impl MetricKey {
    pub fn new(kind: MetricKind, objective: Option<usize>, normalized: bool) -> Self {
        Self { kind, objective, normalized }
    }

    fn matches(&self, row: &MetricRow) -> bool {
        row.metric == self.kind && row.objective == self.objective && row.normalized == self.normalized
    }

    pub fn higher_is_better(&self, directions: &[Direction]) -> bool {
        if self.normalized {
            return false;
        }
        let dir = self.objective.and_then(|o| directions.get(o).copied()).unwrap_or(Direction::Minimize);
        self.kind.higher_is_better(dir)
    }
}

impl fmt::Display for MetricKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(o) = self.objective {
            write!(f, "_obj{o}")?;
        }
        if self.normalized {
            write!(f, "_normalized")?;
        }
        Ok(())
    }
}

/// Metrics compared by default for a problem kind.
pub fn default_metrics(kind: ProblemKind, n_obj: usize) -> Vec<MetricKey> {
    match kind {
        ProblemKind::Ap | ProblemKind::Tsp => vec![MetricKey::new(MetricKind::MeanFitness, Some(0), false)],
        ProblemKind::Moap => {
            let mut keys = vec![
                MetricKey::new(MetricKind::GdPlus, None, false),
                MetricKey::new(MetricKind::IgdPlus, None, false),
            ];
            keys.extend((0..n_obj).map(|o| MetricKey::new(MetricKind::MeanFitness, Some(o), true)));
            keys
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigSummary {
    pub label: String,
    pub eval_time: f64,
    pub comparison_generation: usize,
    pub final_generation: usize,
    pub wins: usize,
    pub median_initial: f64,
    pub iqr_initial: f64,
    pub median_comparison: f64,
    pub iqr_comparison: f64,
    pub median_final: f64,
    pub iqr_final: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricAnalysis {
    pub key: MetricKey,
    pub higher_is_better: bool,
    pub summaries: Vec<ConfigSummary>,
    pub matrix: WinMatrix,
}

impl MetricAnalysis {
    pub fn summary(&self, label: &str) -> Option<&ConfigSummary> {
        self.summaries.iter().find(|s| s.label == label)
    }

    pub fn wins(&self, label: &str) -> Option<usize> {
        self.summary(label).map(|s| s.wins)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceAnalysis {
    pub instance: String,
    pub metrics: Vec<MetricAnalysis>,
}

impl InstanceAnalysis {
    pub fn metric(&self, key: MetricKey) -> Option<&MetricAnalysis> {
        self.metrics.iter().find(|m| m.key == key)
    }
}

/// Per-seed values at `generation`.
fn values_at(rows: &[MetricRow], key: MetricKey, generation: usize) -> BTreeMap<u64, f64> {
    rows.iter()
        .filter(|r| r.generation == generation && key.matches(r))
        .map(|r| (r.seed, r.value))
        .collect()
}

fn stats(values: &BTreeMap<u64, f64>) -> (f64, f64) {
    let v: Vec<f64> = values.values().copied().collect();
    (median(&v).unwrap_or(f64::NAN), iqr(&v).unwrap_or(f64::NAN))
}

/// Analyzes one instance's configurations on the given metrics.
pub fn analyze_configs(
    configs: &[StoredConfig],
    keys: &[MetricKey],
    budget: &BudgetConfig,
) -> Result<Vec<MetricAnalysis>> {
    let mut data = Vec::with_capacity(configs.len());
    for c in configs {
        let rows = store::read_metrics(&c.dir.join(store::METRICS_FILE))?;
        let family = c.info.method.family();
        let Some(&time) = budget.eval_times.get(family) else {
            bail!("no evaluation time configured for `{family}`");
        };
        let last = rows.iter().map(|r| r.generation).max().unwrap_or(0);
        let generation = comparison_generation(time, budget.budget, last)?;
        data.push((c, rows, time, generation, last));
    }
    let mut out = Vec::new();
    for &key in keys {
        let mut named = Vec::new();
        let mut summaries = Vec::new();
        for (c, rows, time, generation, last) in &data {
            let at_comparison = values_at(rows, key, *generation);
            if at_comparison.is_empty() {
                continue;
            }
            let (mi, ii) = stats(&values_at(rows, key, 0));
            let (mc, ic) = stats(&at_comparison);
            let (mf, iff) = stats(&values_at(rows, key, *last));
            summaries.push(ConfigSummary {
                label: c.info.label.clone(),
                eval_time: *time,
                comparison_generation: *generation,
                final_generation: *last,
                wins: 0,
                median_initial: mi,
                iqr_initial: ii,
                median_comparison: mc,
                iqr_comparison: ic,
                median_final: mf,
                iqr_final: iff,
            });
            named.push((c.info.label.clone(), at_comparison));
        }
        if named.is_empty() {
            continue;
        }
        let higher = key.higher_is_better(&data[0].0.info.directions);
        let matrix = win_matrix(&named, higher).with_context(|| format!("comparing {key}"))?;
        for (s, w) in summaries.iter_mut().zip(&matrix.wins) {
            s.wins = *w;
        }
        out.push(MetricAnalysis { key, higher_is_better: higher, summaries, matrix });
    }
    Ok(out)
}

/// Analyzes every instance under `root` and writes CSV tables to `root/analysis`.
pub fn analyze(root: &Path, budget: &BudgetConfig) -> Result<Vec<InstanceAnalysis>> {
    let mut report = Vec::new();
    for (instance, configs) in store::discover(root)? {
        let info = &configs[0].info;
        let keys = default_metrics(info.kind, info.directions.len());
        let metrics = analyze_configs(&configs, &keys, budget).with_context(|| format!("analyzing {instance}"))?;
        let dir = root.join(store::ANALYSIS_DIR).join(&instance);
        fs::create_dir_all(&dir)?;
        for m in &metrics {
            write_tables(&dir, m)?;
        }
        report.push(InstanceAnalysis { instance, metrics });
    }
    Ok(report)
}

#[derive(Serialize)]
struct CellRow<'a> {
    row: &'a str,
    column: &'a str,
    n_pairs: usize,
    p_value: f64,
    rank_biserial: f64,
    significant: bool,
    row_wins: bool,
}

fn write_tables(dir: &Path, m: &MetricAnalysis) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join(format!("{}_summary.csv", m.key)))?;
    for s in &m.summaries {
        w.serialize(s)?;
    }
    w.flush()?;

    let names = &m.matrix.names;
    let mut w = csv::Writer::from_path(dir.join(format!("{}_cells.csv", m.key)))?;
    for (x, row) in m.matrix.cells.iter().enumerate() {
        for (y, cell) in row.iter().enumerate() {
            if let Some(c) = cell {
                w.serialize(CellRow {
                    row: &names[x],
                    column: &names[y],
                    n_pairs: c.n_pairs,
                    p_value: c.p_value,
                    rank_biserial: c.rank_biserial,
                    significant: c.significant,
                    row_wins: c.row_wins,
                })?;
            }
        }
    }
    w.flush()?;

    // Lower-triangular rank-biserial table; significant cells are starred.
    let mut w = csv::Writer::from_path(dir.join(format!("{}_matrix.csv", m.key)))?;
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    for (x, row) in m.matrix.cells.iter().enumerate() {
        let mut rec = vec![names[x].clone()];
        for (y, cell) in row.iter().enumerate() {
            rec.push(match cell {
                Some(c) if y < x => format!("{:.1}{}", c.rank_biserial, if c.significant { "*" } else { "" }),
                _ => String::new(),
            });
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
