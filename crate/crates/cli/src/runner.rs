//! Executes the (instance × configuration × seed) grid of an experiment.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use log::{info, warn};
use obfevo_core::evolution::{run, RunOptions, RunTrace};
use obfevo_core::metrics::comparison_generation;
use obfevo_core::{ObfuscationMethod, ObfuscationPlan, ProblemInstance};
use rayon::prelude::*;

use crate::spec::{ExperimentSpec, ResultSets};
use crate::store::{self, ConfigInfo, MetricRow};

#[derive(Clone, Debug, PartialEq)]
pub struct RunFailure {
    pub instance: String,
    pub label: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub completed: usize,
    pub failures: Vec<RunFailure>,
}

impl RunSummary {
    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading instance {}", path.display()))?;
    ProblemInstance::from_json(&text).with_context(|| format!("parsing instance {}", path.display()))
}

/// Obfuscation plan of `method` for an instance with `n_obj` objectives.
pub fn plan_for(method: ObfuscationMethod, n_obj: usize, obfuscated: &[usize]) -> ObfuscationPlan {
    if obfuscated.is_empty() {
        ObfuscationPlan::uniform(method, n_obj)
    } else {
        ObfuscationPlan::on(method, n_obj, obfuscated)
    }
}

struct Cell {
    instance: usize,
    info: ConfigInfo,
    dir: std::path::PathBuf,
}

/// Runs every cell of the grid with at most `workers` threads and persists
/// traces and metrics under `out`. Failed runs leave an error file next to
/// their would-be trace; completed runs are kept.
pub fn run_experiment(spec: &ExperimentSpec, out: &Path, workers: usize) -> Result<RunSummary> {
    spec.validate()?;
    let instances = spec.instances.iter().map(|p| load_instance(p)).collect::<Result<Vec<_>>>()?;
    let base = spec.ea_config();

    let mut cells = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let n_obj = inst.num_objectives();
        if let Some(&bad) = spec.obfuscated_objectives.iter().find(|&&o| o >= n_obj) {
            anyhow::bail!("objective {bad} does not exist in instance {}", inst.name);
        }
        let mut order = Vec::new();
        for method in &spec.configurations {
            let mut config = base.clone();
            if spec.stop_at_comparison {
                config.generations = comparison_generation(spec.eval_time(method)?, spec.budget, config.generations)?;
            }
            let label = store::config_label(method, &spec.obfuscated_objectives, n_obj);
            let dir = store::config_dir(out, &inst.name, &label);
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            let info = ConfigInfo {
                instance: inst.name.clone(),
                kind: inst.kind,
                directions: (0..n_obj).map(|o| inst.direction(o)).collect(),
                label: label.clone(),
                method: *method,
                plan: plan_for(*method, n_obj, &spec.obfuscated_objectives),
                config,
                seeds: spec.seeds.clone(),
                known_optimum: inst.known_optimum.clone(),
                ground_truth: inst.ground_truth.clone(),
            };
            store::write_json(&dir.join(store::INFO_FILE), &info)?;
            order.push(label);
            cells.push(Cell { instance: i, info, dir });
        }
        store::write_json(&out.join(&inst.name).join(store::ORDER_FILE), &order)?;
    }

    let jobs: Vec<(usize, u64)> =
        (0..cells.len()).flat_map(|c| spec.seeds.iter().map(move |&s| (c, s))).collect();
    info!("running {} jobs on {} worker(s)", jobs.len(), workers.max(1));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let options = RunOptions { keep_genomes: spec.keep_genomes };
    let results: Vec<Result<Vec<MetricRow>, String>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, seed)| {
                let cell = &cells[c];
                let outcome = run(&instances[cell.instance], &cell.info.config, &cell.info.plan, seed, &options)
                    .map_err(anyhow::Error::from)
                    .and_then(|trace| persist(&cell.dir, trace, spec.result_sets));
                match outcome {
                    Ok(rows) => {
                        let _ = fs::remove_file(store::error_path(&cell.dir, seed));
                        Ok(rows)
                    }
                    Err(e) => {
                        let message = format!("{e:#}");
                        let _ = fs::write(store::error_path(&cell.dir, seed), &message);
                        Err(message)
                    }
                }
            })
            .collect()
    });

    let mut summary = RunSummary::default();
    let mut per_cell: Vec<Vec<MetricRow>> = vec![Vec::new(); cells.len()];
    for (&(c, seed), result) in jobs.iter().zip(results) {
        match result {
            Ok(rows) => {
                summary.completed += 1;
                per_cell[c].extend(rows);
            }
            Err(message) => {
                warn!("{} / {} / seed {seed}: {message}", cells[c].info.instance, cells[c].info.label);
                summary.failures.push(RunFailure {
                    instance: cells[c].info.instance.clone(),
                    label: cells[c].info.label.clone(),
                    seed,
                    message,
                });
            }
        }
    }
    for (cell, rows) in cells.iter().zip(&per_cell) {
        store::write_metrics(&cell.dir.join(store::METRICS_FILE), rows)?;
    }
    Ok(summary)
}

fn persist(dir: &Path, mut trace: RunTrace, result_sets: ResultSets) -> Result<Vec<MetricRow>> {
    let rows = store::metric_rows(&trace);
    if result_sets == ResultSets::Final {
        let last = trace.records.len().saturating_sub(1);
        for r in &mut trace.records[..last] {
            r.result_set.clear();
        }
    }
    store::write_json(&store::trace_path(dir, trace.seed), &trace)?;
    Ok(rows)
}
