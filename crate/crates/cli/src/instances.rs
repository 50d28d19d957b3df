//! Instance generation with exact reference data attached.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use obfevo_core::problem::tsplib::{euclidean_instance, parse_tsplib};
use obfevo_core::problem::{
    brute_force_optimum, compute_ground_truth, generate_ap_instance, solve_ap_exact, BruteForceOptimum,
    BRUTE_FORCE_LIMIT,
};
use obfevo_core::{ProblemInstance, ProblemKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Entry range of generated assignment instances.
pub const UTILITY_RANGE: (i64, i64) = (0, 1000);

/// Attaches exact optima (and the ground-truth front for MOAP) where computable.
pub fn attach_reference(instance: &mut ProblemInstance) -> Result<()> {
    match instance.kind {
        ProblemKind::Ap | ProblemKind::Moap => {
            let optima = instance
                .objectives
                .iter()
                .map(|m| solve_ap_exact(m).map(|(_, v)| v as f64))
                .collect::<Result<Vec<_>, _>>()?;
            instance.known_optimum = Some(optima);
            if instance.kind == ProblemKind::Moap {
                instance.ground_truth = Some(compute_ground_truth(instance)?.points().to_vec());
            }
        }
        ProblemKind::Tsp => {
            if instance.known_optimum.is_none() && instance.size() <= BRUTE_FORCE_LIMIT {
                if let BruteForceOptimum::Single { value, .. } = brute_force_optimum(instance)? {
                    instance.known_optimum = Some(vec![value as f64]);
                }
            }
        }
    }
    Ok(())
}

/// Random TSP instance with coordinates uniform in `[0, 1000)²`.
pub fn random_tsp(seed: u64, n: usize) -> Result<ProblemInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0))).collect();
    Ok(euclidean_instance(&format!("tsp_{n}_s{seed}"), &coords)?)
}

/// Generates `count` instances with seeds `seed, seed + 1, ...` and writes
/// them as `<out>/<name>.json`.
pub fn generate(kind: ProblemKind, seed: u64, count: usize, size: usize, out: &Path) -> Result<Vec<PathBuf>> {
    if size == 0 {
        bail!("instance size must be positive");
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut written = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let s = seed + i;
        let (lo, hi) = UTILITY_RANGE;
        let mut instance = match kind {
            ProblemKind::Ap => generate_ap_instance(s, size, size, 1, lo, hi)?,
            ProblemKind::Moap => generate_ap_instance(s, size, size, 2, lo, hi)?,
            ProblemKind::Tsp => random_tsp(s, size)?,
        };
        attach_reference(&mut instance)?;
        written.push(write_instance(&instance, out)?);
    }
    Ok(written)
}

/// Converts a TSPLIB file into an instance file.
pub fn import_tsplib(path: &Path, out: &Path) -> Result<PathBuf> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut instance = parse_tsplib(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    attach_reference(&mut instance)?;
    fs::create_dir_all(out)?;
    write_instance(&instance, out)
}

fn write_instance(instance: &ProblemInstance, out: &Path) -> Result<PathBuf> {
    let path = out.join(format!("{}.json", instance.name));
    fs::write(&path, instance.to_json()?).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
