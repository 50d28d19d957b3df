//! Problem instances, the permutation encoding of solutions, and exact oracles.
//!
//! A solution assigns row `i` to column `π(i)`; this is the binary matrix `A`
//! with `a[i][π(i)] = 1` and zeros elsewhere. For the TSP the same permutation
//! is read as a closed tour visiting `π(0), π(1), ..., π(n-1)`.

mod assignment;
mod brute_force;
mod ground_truth;
pub mod tsplib;

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use assignment::{solve_ap_exact, solve_assignment_real};
pub use brute_force::{brute_force_optimum, BruteForceOptimum, BRUTE_FORCE_LIMIT};
pub use ground_truth::{compute_ground_truth, GroundTruthSet, SCALARIZATION_STEPS};

/// Whether larger or smaller objective values are better.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// Sign that maps a raw value into "larger is better" orientation.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Maximize => 1.0,
            Direction::Minimize => -1.0,
        }
    }

    /// `true` if `a` is strictly better than `b`.
    pub fn is_better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProblemKind {
    /// Single-objective linear sum assignment (maximization).
    Ap,
    /// Bi-objective linear sum assignment (both maximized).
    Moap,
    /// Symmetric travelling salesperson problem (minimization).
    Tsp,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Ap => "AP",
            ProblemKind::Moap => "MOAP",
            ProblemKind::Tsp => "TSP",
        })
    }
}

/// An `m × n` integer weight matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    direction: Direction,
    entries: Vec<i64>,
}

impl WeightMatrix {
    pub fn new(rows: usize, cols: usize, direction: Direction, entries: Vec<i64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid(format!("matrix must be non-empty, got {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, direction, entries })
    }

    /// Builds a square matrix from nested rows.
    pub fn from_rows(direction: Direction, rows: &[Vec<i64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("ragged matrix rows"));
        }
        Self::new(m, n, direction, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[i64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric_zero_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self.get(i, i) == 0 && (0..i).all(|j| self.get(i, j) == self.get(j, i))
            })
    }

    pub fn min_entry(&self) -> i64 {
        self.entries.iter().copied().min().unwrap_or(0)
    }

    pub fn max_entry(&self) -> i64 {
        self.entries.iter().copied().max().unwrap_or(0)
    }
}

/// A candidate solution: row `i` is mapped to column `self[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Validates that `mapping` is a bijection on `0..mapping.len()`.
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        if !is_permutation(&mapping) {
            return Err(invalid(format!("not a permutation: {mapping:?}")));
        }
        Ok(Self(mapping))
    }

    /// Wraps a mapping without validation. Callers must guarantee bijectivity.
    pub(crate) fn from_vec_unchecked(mapping: Vec<usize>) -> Self {
        debug_assert!(is_permutation(&mapping));
        Self(mapping)
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    pub fn is_valid(&self) -> bool {
        is_permutation(&self.0)
    }
}

impl std::ops::Index<usize> for Permutation {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// `true` if `values` contains each of `0..values.len()` exactly once.
pub fn is_permutation(values: &[usize]) -> bool {
    let mut seen = vec![false; values.len()];
    for &v in values {
        if v >= seen.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// A (possibly multi-objective) problem instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub name: String,
    pub kind: ProblemKind,
    pub objectives: Vec<WeightMatrix>,
    /// Row index sets `U_1..U_p` held by each party.
    pub party_partition: Vec<Vec<usize>>,
    /// Exact optimum per objective, when known.
    #[serde(default)]
    pub known_optimum: Option<Vec<f64>>,
    /// Reference set of Pareto-optimal objective vectors (MOAP only).
    #[serde(default)]
    pub ground_truth: Option<Vec<Vec<f64>>>,
}

impl ProblemInstance {
    /// Creates an instance with a single party owning all rows.
    pub fn new(name: impl Into<String>, kind: ProblemKind, objectives: Vec<WeightMatrix>) -> Result<Self> {
        let rows = objectives.first().map_or(0, WeightMatrix::rows);
        let instance = Self {
            name: name.into(),
            kind,
            objectives,
            party_partition: vec![(0..rows).collect()],
            known_optimum: None,
            ground_truth: None,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn with_party_partition(mut self, partition: Vec<Vec<usize>>) -> Result<Self> {
        self.party_partition = partition;
        self.validate()?;
        Ok(self)
    }

    /// Checks every structural invariant of the instance.
    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.objectives.first() else {
            return Err(invalid("instance has no objectives"));
        };
        let (m, n) = (first.rows(), first.cols());
        for (i, obj) in self.objectives.iter().enumerate() {
            if obj.rows() != m || obj.cols() != n {
                return Err(invalid(format!("objective {i} has shape {}x{}, expected {m}x{n}", obj.rows(), obj.cols())));
            }
            if obj.entries.len() != m * n {
                return Err(invalid(format!("objective {i} has {} entries, expected {}", obj.entries.len(), m * n)));
            }
        }
        if m > n {
            return Err(invalid(format!("more rows than columns ({m}x{n})")));
        }
        let all_max = self.objectives.iter().all(|o| o.direction() == Direction::Maximize);
        match self.kind {
            ProblemKind::Ap if self.objectives.len() != 1 || !all_max => {
                return Err(invalid("AP requires exactly one maximized objective"));
            }
            ProblemKind::Moap if self.objectives.len() != 2 || !all_max => {
                return Err(invalid("MOAP requires exactly two maximized objectives"));
            }
            ProblemKind::Tsp => {
                if self.objectives.len() != 1 || first.direction() != Direction::Minimize {
                    return Err(invalid("TSP requires exactly one minimized objective"));
                }
                if !first.is_symmetric_zero_diagonal() {
                    return Err(invalid("TSP distance matrix must be symmetric with zero diagonal"));
                }
            }
            _ => {}
        }
        let mut seen = HashSet::new();
        for part in &self.party_partition {
            for &row in part {
                if row >= m || !seen.insert(row) {
                    return Err(invalid(format!("party partition repeats or exceeds row {row}")));
                }
            }
        }
        if seen.len() != m {
            return Err(invalid("party partition does not cover every row"));
        }
        if let Some(opt) = &self.known_optimum {
            if opt.len() != self.objectives.len() {
                return Err(invalid("known_optimum length differs from objective count"));
            }
        }
        if let Some(gt) = &self.ground_truth {
            if gt.iter().any(|p| p.len() != self.objectives.len()) {
                return Err(invalid("ground truth vector length differs from objective count"));
            }
        }
        Ok(())
    }

    pub fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    /// Solution length (number of rows).
    pub fn size(&self) -> usize {
        self.objectives[0].rows()
    }

    pub fn direction(&self, objective: usize) -> Direction {
        self.objectives[objective].direction()
    }

    /// Exact objective value of `solution`.
    ///
    /// Assignment problems sum `c[i][π(i)]`; the TSP sums the edges of the
    /// closed tour `π(0) → π(1) → ... → π(n-1) → π(0)`.
    pub fn evaluate(&self, objective: usize, solution: &Permutation) -> Result<i64> {
        let matrix = self
            .objectives
            .get(objective)
            .ok_or_else(|| invalid(format!("objective index {objective} out of range")))?;
        if solution.len() != matrix.rows() {
            return Err(invalid(format!(
                "solution length {} does not match instance size {}",
                solution.len(),
                matrix.rows()
            )));
        }
        if solution.as_slice().iter().any(|&c| c >= matrix.cols()) {
            return Err(invalid("solution references a column outside the matrix"));
        }
        Ok(self.evaluate_unchecked(objective, solution.as_slice()))
    }

    /// [`evaluate`](Self::evaluate) without bounds checks on the genome.
    pub(crate) fn evaluate_unchecked(&self, objective: usize, genome: &[usize]) -> i64 {
        let matrix = &self.objectives[objective];
        match self.kind {
            ProblemKind::Tsp => tour_length(matrix, genome),
            ProblemKind::Ap | ProblemKind::Moap => {
                genome.iter().enumerate().map(|(i, &j)| matrix.get(i, j)).sum()
            }
        }
    }

    /// All objective values of `solution`, in objective order.
    pub fn evaluate_all(&self, solution: &Permutation) -> Result<Vec<i64>> {
        (0..self.num_objectives()).map(|k| self.evaluate(k, solution)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&InstanceFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

fn tour_length(matrix: &WeightMatrix, tour: &[usize]) -> i64 {
    let n = tour.len();
    if n < 2 {
        return 0;
    }
    let mut total = matrix.get(tour[n - 1], tour[0]);
    for w in tour.windows(2) {
        total += matrix.get(w[0], w[1]);
    }
    total
}

/// Generates a random assignment instance with entries uniform in `[lo, hi]`.
///
/// `n_obj == 1` yields an AP instance, `n_obj == 2` a MOAP instance. The
/// output depends only on the arguments.
pub fn generate_ap_instance(seed: u64, m: usize, n: usize, n_obj: usize, lo: i64, hi: i64) -> Result<ProblemInstance> {
    if lo > hi {
        return Err(invalid(format!("empty range [{lo}, {hi}]")));
    }
    let kind = match n_obj {
        1 => ProblemKind::Ap,
        2 => ProblemKind::Moap,
        _ => return Err(invalid(format!("unsupported objective count {n_obj}"))),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objectives = (0..n_obj)
        .map(|_| {
            let entries = (0..m * n).map(|_| rng.gen_range(lo..=hi)).collect();
            WeightMatrix::new(m, n, Direction::Maximize, entries)
        })
        .collect::<Result<Vec<_>>>()?;
    let prefix = if n_obj == 1 { "ap" } else { "moap" };
    ProblemInstance::new(format!("{prefix}_{m}x{n}_s{seed}"), kind, objectives)
}

/// On-disk JSON layout of an instance.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    kind: ProblemKind,
    name: String,
    m: usize,
    n: usize,
    objectives: Vec<ObjectiveFile>,
    party_partition: Vec<Vec<usize>>,
    known_optimum: Option<Vec<f64>>,
    ground_truth: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct ObjectiveFile {
    direction: Direction,
    entries: Vec<i64>,
}

impl From<&ProblemInstance> for InstanceFile {
    fn from(p: &ProblemInstance) -> Self {
        Self {
            kind: p.kind,
            name: p.name.clone(),
            m: p.objectives[0].rows(),
            n: p.objectives[0].cols(),
            objectives: p
                .objectives
                .iter()
                .map(|o| ObjectiveFile { direction: o.direction(), entries: o.entries().to_vec() })
                .collect(),
            party_partition: p.party_partition.clone(),
            known_optimum: p.known_optimum.clone(),
            ground_truth: p.ground_truth.clone(),
        }
    }
}

impl TryFrom<InstanceFile> for ProblemInstance {
    type Error = crate::Error;

    fn try_from(f: InstanceFile) -> Result<Self> {
        let objectives = f
            .objectives
            .into_iter()
            .map(|o| WeightMatrix::new(f.m, f.n, o.direction, o.entries))
            .collect::<Result<Vec<_>>>()?;
        let instance = ProblemInstance {
            name: f.name,
            kind: f.kind,
            objectives,
            party_partition: f.party_partition,
            known_optimum: f.known_optimum,
            ground_truth: f.ground_truth,
        };
        instance.validate()?;
        Ok(instance)
    }
}
