use serde::{Deserialize, Serialize};

use super::{solve_assignment_real, Direction, ProblemInstance, ProblemKind, WeightMatrix};
use crate::error::{invalid, Result};
use crate::pareto::non_dominated_points;

/// Number of weight steps; weights run over `i / SCALARIZATION_STEPS` for
/// `i in 0..=SCALARIZATION_STEPS` (101 scalarizations).
pub const SCALARIZATION_STEPS: usize = 100;

/// Reference set of mutually non-dominated objective vectors for a
/// maximization problem, with its ideal and nadir points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthSet {
    points: Vec<Vec<f64>>,
    ideal: Vec<f64>,
    nadir: Vec<f64>,
}

impl GroundTruthSet {
    /// Builds a set from arbitrary points, dropping duplicates and dominated
    /// points (all objectives maximized).
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(invalid("ground truth needs non-empty points of equal dimension"));
        }
        let points = non_dominated_points(points);
        let ideal = (0..dim).map(|k| points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let nadir = (0..dim).map(|k| points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min)).collect();
        Ok(Self { points, ideal, nadir })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn ideal(&self) -> &[f64] {
        &self.ideal
    }

    pub fn nadir(&self) -> &[f64] {
        &self.nadir
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Min-max scales a matrix to `[0, 1]`; constant matrices map to zeros.
fn normalized(matrix: &WeightMatrix) -> Vec<f64> {
    let (lo, hi) = (matrix.min_entry() as f64, matrix.max_entry() as f64);
    let span = hi - lo;
    matrix
        .entries()
        .iter()
        .map(|&c| if span > 0.0 { (c as f64 - lo) / span } else { 0.0 })
        .collect()
}

/// Supported Pareto-optimal points of a bi-objective assignment instance.
///
/// Solves the 101 weighted sums `w·N₁ + (1−w)·N₂` of the min-max normalized
/// matrices exactly and keeps the original objective vectors of the optimal
/// assignments.
pub fn compute_ground_truth(instance: &ProblemInstance) -> Result<GroundTruthSet> {
    if instance.kind != ProblemKind::Moap {
        return Err(invalid(format!("ground truth requires a MOAP instance, got {}", instance.kind)));
    }
    let n = instance.size();
    if !instance.objectives[0].is_square() {
        return Err(invalid("ground truth requires square matrices"));
    }
    let first = normalized(&instance.objectives[0]);
    let second = normalized(&instance.objectives[1]);
    let mut combined = vec![0.0; n * n];
    let mut points = Vec::with_capacity(SCALARIZATION_STEPS + 1);
    for i in 0..=SCALARIZATION_STEPS {
        let w1 = i as f64 / SCALARIZATION_STEPS as f64;
        let w2 = 1.0 - w1;
        for (c, (a, b)) in combined.iter_mut().zip(first.iter().zip(&second)) {
            *c = w1 * a + w2 * b;
        }
        let solution = solve_assignment_real(n, &combined, Direction::Maximize)?;
        points.push(
            instance
                .evaluate_all(&solution)?
                .into_iter()
                .map(|v| v as f64)
                .collect(),
        );
    }
    GroundTruthSet::from_points(points)
}
