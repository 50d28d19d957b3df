use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::problem::{Direction, GroundTruthSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    RelativeError,
    MeanFitness,
    GdPlus,
    IgdPlus,
}

impl MetricKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MetricKind::RelativeError => "relative_error",
            MetricKind::MeanFitness => "mean_fitness",
            MetricKind::GdPlus => "gd_plus",
            MetricKind::IgdPlus => "igd_plus",
        }
    }

    /// Whether larger metric values are better for `objective_direction`.
    ///
    /// Mean fitness follows the objective; the error and distance
    /// indicators are always minimized.
    pub fn higher_is_better(&self, objective_direction: Direction) -> bool {
        match self {
            MetricKind::MeanFitness => objective_direction == Direction::Maximize,
            _ => false,
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MetricKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relative_error" => Ok(MetricKind::RelativeError),
            "mean_fitness" => Ok(MetricKind::MeanFitness),
            "gd_plus" => Ok(MetricKind::GdPlus),
            "igd_plus" => Ok(MetricKind::IgdPlus),
            _ => Err(invalid(format!("unknown metric `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub kind: MetricKind,
    /// Objective the value refers to; `None` for set-based indicators.
    pub objective: Option<usize>,
    pub value: f64,
    pub normalized: bool,
}

impl MetricValue {
    pub fn new(kind: MetricKind, objective: Option<usize>, value: f64, normalized: bool) -> Self {
        Self { kind, objective, value, normalized }
    }
}

/// `(f★ − f)/f★` for maximization, `(f − f★)/f★` for minimization.
pub fn relative_error(f: f64, f_star: f64, direction: Direction) -> Result<f64> {
    if f_star == 0.0 {
        return Err(invalid("relative error is undefined for a zero optimum"));
    }
    Ok(match direction {
        Direction::Maximize => (f_star - f) / f_star,
        Direction::Minimize => (f - f_star) / f_star,
    })
}

/// Maps `ideal → 0` and `nadir → 1` linearly.
pub fn normalize(f: f64, ideal: f64, nadir: f64) -> Result<f64> {
    if ideal == nadir {
        return Err(invalid("ideal and nadir coincide"));
    }
    Ok((ideal - f) / (ideal - nadir))
}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Dominance-aware distance for maximization: only objectives where `a` is
/// worse than `z` contribute. `scale[i]` divides each component.
fn d_plus(a: &[f64], z: &[f64], scale: Option<&[f64]>) -> f64 {
    a.iter()
        .zip(z)
        .enumerate()
        .map(|(i, (ai, zi))| {
            let gap = (zi - ai).max(0.0);
            let gap = scale.map_or(gap, |s| gap / s[i]);
            gap * gap
        })
        .sum::<f64>()
        .sqrt()
}

fn scales(truth: &GroundTruthSet, normalized: bool) -> Result<Option<Vec<f64>>> {
    if !normalized {
        return Ok(None);
    }
    let s: Vec<f64> = truth.ideal().iter().zip(truth.nadir()).map(|(i, n)| i - n).collect();
    if s.iter().any(|&x| x == 0.0) {
        return Err(invalid("cannot normalize: ideal equals nadir in some objective"));
    }
    Ok(Some(s))
}

fn check_inputs(found: &[Vec<f64>], truth: &GroundTruthSet) -> Result<()> {
    if found.is_empty() || truth.is_empty() {
        return Err(invalid("GD+/IGD+ need non-empty point sets"));
    }
    let dim = truth.ideal().len();
    if found.iter().any(|p| p.len() != dim) {
        return Err(invalid("point dimension differs from ground truth"));
    }
    Ok(())
}

fn mean_min_distance(from: &[Vec<f64>], to: &[Vec<f64>], swap: bool, scale: Option<&[f64]>) -> f64 {
    let total: f64 = from
        .iter()
        .map(|p| {
            to.iter()
                .map(|q| if swap { d_plus(q, p, scale) } else { d_plus(p, q, scale) })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / from.len() as f64
}

/// GD⁺: mean over found points of the distance to the nearest truth point.
pub fn gd_plus(found: &[Vec<f64>], truth: &GroundTruthSet, normalized: bool) -> Result<f64> {
    check_inputs(found, truth)?;
    let scale = scales(truth, normalized)?;
    Ok(mean_min_distance(found, truth.points(), false, scale.as_deref()))
}

/// IGD⁺: mean over truth points of the distance from the nearest found point.
pub fn igd_plus(found: &[Vec<f64>], truth: &GroundTruthSet, normalized: bool) -> Result<f64> {
    check_inputs(found, truth)?;
    let scale = scales(truth, normalized)?;
    Ok(mean_min_distance(truth.points(), found, true, scale.as_deref()))
}
