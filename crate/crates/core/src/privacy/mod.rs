//! Simulated privacy engine.
//!
//! The engine computes actual fitness privately and reveals only obfuscated
//! labels plus the population maximum. There is no secret sharing, MPC or
//! networking here; the boundary exists so that the optimizer can only see
//! what a real deployment would reveal.
//!
//! All values crossing the boundary are oriented so that larger is better:
//! minimized objectives are negated before obfuscation.

mod estimate;
mod leakage;
mod obfuscate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::problem::{Permutation, ProblemInstance};

pub use estimate::{estimate_fitness, estimated_minimum, level_distance};
pub use leakage::{leakage_estimate, LeakageEstimate, NO_DUPLICATES_ASSUMPTION};
pub use obfuscate::{
    obfuscate_buckets, obfuscate_order, obfuscate_quantiles, obfuscate_threshold, obfuscate_top, quantile_sizes,
    THRESHOLD_MIN_SELECTED,
};

/// How the fitness of one objective is revealed.
///
/// The textual form is the short tag used in tables: `none`, `O`, `Q5`,
/// `B10`, `T15`, `A80`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ObfuscationMethod {
    None,
    Order,
    OrderQuantiles(usize),
    FitnessBuckets(usize),
    TopIndividuals(usize),
    AboveThreshold(f64),
}

impl ObfuscationMethod {
    /// Number of distinct label levels for a population of `n`.
    pub fn levels(&self, n: usize) -> usize {
        match *self {
            ObfuscationMethod::None | ObfuscationMethod::Order => n,
            ObfuscationMethod::OrderQuantiles(k) | ObfuscationMethod::FitnessBuckets(k) => k,
            ObfuscationMethod::TopIndividuals(_) | ObfuscationMethod::AboveThreshold(_) => 2,
        }
    }

    pub fn is_obfuscated(&self) -> bool {
        !matches!(self, ObfuscationMethod::None)
    }

    /// Family name shared by all parameterizations of a method.
    pub fn family(&self) -> &'static str {
        match self {
            ObfuscationMethod::None => "none",
            ObfuscationMethod::Order => "order",
            ObfuscationMethod::OrderQuantiles(_) => "quantiles",
            ObfuscationMethod::FitnessBuckets(_) => "buckets",
            ObfuscationMethod::TopIndividuals(_) => "top",
            ObfuscationMethod::AboveThreshold(_) => "threshold",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ObfuscationMethod::OrderQuantiles(0) | ObfuscationMethod::FitnessBuckets(0) | ObfuscationMethod::TopIndividuals(0) => {
                Err(invalid(format!("{self}: parameter must be at least 1")))
            }
            ObfuscationMethod::AboveThreshold(k) if !(0.0..=100.0).contains(&k) => {
                Err(invalid(format!("{self}: threshold must lie in [0, 100]")))
            }
            _ => Ok(()),
        }
    }

    /// Applies the mapping to oriented fitness values.
    pub fn obfuscate(&self, fitness: &[f64]) -> Result<Labels> {
        Ok(match *self {
            ObfuscationMethod::None => Labels::Actual(fitness.to_vec()),
            ObfuscationMethod::Order => Labels::Index(obfuscate_order(fitness)),
            ObfuscationMethod::OrderQuantiles(k) => Labels::Index(obfuscate_quantiles(fitness, k)?),
            ObfuscationMethod::FitnessBuckets(k) => Labels::Index(obfuscate_buckets(fitness, k)?),
            ObfuscationMethod::TopIndividuals(k) => Labels::Flag(obfuscate_top(fitness, k)?),
            ObfuscationMethod::AboveThreshold(k) => Labels::Flag(obfuscate_threshold(fitness, k)?),
        })
    }
}

impl fmt::Display for ObfuscationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObfuscationMethod::None => f.write_str("none"),
            ObfuscationMethod::Order => f.write_str("O"),
            ObfuscationMethod::OrderQuantiles(k) => write!(f, "Q{k}"),
            ObfuscationMethod::FitnessBuckets(k) => write!(f, "B{k}"),
            ObfuscationMethod::TopIndividuals(k) => write!(f, "T{k}"),
            ObfuscationMethod::AboveThreshold(k) => write!(f, "A{k}"),
        }
    }
}

impl FromStr for ObfuscationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || invalid(format!("unknown obfuscation method `{s}`"));
        let method = match s {
            "none" | "-" => ObfuscationMethod::None,
            "O" | "order" => ObfuscationMethod::Order,
            _ => {
                let (tag, param) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
                match tag {
                    "Q" => ObfuscationMethod::OrderQuantiles(param.parse().map_err(|_| bad())?),
                    "B" => ObfuscationMethod::FitnessBuckets(param.parse().map_err(|_| bad())?),
                    "T" => ObfuscationMethod::TopIndividuals(param.parse().map_err(|_| bad())?),
                    "A" => ObfuscationMethod::AboveThreshold(param.parse().map_err(|_| bad())?),
                    _ => return Err(bad()),
                }
            }
        };
        method.validate()?;
        Ok(method)
    }
}

impl TryFrom<String> for ObfuscationMethod {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ObfuscationMethod> for String {
    fn from(m: ObfuscationMethod) -> String {
        m.to_string()
    }
}

/// One obfuscation method per objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObfuscationPlan(Vec<ObfuscationMethod>);

impl ObfuscationPlan {
    pub fn new(methods: Vec<ObfuscationMethod>) -> Result<Self> {
        for m in &methods {
            m.validate()?;
        }
        Ok(Self(methods))
    }

    /// No obfuscation on any of `objectives`.
    pub fn none(objectives: usize) -> Self {
        Self(vec![ObfuscationMethod::None; objectives])
    }

    /// The same method on every objective.
    pub fn uniform(method: ObfuscationMethod, objectives: usize) -> Self {
        Self(vec![method; objectives])
    }

    /// `method` on the listed objectives, no obfuscation elsewhere.
    pub fn on(method: ObfuscationMethod, objectives: usize, obfuscated: &[usize]) -> Self {
        Self(
            (0..objectives)
                .map(|k| if obfuscated.contains(&k) { method } else { ObfuscationMethod::None })
                .collect(),
        )
    }

    pub fn methods(&self) -> &[ObfuscationMethod] {
        &self.0
    }

    pub fn method(&self, objective: usize) -> ObfuscationMethod {
        self.0[objective]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Obfuscated labels for one population and one objective.
///
/// Only the pass-through variant carries per-individual fitness values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Labels {
    /// No obfuscation: the oriented fitness itself.
    Actual(Vec<f64>),
    /// Rank, quantile or bucket index; 0 is best.
    Index(Vec<usize>),
    /// Top-k or above-threshold membership.
    Flag(Vec<bool>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Actual(v) => v.len(),
            Labels::Index(v) => v.len(),
            Labels::Flag(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The label of individual `i`.
    pub fn get(&self, i: usize) -> Label {
        match self {
            Labels::Actual(v) => Label::Actual(v[i]),
            Labels::Index(v) => Label::Index(v[i]),
            Labels::Flag(v) => Label::Flag(v[i]),
        }
    }
}

/// The obfuscated label of a single individual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Actual(f64),
    Index(usize),
    Flag(bool),
}

/// What the privacy engine returns for one population and one objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObfuscatedEvaluation {
    pub labels: Labels,
    /// Largest oriented actual fitness in the population.
    pub max_fitness: f64,
    /// Number of distinct label levels `u`.
    pub levels: usize,
}

impl ObfuscatedEvaluation {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Optimizer-side estimated fitness for every individual.
    pub fn estimate(&self) -> Vec<f64> {
        estimate_fitness(&self.labels, self.max_fitness, self.levels)
    }
}

/// A privacy engine dedicated to one objective of one instance.
#[derive(Clone, Copy, Debug)]
pub struct PrivacyEngine<'a> {
    instance: &'a ProblemInstance,
    objective: usize,
    method: ObfuscationMethod,
}

impl<'a> PrivacyEngine<'a> {
    pub fn new(instance: &'a ProblemInstance, objective: usize, method: ObfuscationMethod) -> Result<Self> {
        if objective >= instance.num_objectives() {
            return Err(invalid(format!("objective index {objective} out of range")));
        }
        method.validate()?;
        Ok(Self { instance, objective, method })
    }

    pub fn method(&self) -> ObfuscationMethod {
        self.method
    }

    /// Evaluates a population and reveals only the obfuscated result.
    pub fn evaluate<G: AsRef<[usize]>>(&self, genomes: &[G]) -> Result<ObfuscatedEvaluation> {
        if genomes.is_empty() {
            return Err(invalid("cannot evaluate an empty population"));
        }
        let n = self.instance.size();
        let sign = self.instance.direction(self.objective).sign();
        let fitness = genomes
            .iter()
            .map(|g| {
                let g = g.as_ref();
                if g.len() != n {
                    return Err(invalid(format!("genome length {} does not match instance size {n}", g.len())));
                }
                Ok(sign * self.instance.evaluate_unchecked(self.objective, g) as f64)
            })
            .collect::<Result<Vec<f64>>>()?;
        let max_fitness = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(ObfuscatedEvaluation {
            labels: self.method.obfuscate(&fitness)?,
            max_fitness,
            levels: self.method.levels(fitness.len()),
        })
    }
}

/// Evaluates `genomes` on one objective through a fresh engine.
pub fn evaluate_population(
    instance: &ProblemInstance,
    objective: usize,
    genomes: &[Permutation],
    method: ObfuscationMethod,
) -> Result<ObfuscatedEvaluation> {
    for g in genomes {
        if !g.is_valid() {
            return Err(invalid("genome is not a permutation"));
        }
    }
    let slices: Vec<&[usize]> = genomes.iter().map(Permutation::as_slice).collect();
    PrivacyEngine::new(instance, objective, method)?.evaluate(&slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{generate_ap_instance, tsplib::euclidean_instance};

    #[test]
    fn tags_round_trip() {
        for tag in ["none", "O", "Q5", "B10", "T15", "A80", "A72.5"] {
            let m: ObfuscationMethod = tag.parse().unwrap();
            assert_eq!(m.to_string(), tag);
        }
        assert!("X3".parse::<ObfuscationMethod>().is_err());
        assert!("Q0".parse::<ObfuscationMethod>().is_err());
        assert!("A150".parse::<ObfuscationMethod>().is_err());
        let json = serde_json::to_string(&ObfuscationPlan::on(ObfuscationMethod::TopIndividuals(4), 2, &[0])).unwrap();
        assert_eq!(json, r#"["T4","none"]"#);
    }

    #[test]
    fn pass_through_and_revealed_max() {
        let inst = generate_ap_instance(2, 6, 6, 1, 0, 50).unwrap();
        let mut rng = rand::thread_rng();
        let genomes: Vec<Permutation> = (0..9).map(|_| Permutation::random(6, &mut rng)).collect();
        let actual: Vec<f64> = genomes.iter().map(|g| inst.evaluate(0, g).unwrap() as f64).collect();
        let plain = evaluate_population(&inst, 0, &genomes, ObfuscationMethod::None).unwrap();
        assert_eq!(plain.labels, Labels::Actual(actual.clone()));
        let max = actual.iter().copied().fold(f64::MIN, f64::max);
        for method in ["O", "Q3", "B3", "T2", "A50"] {
            let eval = evaluate_population(&inst, 0, &genomes, method.parse().unwrap()).unwrap();
            assert_eq!(eval.max_fitness, max);
            assert!(!matches!(eval.labels, Labels::Actual(_)));
        }
    }

    #[test]
    fn minimized_objectives_are_negated() {
        let inst = euclidean_instance("line", &[(0.0, 0.0), (3.0, 0.0), (6.0, 0.0)]).unwrap();
        let eval = evaluate_population(&inst, 0, &[Permutation::identity(3)], ObfuscationMethod::Order).unwrap();
        assert_eq!(eval.max_fitness, -12.0);
    }
}
