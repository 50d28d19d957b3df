//! Generational evolutionary search (single-objective GA or NSGA-II) whose
//! fitness information comes only through the privacy layer.

mod operators;
mod selection;

pub use operators::{
    crossover, cycle_crossover, edge_crossover, insert_gene, invert_segment, mutate, order_child, pmx_child, segment,
    uniform_order_child, CrossoverOp, MutationOp,
};
pub use selection::{
    crowded_tournament, crowding_distance, non_dominated_sort, nsga2_survivors, tournament_select,
    truncation_survivors, NsgaRanking,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metrics::{gd_plus, igd_plus, mean, normalize, relative_error, MetricKind, MetricValue};
use crate::pareto::dominates;
use crate::privacy::{Label, ObfuscationPlan, PrivacyEngine};
use crate::problem::{GroundTruthSet, Permutation, ProblemInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "GA")]
    Ga,
    #[serde(rename = "NSGA2")]
    Nsga2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EAConfig {
    pub algorithm: Algorithm,
    /// Population size μ.
    pub mu: usize,
    /// Elite count κ.
    pub kappa: usize,
    pub generations: usize,
    /// Used by the GA only.
    pub tournament_size: usize,
    pub crossover: CrossoverOp,
    /// Percent.
    pub crossover_prob: f64,
    pub mutation: MutationOp,
    /// Percent.
    pub mutation_prob: f64,
    pub reevaluate_parents: bool,
}

impl EAConfig {
    /// Tuned GA for the assignment problem.
    pub fn ga_ap() -> Self {
        Self {
            algorithm: Algorithm::Ga,
            mu: 300,
            kappa: 15,
            generations: 500,
            tournament_size: 18,
            crossover: CrossoverOp::Cycle,
            crossover_prob: 95.0,
            mutation: MutationOp::Swap,
            mutation_prob: 100.0,
            reevaluate_parents: false,
        }
    }

    /// Tuned GA for the travelling salesperson problem.
    pub fn ga_tsp() -> Self {
        Self {
            tournament_size: 20,
            crossover: CrossoverOp::Edge,
            crossover_prob: 75.0,
            mutation: MutationOp::Inversion,
            mutation_prob: 100.0,
            ..Self::ga_ap()
        }
    }

    /// NSGA-II for the multi-objective assignment problem.
    pub fn nsga2_moap() -> Self {
        Self {
            algorithm: Algorithm::Nsga2,
            mu: 150,
            kappa: 0,
            generations: 500,
            tournament_size: 2,
            crossover: CrossoverOp::Cycle,
            crossover_prob: 100.0,
            mutation: MutationOp::Swap,
            mutation_prob: 75.0,
            reevaluate_parents: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu == 0 || self.kappa >= self.mu {
            return Err(invalid(format!("need 0 <= kappa < mu, got kappa = {}, mu = {}", self.kappa, self.mu)));
        }
        for (name, p) in [("crossover", self.crossover_prob), ("mutation", self.mutation_prob)] {
            if !(0.0..=100.0).contains(&p) {
                return Err(invalid(format!("{name} probability {p} outside [0, 100]")));
            }
        }
        match self.algorithm {
            Algorithm::Ga if self.tournament_size == 0 => Err(invalid("tournament size must be at least 1")),
            Algorithm::Nsga2 if self.kappa != 0 || !self.reevaluate_parents => {
                Err(invalid("NSGA-II runs with kappa = 0 and parent re-evaluation"))
            }
            _ => Ok(()),
        }
    }

    /// Individuals evaluated in every generation after the first.
    pub fn batch_size(&self) -> usize {
        self.mu + if self.reevaluate_parents { self.mu } else { 0 }
    }
}

/// An evaluated individual. `estimated` and `labels` are meaningful only
/// within the batch that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genome: Permutation,
    /// Actual objective values in their natural orientation (trusted channel).
    pub actual: Vec<f64>,
    /// Estimated fitness per objective, larger is better.
    pub estimated: Vec<f64>,
    pub labels: Vec<Label>,
}

/// Evaluates one batch through one privacy engine per objective.
pub fn evaluate_batch(
    instance: &ProblemInstance,
    plan: &ObfuscationPlan,
    genomes: Vec<Permutation>,
) -> Result<Vec<Individual>> {
    let n_obj = instance.num_objectives();
    if plan.len() != n_obj {
        return Err(invalid(format!("plan covers {} objectives, instance has {n_obj}", plan.len())));
    }
    let mut batch: Vec<Individual> = genomes
        .into_iter()
        .map(|genome| Individual {
            actual: (0..n_obj).map(|i| instance.evaluate_unchecked(i, genome.as_slice()) as f64).collect(),
            genome,
            estimated: Vec::with_capacity(n_obj),
            labels: Vec::with_capacity(n_obj),
        })
        .collect();
    let slices: Vec<&[usize]> = batch.iter().map(|ind| ind.genome.as_slice()).collect();
    let evaluations = (0..n_obj)
        .map(|objective| PrivacyEngine::new(instance, objective, plan.method(objective))?.evaluate(&slices))
        .collect::<Result<Vec<_>>>()?;
    for evaluation in evaluations {
        let estimated = evaluation.estimate();
        for (k, ind) in batch.iter_mut().enumerate() {
            ind.estimated.push(estimated[k]);
            ind.labels.push(evaluation.labels.get(k));
        }
    }
    Ok(batch)
}

/// Indices of the estimated-best individuals: those at the maximum estimated
/// fitness (one objective) or the non-dominated set under estimated fitness.
pub fn result_set(population: &[Individual]) -> Vec<usize> {
    let Some(first) = population.first() else {
        return Vec::new();
    };
    if first.estimated.len() == 1 {
        let best = population.iter().map(|p| p.estimated[0]).fold(f64::NEG_INFINITY, f64::max);
        (0..population.len()).filter(|&i| population[i].estimated[0] == best).collect()
    } else {
        (0..population.len())
            .filter(|&i| !population.iter().any(|q| dominates(&q.estimated, &population[i].estimated)))
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Store the genomes of result-set members in every record.
    pub keep_genomes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultMember {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genome: Option<Vec<usize>>,
    pub actual: Vec<f64>,
    pub estimated: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Size of the batch sent to the privacy layer.
    pub evaluated: usize,
    pub result_set: Vec<ResultMember>,
    /// Best actual value per objective in the evaluated batch (the revealed maximum,
    /// reported in the objective's own orientation).
    pub population_best: Vec<f64>,
    pub metrics: Vec<MetricValue>,
}

impl GenerationRecord {
    pub fn metric(&self, kind: MetricKind, objective: Option<usize>, normalized: bool) -> Option<f64> {
        self.metrics
            .iter()
            .find(|m| m.kind == kind && m.objective == objective && m.normalized == normalized)
            .map(|m| m.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub instance: String,
    pub seed: u64,
    pub config: EAConfig,
    pub plan: ObfuscationPlan,
    pub initial_population: Vec<Vec<usize>>,
    pub records: Vec<GenerationRecord>,
}

/// Current population with the information parent selection needs.
struct Population {
    members: Vec<Individual>,
    ranking: Option<NsgaRanking>,
}

fn select_survivors(config: &EAConfig, batch: Vec<Individual>) -> Population {
    let order: Vec<usize>;
    let mut ranking = None;
    match config.algorithm {
        Algorithm::Ga => {
            let fitness: Vec<f64> = batch.iter().map(|i| i.estimated[0]).collect();
            order = truncation_survivors(&fitness, config.mu);
        }
        Algorithm::Nsga2 => {
            let points: Vec<Vec<f64>> = batch.iter().map(|i| i.estimated.clone()).collect();
            let r = nsga2_survivors(&points, config.mu);
            order = r.survivors.clone();
            ranking = Some(r);
        }
    }
    let mut slots: Vec<Option<Individual>> = batch.into_iter().map(Some).collect();
    let members = order.into_iter().map(|i| slots[i].take().expect("survivor chosen once")).collect();
    Population { members, ranking }
}

fn select_parents(config: &EAConfig, population: &Population, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    match &population.ranking {
        Some(r) => (0..count).map(|_| crowded_tournament(&r.rank, &r.crowding, rng)).collect(),
        None => {
            let fitness: Vec<f64> = population.members.iter().map(|i| i.estimated[0]).collect();
            (0..count).map(|_| tournament_select(&fitness, config.tournament_size, rng)).collect()
        }
    }
}

struct MetricContext {
    optimum: Option<Vec<f64>>,
    truth: Option<GroundTruthSet>,
}

impl MetricContext {
    fn new(instance: &ProblemInstance) -> Result<Self> {
        let truth = match &instance.ground_truth {
            Some(points) if !points.is_empty() => Some(GroundTruthSet::from_points(points.clone())?),
            _ => None,
        };
        Ok(Self { optimum: instance.known_optimum.clone(), truth })
    }

    fn compute(&self, instance: &ProblemInstance, members: &[ResultMember]) -> Vec<MetricValue> {
        let mut out = Vec::new();
        for objective in 0..instance.num_objectives() {
            let values: Vec<f64> = members.iter().map(|m| m.actual[objective]).collect();
            let Some(avg) = mean(&values) else { continue };
            out.push(MetricValue::new(MetricKind::MeanFitness, Some(objective), avg, false));
            if let Some(opt) = self.optimum.as_ref().and_then(|o| o.get(objective)) {
                if let Ok(e) = relative_error(avg, *opt, instance.direction(objective)) {
                    out.push(MetricValue::new(MetricKind::RelativeError, Some(objective), e, false));
                }
            }
            if let Some(t) = &self.truth {
                if let Ok(f) = normalize(avg, t.ideal()[objective], t.nadir()[objective]) {
                    out.push(MetricValue::new(MetricKind::MeanFitness, Some(objective), f, true));
                }
            }
        }
        if let Some(t) = &self.truth {
            let found: Vec<Vec<f64>> = members.iter().map(|m| m.actual.clone()).collect();
            if let Ok(v) = gd_plus(&found, t, false) {
                out.push(MetricValue::new(MetricKind::GdPlus, None, v, false));
            }
            if let Ok(v) = igd_plus(&found, t, false) {
                out.push(MetricValue::new(MetricKind::IgdPlus, None, v, false));
            }
        }
        out
    }
}

fn record(
    generation: usize,
    evaluated: usize,
    population: &[Individual],
    batch_best: Vec<f64>,
    instance: &ProblemInstance,
    ctx: &MetricContext,
    options: &RunOptions,
) -> GenerationRecord {
    let result_set: Vec<ResultMember> = result_set(population)
        .into_iter()
        .map(|i| ResultMember {
            genome: options.keep_genomes.then(|| population[i].genome.as_slice().to_vec()),
            actual: population[i].actual.clone(),
            estimated: population[i].estimated.clone(),
        })
        .collect();
    let metrics = ctx.compute(instance, &result_set);
    GenerationRecord { generation, evaluated, result_set, population_best: batch_best, metrics }
}

fn batch_best(instance: &ProblemInstance, batch: &[Individual]) -> Vec<f64> {
    (0..instance.num_objectives())
        .map(|o| {
            let sign = instance.direction(o).sign();
            sign * batch.iter().map(|i| sign * i.actual[o]).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Checks that `config` and `plan` suit `instance`.
pub fn check_run(instance: &ProblemInstance, config: &EAConfig, plan: &ObfuscationPlan) -> Result<()> {
    config.validate()?;
    let n_obj = instance.num_objectives();
    match config.algorithm {
        Algorithm::Ga if n_obj != 1 => {
            return Err(invalid(format!("GA needs a single objective, instance has {n_obj}")));
        }
        Algorithm::Nsga2 if n_obj < 2 => return Err(invalid("NSGA-II needs at least two objectives")),
        _ => {}
    }
    if plan.len() != n_obj {
        return Err(invalid(format!("plan covers {} objectives, instance has {n_obj}", plan.len())));
    }
    for m in plan.methods() {
        m.validate()?;
    }
    Ok(())
}

/// Runs one seeded evolutionary search.
///
/// The seed is the only entropy source and the initial population is drawn
/// first, so runs sharing a seed share their initial population.
pub fn run(
    instance: &ProblemInstance,
    config: &EAConfig,
    plan: &ObfuscationPlan,
    seed: u64,
    options: &RunOptions,
) -> Result<RunTrace> {
    check_run(instance, config, plan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = instance.size();
    let ctx = MetricContext::new(instance)?;

    let initial: Vec<Permutation> = (0..config.mu).map(|_| Permutation::random(n, &mut rng)).collect();
    let initial_population: Vec<Vec<usize>> = initial.iter().map(|p| p.as_slice().to_vec()).collect();
    let batch = evaluate_batch(instance, plan, initial)?;
    let best = batch_best(instance, &batch);
    let evaluated = batch.len();
    let mut population = select_survivors(config, batch);
    let mut records = Vec::with_capacity(config.generations + 1);
    records.push(record(0, evaluated, &population.members, best, instance, &ctx, options));

    let offspring_count = config.mu - config.kappa;
    let parent_count = offspring_count + offspring_count % 2;
    for generation in 1..=config.generations {
        let parents = select_parents(config, &population, parent_count, &mut rng);
        let mut children: Vec<Vec<usize>> = Vec::with_capacity(parent_count);
        for pair in parents.chunks_exact(2) {
            let (a, b) = (population.members[pair[0]].genome.as_slice(), population.members[pair[1]].genome.as_slice());
            let (c1, c2) = crossover(a, b, config.crossover, config.crossover_prob, &mut rng);
            children.push(c1);
            children.push(c2);
        }
        children.truncate(offspring_count);
        for child in &mut children {
            mutate(child, config.mutation, config.mutation_prob, &mut rng);
        }
        let mut genomes: Vec<Permutation> = Vec::with_capacity(config.batch_size());
        genomes.extend(children.into_iter().map(Permutation::from_vec_unchecked));
        // Survivors are stored best first, so the leading κ are the elites.
        genomes.extend(population.members.iter().take(config.kappa).map(|i| i.genome.clone()));
        if config.reevaluate_parents {
            genomes.extend(population.members.iter().map(|i| i.genome.clone()));
        }
        debug_assert!(genomes.iter().all(Permutation::is_valid));
        let batch = evaluate_batch(instance, plan, genomes)?;
        let best = batch_best(instance, &batch);
        let evaluated = batch.len();
        population = select_survivors(config, batch);
        records.push(record(generation, evaluated, &population.members, best, instance, &ctx, options));
    }

    Ok(RunTrace {
        instance: instance.name.clone(),
        seed,
        config: config.clone(),
        plan: plan.clone(),
        initial_population,
        records,
    })
}
