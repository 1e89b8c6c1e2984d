//! The evolutionary search: per-category populations of rule vectors under
//! adaptive crossover and mutation, elitist replacement and a stall-based
//! stopping rule.

mod init;
mod operators;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CategorySplit, CooccurrenceMatrix, InvertedIndex, Tokenize, WordDictionary};
use crate::eval;
use crate::rule::{validate, Rule};

pub use init::{initialize_population, insert_rule_schedule, insertion_rule};
pub use operators::{
    cooccurrence_word_distribution, crossover, mutate, operator_probability,
    select_next_generation, MutationContext, OperandSlot,
};

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("category has no positive inquiries")]
    EmptyPositiveSet,
    #[error("feature dictionary is empty")]
    EmptyFeatureDictionary,
    #[error("selection requires every individual to carry a fitness")]
    MissingFitness,
    #[error("selection needs {need} individuals but only {have} are available")]
    PopulationTooSmall { need: usize, have: usize },
}

/// Evolution parameters. Defaults follow the shipped configuration; every
/// field can be overridden from a run config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpConfig {
    /// Population size N.
    pub population_size: usize,
    /// Speed parameter of the adaptive crossover probability.
    pub crossover_speed: f64,
    /// Speed parameter of the adaptive mutation probability.
    pub mutation_speed: f64,
    /// Beta of the F-score fitness.
    pub f_beta: f64,
    /// A fresh rule is injected into the gene pool every this many
    /// generations.
    pub insertion_period: u64,
    /// Stop after this many consecutive generations without improvement of
    /// the best fitness.
    pub stall_window: u32,
    /// Hard cap on generations.
    pub max_generations: u64,
    /// Inclusive range the initial gap maximum is drawn from.
    pub init_gap_min: u32,
    pub init_gap_max: u32,
    /// Master seed of the run.
    pub rng_seed: u64,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            population_size: 50,
            crossover_speed: 2.0,
            mutation_speed: 3.0,
            f_beta: 1.0,
            insertion_period: 500,
            stall_window: 100,
            max_generations: 5000,
            init_gap_min: 1,
            init_gap_max: 10,
            rng_seed: 0,
        }
    }
}

impl GpConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.population_size < 2 {
            return Err(EngineError::InvalidConfig(
                "population_size must be at least 2".into(),
            ));
        }
        if self.insertion_period == 0 {
            return Err(EngineError::InvalidConfig(
                "insertion_period must be at least 1".into(),
            ));
        }
        if self.stall_window == 0 {
            return Err(EngineError::InvalidConfig(
                "stall_window must be at least 1".into(),
            ));
        }
        if self.init_gap_min > self.init_gap_max {
            return Err(EngineError::InvalidConfig(
                "init_gap_min must not exceed init_gap_max".into(),
            ));
        }
        if self.crossover_speed <= 0.0 || self.mutation_speed <= 0.0 {
            return Err(EngineError::InvalidConfig(
                "speed parameters must be positive".into(),
            ));
        }
        if self.f_beta <= 0.0 {
            return Err(EngineError::InvalidConfig("f_beta must be positive".into()));
        }
        Ok(())
    }
}

/// One candidate solution: an ordered rule vector with its cached fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub rules: Vec<Rule>,
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(rules: Vec<Rule>) -> Self {
        Individual {
            rules,
            fitness: None,
        }
    }

    pub fn is_valid(&self) -> bool {
        !self.rules.is_empty() && self.rules.iter().all(|r| validate(r).is_empty())
    }
}

/// Per-generation summary, recorded after selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: u64,
    pub best_f: f64,
    pub avg_f: f64,
    pub mean_rule_count: f64,
}

/// A population at some generation, with its recorded history.
#[derive(Debug, Clone)]
pub struct Population {
    pub individuals: Vec<Individual>,
    pub generation: u64,
    pub history: Vec<GenerationStats>,
}

impl Population {
    pub fn best(&self) -> Option<&Individual> {
        let mut best: Option<&Individual> = None;
        for ind in &self.individuals {
            if best.is_none_or(|b| ind.fitness > b.fitness) {
                best = Some(ind);
            }
        }
        best
    }

    pub fn best_fitness_history(&self) -> impl Iterator<Item = f64> + '_ {
        self.history.iter().map(|s| s.best_f)
    }
}

/// Why an evolution run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Best fitness unchanged for the configured window.
    Stalled,
    /// The generation cap was reached first.
    GenerationCap,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Stalled => "stalled",
            StopReason::GenerationCap => "generation_cap",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub best: Individual,
    pub history: Vec<GenerationStats>,
    pub generations: u64,
    pub stop: StopReason,
}

/// Everything the evolution of one category reads. All pieces are built
/// once from the training corpus and shared immutably across evaluation
/// threads.
pub struct EvolutionContext<'a> {
    pub split: &'a CategorySplit<'a>,
    /// Index over `split.all()`.
    pub index: &'a InvertedIndex,
    pub positive_dict: &'a WordDictionary,
    pub negative_dict: &'a WordDictionary,
    /// Co-occurrence over the positive dictionary within the positive set.
    pub cooccurrence: &'a CooccurrenceMatrix,
    pub tokenizer: &'a dyn Tokenize,
}

/// Evaluates any individual lacking a cached fitness. Individuals are
/// independent, so this runs in parallel; fitness is a pure function of
/// the rules and the split, which keeps results order-independent.
pub fn evaluate_population(
    individuals: &mut [Individual],
    split: &CategorySplit,
    index: &InvertedIndex,
    beta: f64,
) {
    individuals.par_iter_mut().for_each(|ind| {
        if ind.fitness.is_none() {
            ind.fitness = Some(eval::fitness(&ind.rules, split, index, beta));
        }
    });
}

fn stats_of(generation: u64, individuals: &[Individual]) -> GenerationStats {
    let n = individuals.len() as f64;
    let best_f = individuals
        .iter()
        .filter_map(|i| i.fitness)
        .fold(f64::NEG_INFINITY, f64::max);
    let avg_f = individuals.iter().filter_map(|i| i.fitness).sum::<f64>() / n;
    let mean_rule_count = individuals.iter().map(|i| i.rules.len()).sum::<usize>() as f64 / n;
    GenerationStats {
        generation,
        best_f,
        avg_f,
        mean_rule_count,
    }
}

fn random_partner(n: usize, exclude: usize, rng: &mut impl Rng) -> usize {
    let j = rng.random_range(0..n - 1);
    if j >= exclude {
        j + 1
    } else {
        j
    }
}

/// Runs the full evolutionary loop for one category and returns the best
/// individual of the final generation plus the per-generation history.
///
/// Each generation: adaptive per-individual crossover (random distinct
/// partner) and mutation produce offspring; on insertion generations every
/// individual also contributes a copy carrying one freshly seeded rule;
/// parents and offspring are then merged and reduced back to N by elitist
/// replacement. The run stops once the best fitness has not changed for
/// `stall_window` consecutive generations (exact comparison; elitism makes
/// the best value piecewise-constant) or at `max_generations`.
pub fn evolve(
    category_name: &str,
    ctx: &EvolutionContext,
    cfg: &GpConfig,
) -> Result<EvolveOutcome, EngineError> {
    evolve_with_observer(category_name, ctx, cfg, |_, _| {})
}

/// [`evolve`] with a hook called on the initial population and on every
/// merged parent+offspring pool before selection, mainly for invariant
/// checks and instrumentation.
pub fn evolve_with_observer(
    category_name: &str,
    ctx: &EvolutionContext,
    cfg: &GpConfig,
    mut observer: impl FnMut(u64, &[Individual]),
) -> Result<EvolveOutcome, EngineError> {
    cfg.validate()?;
    if ctx.split.positive.is_empty() {
        return Err(EngineError::EmptyPositiveSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut individuals = initialize_population(
        category_name,
        ctx.tokenizer,
        ctx.positive_dict,
        ctx.negative_dict,
        cfg,
        &mut rng,
    )?;
    evaluate_population(&mut individuals, ctx.split, ctx.index, cfg.f_beta);
    observer(0, &individuals);
    let mut history = vec![stats_of(0, &individuals)];

    let mutation_ctx = MutationContext {
        positive_dict: ctx.positive_dict,
        negative_dict: ctx.negative_dict,
        cooccurrence: ctx.cooccurrence,
    };
    let mut generation = 0u64;
    let mut stall = 0u32;
    while generation < cfg.max_generations && stall < cfg.stall_window {
        generation += 1;
        let fitnesses: Vec<f64> = individuals
            .iter()
            .map(|i| i.fitness.expect("population evaluated"))
            .collect();
        let f_max = fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let f_avg = fitnesses.iter().sum::<f64>() / fitnesses.len() as f64;

        let mut offspring: Vec<Individual> = Vec::new();
        for i in 0..individuals.len() {
            let p = operator_probability(fitnesses[i], f_max, f_avg, cfg.crossover_speed);
            if rng.random::<f64>() < p {
                let partner = random_partner(individuals.len(), i, &mut rng);
                let (a, b) = crossover(&individuals[i], &individuals[partner], &mut rng);
                offspring.push(a);
                offspring.push(b);
            }
        }
        for i in 0..individuals.len() {
            let p = operator_probability(fitnesses[i], f_max, f_avg, cfg.mutation_speed);
            if rng.random::<f64>() < p {
                offspring.push(mutate(&individuals[i], &mutation_ctx, &mut rng));
            }
        }
        if generation.is_multiple_of(cfg.insertion_period) {
            // Complexity injection as offspring copies: the originals stay
            // in the pool so the reserved best cannot regress.
            for ind in &individuals {
                let mut grown = ind.clone();
                grown.rules.push(insertion_rule(
                    ctx.positive_dict,
                    ctx.negative_dict,
                    cfg,
                    &mut rng,
                )?);
                grown.fitness = None;
                offspring.push(grown);
            }
        }
        evaluate_population(&mut offspring, ctx.split, ctx.index, cfg.f_beta);

        let mut combined = std::mem::take(&mut individuals);
        combined.append(&mut offspring);
        observer(generation, &combined);
        individuals = select_next_generation(combined, cfg.population_size, &mut rng)?;

        let stats = stats_of(generation, &individuals);
        let previous_best = history.last().expect("gen 0 recorded").best_f;
        if stats.best_f == previous_best {
            stall += 1;
        } else {
            stall = 0;
        }
        history.push(stats);
    }

    let mut best = 0usize;
    for i in 1..individuals.len() {
        if individuals[i].fitness > individuals[best].fitness {
            best = i;
        }
    }
    Ok(EvolveOutcome {
        best: individuals[best].clone(),
        history,
        generations: generation,
        stop: if stall >= cfg.stall_window {
            StopReason::Stalled
        } else {
            StopReason::GenerationCap
        },
    })
}

/// Writes the per-generation history as CSV.
pub fn write_history_csv<W: std::io::Write>(
    history: &[GenerationStats],
    writer: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "generation",
        "best_f",
        "avg_f",
        "population_rule_count_mean",
    ])?;
    for s in history {
        w.write_record([
            s.generation.to_string(),
            s.best_f.to_string(),
            s.avg_f.to_string(),
            s.mean_rule_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reproducibility record emitted next to each evolved rule file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub category: String,
    pub corpus_hash: String,
    pub config: GpConfig,
    pub generations: u64,
    pub best_fitness: f64,
    pub stop_reason: String,
}
