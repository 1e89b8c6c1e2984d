//! The four pipeline commands, exposed as library functions so tests can
//! drive them in-process.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use regevo_core::corpus::{
    build_cooccurrence, build_feature_dictionary, build_negative_dictionary, ingest,
    split_by_category, train_test_split, CategorySplit, InvertedIndex, LabeledCorpus,
    ReferenceTokenizer, Tokenize,
};
use regevo_core::engine::{
    evolve, write_history_csv, EvolutionContext, EvolveOutcome, RunManifest,
};
use regevo_core::eval::{classify_tokens, CategoryMetrics, ConfusionCounts, MetricsReport};
use regevo_core::hybrid::{
    hybrid_classify_tokens, train_baseline, write_comparison_csv, ComparisonRow, Provenance,
};
use regevo_core::rule::{format as rule_format, RuleVector};

use crate::config::{derive_seed, CategorySelection, RunConfig};
use crate::CliError;

fn tokenizer_of(config: &RunConfig) -> ReferenceTokenizer {
    ReferenceTokenizer {
        lowercase: config.lowercase,
    }
}

fn load_corpus(config: &RunConfig) -> Result<LabeledCorpus, CliError> {
    let tokenizer = tokenizer_of(config);
    ingest(&config.corpus, &tokenizer)
        .map_err(|e| CliError::runtime(format!("corpus {}: {e}", config.corpus.display())))
}

fn split_corpus(config: &RunConfig, corpus: &LabeledCorpus) -> (LabeledCorpus, LabeledCorpus) {
    train_test_split(
        corpus,
        config.split_ratio,
        derive_seed(config.seed, "split"),
    )
}

/// Categories of the run, ordered by descending training-set size with
/// lexicographic tie-breaks. This order is also the classify priority.
fn resolve_categories(
    config: &RunConfig,
    corpus: &LabeledCorpus,
    train: &LabeledCorpus,
) -> Result<Vec<String>, CliError> {
    let mut requested: Vec<String> = match &config.categories {
        CategorySelection::All(_) => corpus.categories.iter().cloned().collect(),
        CategorySelection::List(list) => {
            for category in list {
                if !corpus.categories.contains(category) {
                    return Err(CliError::usage(format!("unknown category {category:?}")));
                }
            }
            list.clone()
        }
    };
    let mut sizes: HashMap<&str, usize> = HashMap::new();
    for q in &train.inquiries {
        *sizes.entry(q.label.as_str()).or_insert(0) += 1;
    }
    requested.sort_by(|a, b| {
        let sa = sizes.get(a.as_str()).copied().unwrap_or(0);
        let sb = sizes.get(b.as_str()).copied().unwrap_or(0);
        sb.cmp(&sa).then(a.cmp(b))
    });
    requested.dedup();
    Ok(requested)
}

/// File-system-safe name of a category.
fn sanitize(category: &str) -> String {
    category
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn ensure_distinct_files(categories: &[String]) -> Result<(), CliError> {
    let mut seen: HashMap<String, &str> = HashMap::new();
    for category in categories {
        if let Some(other) = seen.insert(sanitize(category), category) {
            return Err(CliError::usage(format!(
                "categories {other:?} and {category:?} collide on output file names"
            )));
        }
    }
    Ok(())
}

/// A split of `corpus` against one category that may be absent from it
/// (e.g. a tiny category that fell entirely into the other side of the
/// train/test split): absent categories yield a zero-positive split.
fn split_or_empty<'a>(corpus: &'a LabeledCorpus, category: &str) -> CategorySplit<'a> {
    if corpus.categories.contains(category) {
        split_by_category(corpus, category).expect("membership checked")
    } else {
        CategorySplit {
            category: category.to_owned(),
            positive: Vec::new(),
            negative: corpus.inquiries.iter().collect(),
        }
    }
}

fn binary_metrics(vector: &RuleVector, corpus: &LabeledCorpus, beta: f64) -> CategoryMetrics {
    let split = split_or_empty(corpus, &vector.category);
    let index = InvertedIndex::build(split.all());
    let counts = regevo_core::eval::evaluate_vector(vector, &split, &index);
    CategoryMetrics::from_confusion(counts, beta)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::runtime(format!("writing {}: {e}", path.display())))
}

#[derive(Debug)]
pub struct EvolveReport {
    pub categories: Vec<String>,
    pub metrics: MetricsReport,
    pub output_dir: PathBuf,
}

/// `evolve`: per category, build training artifacts, run the engine,
/// write the rule file, manifest and history, then score the result on the
/// held-out split. Also writes an aggregate rule file in priority order
/// and the metrics CSV.
pub fn run_evolve(config: &RunConfig) -> Result<EvolveReport, CliError> {
    let corpus = load_corpus(config)?;
    let (train, test) = split_corpus(config, &corpus);
    let categories = resolve_categories(config, &corpus, &train)?;
    ensure_distinct_files(&categories)?;
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| CliError::usage(format!("output dir: {e}")))?;
    let tokenizer = tokenizer_of(config);
    let corpus_hash = train.content_hash();

    let mut vectors: Vec<RuleVector> = Vec::new();
    let mut per_category = BTreeMap::new();
    for category in &categories {
        if !train.categories.contains(category) {
            return Err(CliError::runtime(format!(
                "category {category:?} has no training inquiries after the split"
            )));
        }
        let split = split_by_category(&train, category).expect("checked");
        let positive_dict = build_feature_dictionary(&split, config.feature_threshold)
            .map_err(|e| CliError::runtime(format!("category {category:?}: {e}")))?;
        if positive_dict.is_empty() {
            return Err(CliError::runtime(format!(
                "category {category:?}: no feature word clears threshold {}",
                config.feature_threshold
            )));
        }
        let negative_dict = build_negative_dictionary(&split);
        let vocabulary: Vec<String> = positive_dict.words().map(str::to_owned).collect();
        let cooccurrence = build_cooccurrence(&split.positive, &vocabulary);
        let index = InvertedIndex::build(split.all());
        let mut gp = config.gp.clone();
        gp.rng_seed = derive_seed(config.seed, &format!("evolve:{category}"));
        let ctx = EvolutionContext {
            split: &split,
            index: &index,
            positive_dict: &positive_dict,
            negative_dict: &negative_dict,
            cooccurrence: &cooccurrence,
            tokenizer: &tokenizer,
        };
        let outcome: EvolveOutcome = evolve(category, &ctx, &gp)
            .map_err(|e| CliError::runtime(format!("category {category:?}: {e}")))?;

        let stem = sanitize(category);
        let vector = RuleVector::new(category.clone(), outcome.best.rules.clone());
        let mut rules_text = Vec::new();
        rule_format::write_rule_file(&mut rules_text, std::slice::from_ref(&vector))
            .map_err(CliError::runtime)?;
        write_file(
            &config.output_dir.join(format!("{stem}.rules")),
            &rules_text,
        )?;

        let mut history = Vec::new();
        write_history_csv(&outcome.history, &mut history).map_err(CliError::runtime)?;
        write_file(
            &config.output_dir.join(format!("{stem}.history.csv")),
            &history,
        )?;

        let manifest = RunManifest {
            category: category.clone(),
            corpus_hash: corpus_hash.clone(),
            config: gp,
            generations: outcome.generations,
            best_fitness: outcome.best.fitness.unwrap_or(0.0),
            stop_reason: outcome.stop.as_str().to_owned(),
        };
        let manifest_json = serde_json::to_string_pretty(&manifest).map_err(CliError::runtime)?;
        write_file(
            &config.output_dir.join(format!("{stem}.manifest.json")),
            format!("{manifest_json}\n").as_bytes(),
        )?;

        per_category.insert(
            category.clone(),
            binary_metrics(&vector, &test, config.gp.f_beta),
        );
        vectors.push(vector);
    }

    let mut aggregate = Vec::new();
    rule_format::write_rule_file(&mut aggregate, &vectors).map_err(CliError::runtime)?;
    write_file(&config.output_dir.join("rules.txt"), &aggregate)?;

    let metrics = MetricsReport::new(per_category, config.gp.f_beta);
    let mut metrics_csv = Vec::new();
    metrics
        .write_csv(&mut metrics_csv)
        .map_err(CliError::runtime)?;
    write_file(&config.output_dir.join("metrics.csv"), &metrics_csv)?;

    Ok(EvolveReport {
        categories,
        metrics,
        output_dir: config.output_dir.clone(),
    })
}

/// Reads rule files in order, rejecting duplicate categories across files.
pub fn load_rule_files(paths: &[PathBuf]) -> Result<Vec<RuleVector>, CliError> {
    let mut vectors: Vec<RuleVector> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for path in paths {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        let from_file = rule_format::read_rule_file(std::io::BufReader::new(file))
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        for vector in from_file {
            if !seen.insert(vector.category.clone()) {
                return Err(CliError::runtime(format!(
                    "{}: category {:?} appears in more than one rule file",
                    path.display(),
                    vector.category
                )));
            }
            vectors.push(vector);
        }
    }
    Ok(vectors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitChoice {
    Train,
    Test,
    All,
}

/// `evaluate`: score rule files against the chosen side of the split.
pub fn run_evaluate(
    config: &RunConfig,
    rules: &[PathBuf],
    split: SplitChoice,
) -> Result<MetricsReport, CliError> {
    let corpus = load_corpus(config)?;
    let vectors = load_rule_files(rules)?;
    for vector in &vectors {
        if !corpus.categories.contains(&vector.category) {
            return Err(CliError::usage(format!(
                "rule category {:?} does not occur in the corpus",
                vector.category
            )));
        }
    }
    let chosen: LabeledCorpus = match split {
        SplitChoice::All => corpus,
        SplitChoice::Train => split_corpus(config, &corpus).0,
        SplitChoice::Test => split_corpus(config, &corpus).1,
    };
    let mut per_category = BTreeMap::new();
    for vector in &vectors {
        per_category.insert(
            vector.category.clone(),
            binary_metrics(vector, &chosen, config.gp.f_beta),
        );
    }
    let metrics = MetricsReport::new(per_category, config.gp.f_beta);
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| CliError::usage(format!("output dir: {e}")))?;
    let mut csv = Vec::new();
    metrics.write_csv(&mut csv).map_err(CliError::runtime)?;
    write_file(&config.output_dir.join("metrics.csv"), &csv)?;
    Ok(metrics)
}

#[derive(Debug, Serialize)]
pub struct ClassifyRecord {
    pub index: usize,
    pub category: Option<String>,
    pub matches: Vec<String>,
}

/// `classify`: label each input text with the first matching category in
/// rule-file order, emitting one JSON object per input.
pub fn run_classify<W: Write>(
    rules: &[PathBuf],
    texts: &[String],
    lowercase: bool,
    mut out: W,
) -> Result<(), CliError> {
    let vectors = load_rule_files(rules)?;
    let tokenizer = ReferenceTokenizer { lowercase };
    for (index, text) in texts.iter().enumerate() {
        let tokens: Vec<String> = tokenizer
            .tokenize(text)
            .into_iter()
            .flatten()
            .map(|t| t.text)
            .collect();
        let outcome = classify_tokens(&tokens, &vectors);
        let record = ClassifyRecord {
            index,
            category: outcome.category,
            matches: outcome.matches,
        };
        let line = serde_json::to_string(&record).map_err(CliError::runtime)?;
        writeln!(out, "{line}").map_err(CliError::runtime)?;
    }
    Ok(())
}

/// Reads classification inputs: one text per line.
pub fn read_inputs(path: &Path) -> Result<Vec<String>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    std::io::BufReader::new(file)
        .lines()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
pub struct ProvenanceCounts {
    pub baseline: usize,
    pub regex_override: usize,
    pub baseline_fallback: usize,
    pub total: usize,
}

#[derive(Debug)]
pub struct HybridReport {
    pub rows: Vec<ComparisonRow>,
    pub provenance: ProvenanceCounts,
}

/// Per-category precision/recall of multi-class assignments.
fn assignment_metrics(gold: &[&str], predicted: &[&str], category: &str) -> (f64, f64) {
    let mut counts = ConfusionCounts::default();
    for (&g, &p) in gold.iter().zip(predicted) {
        match (g == category, p == category) {
            (true, true) => counts.true_pos += 1,
            (true, false) => counts.false_neg += 1,
            (false, true) => counts.false_pos += 1,
            (false, false) => counts.true_neg += 1,
        }
    }
    (counts.precision(), counts.recall())
}

/// `hybrid-eval`: train the baseline on the training split, then compare
/// baseline-alone against baseline+regex on the held-out split, one row
/// pair per category.
pub fn run_hybrid_eval(config: &RunConfig, rules: &[PathBuf]) -> Result<HybridReport, CliError> {
    let corpus = load_corpus(config)?;
    let vectors = load_rule_files(rules)?;
    let (train, test) = split_corpus(config, &corpus);
    if test.is_empty() {
        return Err(CliError::runtime("test split is empty"));
    }
    let model = train_baseline(&train).map_err(CliError::runtime)?;

    let mut gold: Vec<&str> = Vec::with_capacity(test.len());
    let mut baseline_pred: Vec<&str> = Vec::with_capacity(test.len());
    let mut hybrid_pred: Vec<String> = Vec::with_capacity(test.len());
    let mut provenance = ProvenanceCounts {
        baseline: 0,
        regex_override: 0,
        baseline_fallback: 0,
        total: test.len(),
    };
    for q in &test.inquiries {
        gold.push(&q.label);
        let ranked = model.ranked(&q.tokens);
        baseline_pred.push(&model.categories()[ranked[0].0]);
        let decision = hybrid_classify_tokens(&q.tokens, &model, &vectors, &config.hybrid);
        match decision.provenance {
            Provenance::Baseline => provenance.baseline += 1,
            Provenance::RegexOverride => provenance.regex_override += 1,
            Provenance::BaselineFallback => provenance.baseline_fallback += 1,
        }
        hybrid_pred.push(decision.category);
    }
    let hybrid_pred_refs: Vec<&str> = hybrid_pred.iter().map(String::as_str).collect();

    let mut rows = Vec::new();
    for category in &test.categories {
        let (precision, recall) = assignment_metrics(&gold, &baseline_pred, category);
        rows.push(ComparisonRow {
            category: category.clone(),
            solution: "baseline".to_owned(),
            precision,
            recall,
        });
        let (precision, recall) = assignment_metrics(&gold, &hybrid_pred_refs, category);
        rows.push(ComparisonRow {
            category: category.clone(),
            solution: "baseline+regex".to_owned(),
            precision,
            recall,
        });
    }

    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| CliError::usage(format!("output dir: {e}")))?;
    let mut csv = Vec::new();
    write_comparison_csv(&rows, &mut csv).map_err(CliError::runtime)?;
    write_file(&config.output_dir.join("hybrid_eval.csv"), &csv)?;
    let provenance_json = serde_json::to_string_pretty(&provenance).map_err(CliError::runtime)?;
    write_file(
        &config.output_dir.join("hybrid_provenance.json"),
        format!("{provenance_json}\n").as_bytes(),
    )?;

    Ok(HybridReport { rows, provenance })
}
