//! Hybrid classification: a probabilistic bag-of-words baseline backed by
//! rule vectors whenever the baseline is not confident enough.
//!
//! The baseline is order-blind, so categories that differ mainly in word
//! order are exactly where the rule dialect earns its keep: when the top
//! posterior falls below the confidence gate, the top-k predicted
//! categories are re-examined in posterior order and the first whose rule
//! vector matches wins.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{LabeledCorpus, Tokenize};
use crate::rule::RuleVector;

#[derive(Debug, thiserror::Error)]
pub enum HybridError {
    #[error("baseline training needs at least 2 categories, got {0}")]
    TooFewCategories(usize),
}

/// Additive smoothing constant of the baseline likelihoods.
const SMOOTHING: f64 = 1.0;

/// Multinomial bag-of-words classifier with additive smoothing. Immutable
/// once trained.
#[derive(Debug, Clone)]
pub struct BaselineModel {
    /// Categories ordered by descending training size, ties broken
    /// lexicographically. Posterior vectors align with this order and the
    /// order breaks posterior ties, so predictions are deterministic.
    categories: Vec<String>,
    log_priors: Vec<f64>,
    vocab: HashMap<String, usize>,
    /// Row-major `categories x vocab` log-likelihoods.
    log_likelihoods: Vec<f64>,
}

impl BaselineModel {
    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    /// Normalized posterior over the categories for a token sequence.
    /// Out-of-vocabulary tokens are ignored.
    pub fn posterior<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<f64> {
        let vocab_len = self.vocab.len();
        let mut scores = self.log_priors.clone();
        for token in tokens {
            if let Some(&v) = self.vocab.get(token.as_ref()) {
                for (c, score) in scores.iter_mut().enumerate() {
                    *score += self.log_likelihoods[c * vocab_len + v];
                }
            }
        }
        // log-sum-exp normalization
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for score in &mut scores {
            *score = (*score - max).exp();
            total += *score;
        }
        for score in &mut scores {
            *score /= total;
        }
        scores
    }

    /// Categories with their posteriors, sorted descending. Ties keep the
    /// category order of the model.
    pub fn ranked<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<(usize, f64)> {
        let posterior = self.posterior(tokens);
        let mut ranked: Vec<(usize, f64)> = posterior.into_iter().enumerate().collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        ranked
    }
}

/// Trains the baseline on a labeled corpus.
pub fn train_baseline(corpus: &LabeledCorpus) -> Result<BaselineModel, HybridError> {
    if corpus.categories.len() < 2 {
        return Err(HybridError::TooFewCategories(corpus.categories.len()));
    }
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for q in &corpus.inquiries {
        *sizes.entry(&q.label).or_insert(0) += 1;
    }
    let mut categories: Vec<String> = corpus.categories.iter().cloned().collect();
    categories.sort_by(|a, b| sizes[b.as_str()].cmp(&sizes[a.as_str()]).then(a.cmp(b)));
    let category_index: HashMap<&str, usize> = categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut vocab: HashMap<String, usize> = HashMap::new();
    for q in &corpus.inquiries {
        for token in &q.tokens {
            let next = vocab.len();
            vocab.entry(token.text.clone()).or_insert(next);
        }
    }

    let c_count = categories.len();
    let v_count = vocab.len();
    let mut word_counts = vec![0u64; c_count * v_count];
    let mut token_totals = vec![0u64; c_count];
    for q in &corpus.inquiries {
        let c = category_index[q.label.as_str()];
        token_totals[c] += q.tokens.len() as u64;
        for token in &q.tokens {
            word_counts[c * v_count + vocab[&token.text]] += 1;
        }
    }

    let total = corpus.len() as f64;
    let log_priors = categories
        .iter()
        .map(|c| (sizes[c.as_str()] as f64 / total).ln())
        .collect();
    let mut log_likelihoods = vec![0.0f64; c_count * v_count];
    for c in 0..c_count {
        let denom = token_totals[c] as f64 + SMOOTHING * v_count as f64;
        for v in 0..v_count {
            log_likelihoods[c * v_count + v] =
                ((word_counts[c * v_count + v] as f64 + SMOOTHING) / denom).ln();
        }
    }
    Ok(BaselineModel {
        categories,
        log_priors,
        vocab,
        log_likelihoods,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HybridConfig {
    /// Baseline answers directly when its top posterior reaches this gate.
    pub confidence_gate: f64,
    /// How many top predictions the rule vectors arbitrate among.
    pub top_k: usize,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            confidence_gate: 0.6,
            top_k: 5,
        }
    }
}

/// Which path produced a hybrid prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// The baseline was confident enough.
    Baseline,
    /// A rule vector of a top-k category matched.
    RegexOverride,
    /// Nothing matched; the baseline's top answer stands.
    BaselineFallback,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Baseline => "baseline",
            Provenance::RegexOverride => "regex-override",
            Provenance::BaselineFallback => "baseline-fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridDecision {
    pub category: String,
    pub provenance: Provenance,
    pub top_posterior: f64,
}

/// Classifies one token sequence with the hybrid protocol: answer with the
/// baseline when its confidence reaches the gate, otherwise let the rule
/// vectors of the top-k predicted categories arbitrate in posterior order,
/// falling back to the baseline's top answer when none matches.
pub fn hybrid_classify_tokens<S: AsRef<str>>(
    tokens: &[S],
    model: &BaselineModel,
    vectors: &[RuleVector],
    cfg: &HybridConfig,
) -> HybridDecision {
    let ranked = model.ranked(tokens);
    let (top_idx, top_posterior) = ranked[0];
    let top_category = model.categories()[top_idx].clone();
    if top_posterior >= cfg.confidence_gate {
        return HybridDecision {
            category: top_category,
            provenance: Provenance::Baseline,
            top_posterior,
        };
    }
    let by_category: HashMap<&str, &RuleVector> =
        vectors.iter().map(|v| (v.category.as_str(), v)).collect();
    for &(idx, _) in ranked.iter().take(cfg.top_k) {
        let category = model.categories()[idx].as_str();
        if let Some(vector) = by_category.get(category) {
            if vector.matches(tokens) {
                return HybridDecision {
                    category: category.to_owned(),
                    provenance: Provenance::RegexOverride,
                    top_posterior,
                };
            }
        }
    }
    HybridDecision {
        category: top_category,
        provenance: Provenance::BaselineFallback,
        top_posterior,
    }
}

/// Tokenizes and classifies one raw text.
pub fn hybrid_classify(
    text: &str,
    model: &BaselineModel,
    vectors: &[RuleVector],
    cfg: &HybridConfig,
    tokenizer: &dyn Tokenize,
) -> HybridDecision {
    let tokens: Vec<String> = tokenizer
        .tokenize(text)
        .into_iter()
        .flatten()
        .map(|t| t.text)
        .collect();
    hybrid_classify_tokens(&tokens, model, vectors, cfg)
}

/// One comparison row of the hybrid evaluation: a category under one
/// solution (`baseline` or `baseline+regex`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub category: String,
    pub solution: String,
    pub precision: f64,
    pub recall: f64,
}

/// Writes comparison rows as `category,solution,precision,recall`.
pub fn write_comparison_csv<W: Write>(rows: &[ComparisonRow], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["category", "solution", "precision", "recall"])?;
    for row in rows {
        w.write_record([
            row.category.as_str(),
            row.solution.as_str(),
            &row.precision.to_string(),
            &row.recall.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Inquiry, ReferenceTokenizer};
    use crate::rule::{GapRange, Proximity, Rule, WordGroup};

    fn corpus(records: &[(&str, &str)]) -> LabeledCorpus {
        let tok = ReferenceTokenizer::default();
        LabeledCorpus::new(
            records
                .iter()
                .enumerate()
                .map(|(i, (text, label))| {
                    Inquiry::from_text(format!("q{i}"), *text, *label, &tok).unwrap()
                })
                .collect(),
        )
    }

    fn disjoint_corpus() -> LabeledCorpus {
        corpus(&[
            ("sleep night dream.", "insomnia"),
            ("night dream sleep poorly.", "insomnia"),
            ("dream sleep night.", "insomnia"),
            ("fever cough lungs.", "pneumonia"),
            ("cough fever breathing.", "pneumonia"),
            ("lungs cough fever.", "pneumonia"),
        ])
    }

    #[test]
    fn disjoint_vocabularies_classify_confidently() {
        let c = disjoint_corpus();
        let model = train_baseline(&c).unwrap();
        for q in &c.inquiries {
            let ranked = model.ranked(&q.tokens);
            let predicted = &model.categories()[ranked[0].0];
            assert_eq!(predicted, &q.label);
            assert!(ranked[0].1 > 0.5, "posterior {} too low", ranked[0].1);
        }
    }

    #[test]
    fn posterior_is_a_probability_vector() {
        let c = disjoint_corpus();
        let model = train_baseline(&c).unwrap();
        for tokens in [
            vec!["sleep", "fever"],
            vec!["unseen", "words", "only"],
            vec![],
        ] {
            let posterior = model.posterior(&tokens);
            let sum: f64 = posterior.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(posterior.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn equal_sized_categories_have_uniform_priors() {
        let c = disjoint_corpus();
        let model = train_baseline(&c).unwrap();
        // No informative tokens: the posterior reduces to the priors.
        let empty: Vec<&str> = Vec::new();
        let posterior = model.posterior(&empty);
        assert!((posterior[0] - 0.5).abs() < 1e-12);
        assert!((posterior[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_category_training_is_rejected() {
        let c = corpus(&[("a.", "only"), ("b.", "only")]);
        assert!(matches!(
            train_baseline(&c).unwrap_err(),
            HybridError::TooFewCategories(1)
        ));
    }

    fn order_rule(left: &str, right: &str) -> Rule {
        Rule::new(
            Proximity::new(
                WordGroup::of(&[left]),
                WordGroup::of(&[right]),
                GapRange::new(0, 8),
            ),
            vec![],
        )
    }

    #[test]
    fn gate_and_fallback_paths() {
        let c = disjoint_corpus();
        let model = train_baseline(&c).unwrap();
        let vectors = vec![
            RuleVector::new("insomnia", vec![order_rule("sleep", "night")]),
            RuleVector::new("pneumonia", vec![order_rule("fever", "cough")]),
        ];
        let cfg = HybridConfig::default();

        // Confident baseline: rules never consulted.
        let d = hybrid_classify_tokens(&["sleep", "night", "dream"], &model, &vectors, &cfg);
        assert_eq!(d.provenance, Provenance::Baseline);
        assert_eq!(d.category, "insomnia");

        // Unseen words leave the posterior at the priors (0.5 < 0.6): the
        // matching rule of a top-k category takes over.
        let d = hybrid_classify_tokens(
            &["sleep", "xxx", "night"],
            &model,
            &vectors,
            &HybridConfig {
                confidence_gate: 0.99,
                top_k: 5,
            },
        );
        assert_eq!(d.provenance, Provenance::RegexOverride);
        assert_eq!(d.category, "insomnia");

        // Nothing matches: fall back to the baseline's top answer.
        let d = hybrid_classify_tokens(
            &["night", "sleep"], // reversed order, no rule fires
            &model,
            &vectors,
            &HybridConfig {
                confidence_gate: 0.999999,
                top_k: 5,
            },
        );
        assert_eq!(d.provenance, Provenance::BaselineFallback);
    }

    #[test]
    fn zero_gate_reduces_to_the_pure_baseline() {
        let c = disjoint_corpus();
        let model = train_baseline(&c).unwrap();
        let vectors = vec![RuleVector::new(
            "insomnia",
            vec![order_rule("fever", "cough")],
        )];
        let cfg = HybridConfig {
            confidence_gate: 0.0,
            top_k: 5,
        };
        for q in &c.inquiries {
            let d = hybrid_classify_tokens(&q.tokens, &model, &vectors, &cfg);
            assert_eq!(d.provenance, Provenance::Baseline);
            let ranked = model.ranked(&q.tokens);
            assert_eq!(d.category, model.categories()[ranked[0].0]);
        }
    }

    #[test]
    fn comparison_csv_shape() {
        let rows = vec![
            ComparisonRow {
                category: "a".into(),
                solution: "baseline".into(),
                precision: 0.5,
                recall: 0.25,
            },
            ComparisonRow {
                category: "a".into(),
                solution: "baseline+regex".into(),
                precision: 0.75,
                recall: 0.5,
            },
        ];
        let mut buf = Vec::new();
        write_comparison_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "category,solution,precision,recall\na,baseline,0.5,0.25\na,baseline+regex,0.75,0.5\n"
        );
    }
}
