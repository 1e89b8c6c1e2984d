//! Confusion counts, precision/recall/F-beta, rule-vector evaluation and
//! multi-category classification.

use std::collections::BTreeMap;
use std::io::Write;

use crate::corpus::{CategorySplit, InvertedIndex, Tokenize};
use crate::rule::{Rule, RuleVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// `tp / (tp + fp)`, defined as 0 when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        let denom = self.true_pos + self.false_pos;
        if denom == 0 {
            0.0
        } else {
            self.true_pos as f64 / denom as f64
        }
    }

    /// `tp / (tp + fn)`, defined as 0 when there are no positives.
    pub fn recall(&self) -> f64 {
        let denom = self.true_pos + self.false_neg;
        if denom == 0 {
            0.0
        } else {
            self.true_pos as f64 / denom as f64
        }
    }
}

/// F-beta: `(β² + 1)·P·R / (β²·P + R)`, with `F(0,0) = 0`. Beta above 1
/// favors recall, below 1 favors precision.
pub fn f_score(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (b2 + 1.0) * precision * recall / denom
    }
}

/// Marks which inquiries of the split any of the rules match, using index
/// candidates so the matcher only runs where both positive operands occur.
fn matched_flags(rules: &[Rule], split: &CategorySplit, index: &InvertedIndex) -> Vec<bool> {
    let docs: Vec<&crate::corpus::Inquiry> = split.all().collect();
    debug_assert_eq!(docs.len(), index.doc_count());
    let mut matched = vec![false; docs.len()];
    for rule in rules {
        for &doc in &index.candidates(&rule.positive) {
            let doc = doc as usize;
            if !matched[doc] && rule.matches(&docs[doc].tokens) {
                matched[doc] = true;
            }
        }
    }
    matched
}

fn counts_from_flags(matched: &[bool], positives: usize) -> ConfusionCounts {
    let true_pos = matched[..positives].iter().filter(|&&m| m).count();
    let false_pos = matched[positives..].iter().filter(|&&m| m).count();
    ConfusionCounts {
        true_pos,
        false_pos,
        false_neg: positives - true_pos,
        true_neg: matched.len() - positives - false_pos,
    }
}

/// Evaluates a rule set against a category split. `index` must have been
/// built over `split.all()`.
pub fn evaluate_rules(
    rules: &[Rule],
    split: &CategorySplit,
    index: &InvertedIndex,
) -> ConfusionCounts {
    let matched = matched_flags(rules, split, index);
    counts_from_flags(&matched, split.positive.len())
}

/// [`evaluate_rules`] over a category vector.
pub fn evaluate_vector(
    vector: &RuleVector,
    split: &CategorySplit,
    index: &InvertedIndex,
) -> ConfusionCounts {
    evaluate_rules(&vector.rules, split, index)
}

/// Same as [`evaluate_rules`] but scanning every inquiry, no candidate
/// filtering. The two must agree on any corpus.
pub fn evaluate_rules_unindexed(rules: &[Rule], split: &CategorySplit) -> ConfusionCounts {
    let matched: Vec<bool> = split
        .all()
        .map(|q| rules.iter().any(|r| r.matches(&q.tokens)))
        .collect();
    counts_from_flags(&matched, split.positive.len())
}

/// F-beta of a rule set on a split: the GP fitness function.
pub fn fitness(rules: &[Rule], split: &CategorySplit, index: &InvertedIndex, beta: f64) -> f64 {
    let counts = evaluate_rules(rules, split, index);
    f_score(counts.precision(), counts.recall(), beta)
}

/// Outcome of classifying one text against a list of category vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// First matching category in priority order, if any.
    pub category: Option<String>,
    /// Every matching category, in priority order.
    pub matches: Vec<String>,
}

/// Tries each vector in the given priority order; the first match wins.
/// The full match list is returned for diagnostics.
pub fn classify_tokens<S: AsRef<str>>(tokens: &[S], vectors: &[RuleVector]) -> Classification {
    let matches: Vec<String> = vectors
        .iter()
        .filter(|v| v.matches(tokens))
        .map(|v| v.category.clone())
        .collect();
    Classification {
        category: matches.first().cloned(),
        matches,
    }
}

/// Tokenizes `text` and classifies the flattened token sequence.
pub fn classify(text: &str, vectors: &[RuleVector], tokenizer: &dyn Tokenize) -> Classification {
    let tokens: Vec<String> = tokenizer
        .tokenize(text)
        .into_iter()
        .flatten()
        .map(|t| t.text)
        .collect();
    classify_tokens(&tokens, vectors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryMetrics {
    pub confusion: ConfusionCounts,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
}

impl CategoryMetrics {
    pub fn from_confusion(confusion: ConfusionCounts, beta: f64) -> Self {
        let precision = confusion.precision();
        let recall = confusion.recall();
        CategoryMetrics {
            confusion,
            precision,
            recall,
            f_beta: f_score(precision, recall, beta),
        }
    }
}

/// Per-category metrics plus unweighted macro averages.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub per_category: BTreeMap<String, CategoryMetrics>,
    pub beta: f64,
}

impl MetricsReport {
    pub fn new(per_category: BTreeMap<String, CategoryMetrics>, beta: f64) -> Self {
        MetricsReport { per_category, beta }
    }

    pub fn macro_precision(&self) -> f64 {
        mean(self.per_category.values().map(|m| m.precision))
    }

    pub fn macro_recall(&self) -> f64 {
        mean(self.per_category.values().map(|m| m.recall))
    }

    pub fn macro_f(&self) -> f64 {
        mean(self.per_category.values().map(|m| m.f_beta))
    }

    /// CSV with one row per category and a macro-average footer row whose
    /// count columns are left empty.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "category",
            "tp",
            "fp",
            "fn",
            "tn",
            "precision",
            "recall",
            "f_beta",
        ])?;
        for (category, m) in &self.per_category {
            w.write_record([
                category.as_str(),
                &m.confusion.true_pos.to_string(),
                &m.confusion.false_pos.to_string(),
                &m.confusion.false_neg.to_string(),
                &m.confusion.true_neg.to_string(),
                &m.precision.to_string(),
                &m.recall.to_string(),
                &m.f_beta.to_string(),
            ])?;
        }
        w.write_record([
            "macro_avg",
            "",
            "",
            "",
            "",
            &self.macro_precision().to_string(),
            &self.macro_recall().to_string(),
            &self.macro_f().to_string(),
        ])?;
        w.flush()?;
        Ok(())
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}
