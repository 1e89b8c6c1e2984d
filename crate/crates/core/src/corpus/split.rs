//! Per-category positive/negative partitions and the train/test split.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ingest::{Inquiry, LabeledCorpus};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("category {0:?} has no sentences")]
    EmptyCategory(String),
}

/// All inquiries of one category (positive) against everything else
/// (negative). Borrows from the corpus it was split from.
#[derive(Debug)]
pub struct CategorySplit<'a> {
    pub category: String,
    pub positive: Vec<&'a Inquiry>,
    pub negative: Vec<&'a Inquiry>,
}

impl<'a> CategorySplit<'a> {
    /// Every inquiry of the split, positives first. Index builders and
    /// evaluators rely on this ordering.
    pub fn all(&self) -> impl Iterator<Item = &'a Inquiry> + '_ {
        self.positive.iter().chain(self.negative.iter()).copied()
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }
}

/// Partitions the corpus into the category's inquiries and their
/// complement, preserving corpus order on both sides.
pub fn split_by_category<'a>(
    corpus: &'a LabeledCorpus,
    category: &str,
) -> Result<CategorySplit<'a>, CorpusError> {
    if !corpus.categories.contains(category) {
        return Err(CorpusError::UnknownCategory(category.to_owned()));
    }
    let (positive, negative) = corpus.inquiries.iter().partition(|q| q.label == category);
    Ok(CategorySplit {
        category: category.to_owned(),
        positive,
        negative,
    })
}

/// Seeded random train/test split, stratified by label: each label group
/// is shuffled independently and `floor(len * ratio)` of it goes to the
/// training side. Corpus order is preserved within each output.
pub fn train_test_split(
    corpus: &LabeledCorpus,
    ratio: f64,
    seed: u64,
) -> (LabeledCorpus, LabeledCorpus) {
    assert!(ratio > 0.0 && ratio < 1.0, "split ratio must be in (0,1)");
    let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, q) in corpus.inquiries.iter().enumerate() {
        by_label.entry(&q.label).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for (_, mut indices) in by_label {
        indices.shuffle(&mut rng);
        let take = (indices.len() as f64 * ratio).floor() as usize;
        train_idx.extend_from_slice(&indices[..take]);
        test_idx.extend_from_slice(&indices[take..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let pick = |indices: &[usize]| {
        LabeledCorpus::new(
            indices
                .iter()
                .map(|&i| corpus.inquiries[i].clone())
                .collect(),
        )
    };
    (pick(&train_idx), pick(&test_idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize::ReferenceTokenizer;

    fn corpus(labels: &[&str]) -> LabeledCorpus {
        let tok = ReferenceTokenizer::default();
        let inquiries = labels
            .iter()
            .enumerate()
            .map(|(i, label)| {
                Inquiry::from_text(format!("q{i}"), format!("text {i}."), *label, &tok).unwrap()
            })
            .collect();
        LabeledCorpus::new(inquiries)
    }

    #[test]
    fn partitions_by_label() {
        let c = corpus(&["a", "b", "a", "b", "b", "a", "a", "b", "b", "b"]);
        let split = split_by_category(&c, "a").unwrap();
        assert_eq!(split.positive.len(), 4);
        assert_eq!(split.negative.len(), 6);
        assert!(split.positive.iter().all(|q| q.label == "a"));
        assert!(split.negative.iter().all(|q| q.label != "a"));
    }

    #[test]
    fn category_covering_everything_has_empty_negative() {
        let c = corpus(&["a", "a"]);
        let split = split_by_category(&c, "a").unwrap();
        assert!(split.negative.is_empty());
    }

    #[test]
    fn unknown_category_is_an_error() {
        let c = corpus(&["a"]);
        assert!(matches!(
            split_by_category(&c, "zzz").unwrap_err(),
            CorpusError::UnknownCategory(_)
        ));
    }

    #[test]
    fn split_is_deterministic_and_stratified() {
        let c = corpus(
            &["a"; 10]
                .iter()
                .chain(&["b"; 20])
                .copied()
                .collect::<Vec<_>>(),
        );
        let (train1, test1) = train_test_split(&c, 0.8, 7);
        let (train2, test2) = train_test_split(&c, 0.8, 7);
        assert_eq!(train1, train2);
        assert_eq!(test1, test2);
        let count =
            |c: &LabeledCorpus, l: &str| c.inquiries.iter().filter(|q| q.label == l).count();
        assert_eq!(count(&train1, "a"), 8);
        assert_eq!(count(&train1, "b"), 16);
        assert_eq!(count(&test1, "a"), 2);
        assert_eq!(count(&test1, "b"), 4);
        // Different seeds give different partitions.
        let (train3, _) = train_test_split(&c, 0.8, 8);
        assert_ne!(train1, train3);
    }
}
