//! Word dictionaries and average-word-frequency feature selection.
//!
//! The average word frequency of a word in a category is its total
//! occurrence count across the category's inquiries divided by the
//! category's total sentence count. Words above a threshold become feature
//! words.

use std::collections::HashMap;

use super::ingest::Inquiry;
use super::split::{CategorySplit, CorpusError};

#[derive(Debug, Clone, PartialEq)]
pub struct DictEntry {
    pub word: String,
    /// Total occurrences of the word within the dictionary's source set.
    pub frequency: u64,
    /// Occurrences divided by the source set's sentence count.
    pub average_frequency: f64,
}

/// Words ranked by frequency (descending, ties broken lexicographically).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WordDictionary {
    pub entries: Vec<DictEntry>,
}

impl WordDictionary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The most frequent word, if any.
    pub fn top_word(&self) -> Option<&str> {
        self.entries.first().map(|e| e.word.as_str())
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.word.as_str())
    }

    pub fn get(&self, word: &str) -> Option<&DictEntry> {
        self.entries.iter().find(|e| e.word == word)
    }
}

fn count_occurrences(inquiries: &[&Inquiry]) -> (HashMap<String, u64>, u64) {
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut sentence_total = 0u64;
    for q in inquiries {
        sentence_total += q.sentence_count() as u64;
        for token in &q.tokens {
            *counts.entry(token.text.clone()).or_insert(0) += 1;
        }
    }
    (counts, sentence_total)
}

fn ranked(counts: HashMap<String, u64>, sentence_total: u64) -> WordDictionary {
    let mut entries: Vec<DictEntry> = counts
        .into_iter()
        .map(|(word, frequency)| DictEntry {
            word,
            frequency,
            average_frequency: frequency as f64 / sentence_total as f64,
        })
        .collect();
    entries.sort_by(|a, b| b.frequency.cmp(&a.frequency).then(a.word.cmp(&b.word)));
    WordDictionary { entries }
}

/// Average frequency of one word over the split's positive set.
pub fn average_word_frequency(split: &CategorySplit, word: &str) -> Result<f64, CorpusError> {
    let sentence_total: u64 = split
        .positive
        .iter()
        .map(|q| q.sentence_count() as u64)
        .sum();
    if sentence_total == 0 {
        return Err(CorpusError::EmptyCategory(split.category.clone()));
    }
    let occurrences: u64 = split
        .positive
        .iter()
        .flat_map(|q| q.tokens.iter())
        .filter(|t| t.text == word)
        .count() as u64;
    Ok(occurrences as f64 / sentence_total as f64)
}

/// Feature words of the category: every word of the positive set whose
/// average frequency is strictly above `threshold`.
pub fn build_feature_dictionary(
    split: &CategorySplit,
    threshold: f64,
) -> Result<WordDictionary, CorpusError> {
    let (counts, sentence_total) = count_occurrences(&split.positive);
    if sentence_total == 0 {
        return Err(CorpusError::EmptyCategory(split.category.clone()));
    }
    let mut dict = ranked(counts, sentence_total);
    dict.entries.retain(|e| e.average_frequency > threshold);
    Ok(dict)
}

/// Frequency-ranked dictionary over the split's negative set. Its top word
/// seeds the negative part of initial rules.
pub fn build_negative_dictionary(split: &CategorySplit) -> WordDictionary {
    let (counts, sentence_total) = count_occurrences(&split.negative);
    if sentence_total == 0 {
        return WordDictionary::default();
    }
    ranked(counts, sentence_total)
}
