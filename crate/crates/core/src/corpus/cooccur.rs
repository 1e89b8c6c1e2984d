//! Ordered co-occurrence counts over a fixed vocabulary.
//!
//! `count(i, j)` is the number of inquiries in which both words occur and
//! the first occurrence of `i` comes before the first occurrence of `j`.
//! Each inquiry contributes at most one to a cell. The diagonal counts
//! inquiries where the word occurs at least twice. Positions are taken over
//! the whole inquiry, sentences concatenated.

use std::collections::HashMap;

use super::ingest::Inquiry;

#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceMatrix {
    vocabulary: Vec<String>,
    index: HashMap<String, u32>,
    counts: Vec<u32>,
}

impl CooccurrenceMatrix {
    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn len(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocabulary.is_empty()
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.vocabulary.len() + j]
    }

    /// Count for a pair of words; 0 when either is outside the vocabulary.
    pub fn count_words(&self, first: &str, second: &str) -> u32 {
        match (self.index.get(first), self.index.get(second)) {
            (Some(&i), Some(&j)) => self.count(i as usize, j as usize),
            _ => 0,
        }
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.index.get(word).map(|&i| i as usize)
    }
}

/// Builds the matrix over `vocabulary` from the given inquiries.
pub fn build_cooccurrence(inquiries: &[&Inquiry], vocabulary: &[String]) -> CooccurrenceMatrix {
    let n = vocabulary.len();
    let index: HashMap<String, u32> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32))
        .collect();
    let mut counts = vec![0u32; n * n];
    // Scratch: first occurrence position per vocab word, reset per inquiry.
    let mut first_pos: Vec<(u32, usize)> = Vec::new();
    let mut seen: HashMap<u32, usize> = HashMap::new();
    for inquiry in inquiries {
        first_pos.clear();
        seen.clear();
        for (pos, token) in inquiry.tokens.iter().enumerate() {
            if let Some(&w) = index.get(&token.text) {
                match seen.get(&w) {
                    None => {
                        seen.insert(w, pos);
                        first_pos.push((w, pos));
                    }
                    Some(&first) if first != usize::MAX => {
                        // Second occurrence: bump the diagonal once.
                        counts[w as usize * n + w as usize] += 1;
                        seen.insert(w, usize::MAX);
                    }
                    _ => {}
                }
            }
        }
        first_pos.sort_unstable_by_key(|&(_, pos)| pos);
        for (a, &(wi, _)) in first_pos.iter().enumerate() {
            for &(wj, _) in &first_pos[a + 1..] {
                counts[wi as usize * n + wj as usize] += 1;
            }
        }
    }
    CooccurrenceMatrix {
        vocabulary: vocabulary.to_vec(),
        index,
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ingest::Inquiry;
    use crate::corpus::tokenize::ReferenceTokenizer;

    fn inquiries(texts: &[&str]) -> Vec<Inquiry> {
        let tok = ReferenceTokenizer::default();
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Inquiry::from_text(format!("q{i}"), *t, "c", &tok).unwrap())
            .collect()
    }

    fn vocab(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn counts_first_occurrence_order_per_inquiry() {
        let qs = inquiries(&["a b c", "a c b"]);
        let refs: Vec<&Inquiry> = qs.iter().collect();
        let m = build_cooccurrence(&refs, &vocab(&["a", "b", "c"]));
        assert_eq!(m.count_words("a", "b"), 2);
        assert_eq!(m.count_words("b", "a"), 0);
        assert_eq!(m.count_words("a", "c"), 2);
        assert_eq!(m.count_words("c", "b"), 1);
        assert_eq!(m.count_words("b", "c"), 1);
    }

    #[test]
    fn absent_pairs_and_unknown_words_count_zero() {
        let qs = inquiries(&["a x", "b y"]);
        let refs: Vec<&Inquiry> = qs.iter().collect();
        let m = build_cooccurrence(&refs, &vocab(&["a", "b"]));
        assert_eq!(m.count_words("a", "b"), 0);
        assert_eq!(m.count_words("a", "nope"), 0);
    }

    #[test]
    fn diagonal_counts_repeated_occurrences() {
        let qs = inquiries(&["a a", "a", "b a b a"]);
        let refs: Vec<&Inquiry> = qs.iter().collect();
        let m = build_cooccurrence(&refs, &vocab(&["a", "b"]));
        assert_eq!(m.count_words("a", "a"), 2); // first and third inquiry
        assert_eq!(m.count_words("b", "b"), 1);
        assert_eq!(m.count_words("b", "a"), 1); // first occurrences: b@0 < a@1
    }

    #[test]
    fn repeated_words_use_first_occurrence_for_pairs() {
        // b first occurs after a even though another b comes later.
        let qs = inquiries(&["a b a"]);
        let refs: Vec<&Inquiry> = qs.iter().collect();
        let m = build_cooccurrence(&refs, &vocab(&["a", "b"]));
        assert_eq!(m.count_words("a", "b"), 1);
        assert_eq!(m.count_words("b", "a"), 0);
    }
}
