//! Inverted index for candidate pre-filtering during evaluation.
//!
//! A rule can only match inquiries containing at least one word of each
//! positive operand, so the candidate set for a rule is
//! `union(left words) ∩ union(right words)`. Negatives never widen the set.

use std::collections::HashMap;

use super::ingest::Inquiry;
use crate::rule::Proximity;

/// Maps words to the sorted positions (into the indexed sequence) of the
/// inquiries containing them.
#[derive(Debug, Clone, Default)]
pub struct InvertedIndex {
    postings: HashMap<String, Vec<u32>>,
    doc_count: usize,
}

impl InvertedIndex {
    /// Indexes a sequence of inquiries by their position in it.
    pub fn build<'a>(inquiries: impl IntoIterator<Item = &'a Inquiry>) -> Self {
        let mut postings: HashMap<String, Vec<u32>> = HashMap::new();
        let mut doc_count = 0usize;
        for (doc, inquiry) in inquiries.into_iter().enumerate() {
            doc_count += 1;
            for token in &inquiry.tokens {
                let list = postings.entry(token.text.clone()).or_default();
                if list.last() != Some(&(doc as u32)) {
                    list.push(doc as u32);
                }
            }
        }
        InvertedIndex {
            postings,
            doc_count,
        }
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    /// Sorted positions of inquiries containing `word`.
    pub fn postings(&self, word: &str) -> &[u32] {
        self.postings.get(word).map_or(&[], |v| v.as_slice())
    }

    /// Sorted positions of inquiries that could match the proximity pair:
    /// those containing some left word and some right word.
    pub fn candidates(&self, positive: &Proximity) -> Vec<u32> {
        let left = self.union(&positive.left.words);
        if left.is_empty() {
            return Vec::new();
        }
        let right = self.union(&positive.right.words);
        intersect(&left, &right)
    }

    fn union(&self, words: &[crate::rule::FeatureWord]) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        for word in words {
            out.extend_from_slice(self.postings(word.as_str()));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize::ReferenceTokenizer;
    use crate::rule::{GapRange, WordGroup};

    fn inquiries(texts: &[&str]) -> Vec<Inquiry> {
        let tok = ReferenceTokenizer::default();
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Inquiry::from_text(format!("q{i}"), *t, "c", &tok).unwrap())
            .collect()
    }

    #[test]
    fn postings_hold_sorted_unique_doc_positions() {
        let qs = inquiries(&["a b", "b c", "b b"]);
        let index = InvertedIndex::build(&qs);
        assert_eq!(index.postings("a"), &[0]);
        assert_eq!(index.postings("b"), &[0, 1, 2]);
        assert_eq!(index.postings("c"), &[1]);
        assert_eq!(index.postings("zzz"), &[] as &[u32]);
        assert_eq!(index.doc_count(), 3);
    }

    #[test]
    fn disjoint_operands_yield_no_candidates() {
        let qs = inquiries(&["a b", "b c"]);
        let index = InvertedIndex::build(&qs);
        let p = Proximity::new(
            WordGroup::of(&["a"]),
            WordGroup::of(&["c"]),
            GapRange::new(0, 5),
        );
        assert!(index.candidates(&p).is_empty());
    }

    #[test]
    fn candidates_are_the_intersection_of_unions() {
        let qs = inquiries(&["a c", "a x", "b c", "x y"]);
        let index = InvertedIndex::build(&qs);
        let p = Proximity::new(
            WordGroup::of(&["a", "b"]),
            WordGroup::of(&["c"]),
            GapRange::new(0, 5),
        );
        assert_eq!(index.candidates(&p), vec![0, 2]);
    }
}
