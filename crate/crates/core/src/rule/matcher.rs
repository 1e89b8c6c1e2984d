//! Matching rules against token sequences.
//!
//! Matching is unanchored and token based: the gap between two matched
//! tokens is the number of tokens strictly between them, so adjacent tokens
//! have gap 0. Tokens are compared by exact string equality; any
//! normalization (such as lowercasing) is the tokenizer's business.

use super::ast::{Negative, Proximity, Rule, RuleVector};

impl Proximity {
    /// True iff some `left` token occurs strictly before some `right` token
    /// with an in-range gap.
    ///
    /// Single left-to-right pass: positions of `left` hits are collected as
    /// they stream by, and for every `right` hit at position `j` a
    /// two-pointer window over those positions answers whether any lies in
    /// `[j-1-gap.max, j-1-gap.min]`. Both window edges move monotonically
    /// with `j`, so the whole scan is linear.
    pub fn matches<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        let mut left_positions: Vec<usize> = Vec::new();
        // Indices into left_positions delimiting the current window.
        let mut lo = 0usize;
        let mut hi = 0usize;
        for (j, token) in tokens.iter().enumerate() {
            let token = token.as_ref();
            if self.right.contains(token) {
                let upper = j as i64 - 1 - self.gap.min as i64;
                let lower = j as i64 - 1 - self.gap.max as i64;
                if upper >= 0 {
                    while lo < left_positions.len() && (left_positions[lo] as i64) < lower {
                        lo += 1;
                    }
                    while hi < left_positions.len() && left_positions[hi] as i64 <= upper {
                        hi += 1;
                    }
                    if lo < hi {
                        return true;
                    }
                }
            }
            if self.left.contains(token) {
                left_positions.push(j);
            }
        }
        false
    }
}

impl Negative {
    pub fn matches<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        match self {
            Negative::Word(word) => tokens.iter().any(|t| t.as_ref() == word.as_str()),
            Negative::Proximity(p) => p.matches(tokens),
        }
    }
}

impl Rule {
    /// NOT semantics: the positive pair matches and no negative does.
    pub fn matches<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        self.positive.matches(tokens) && !self.negatives.iter().any(|n| n.matches(tokens))
    }
}

impl RuleVector {
    /// Disjunction over the rules, short-circuiting on the first match.
    pub fn matches<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        self.rules.iter().any(|r| r.matches(tokens))
    }
}
