//! AST of the restricted rule dialect.
//!
//! A rule always has the shape `NOT(positive, negatives)`: it fires when the
//! positive proximity pair matches and none of the negative expressions do.
//! The positive part is exactly one [`Proximity`] whose operands are flat
//! word groups; negatives are single words or proximity pairs. Deeper nesting
//! is rejected by [`crate::rule::raw::Expr::into_rule`].

use std::fmt;

/// Characters that may not appear in a feature word. They are reserved by
/// the exchange format.
pub const RESERVED_CHARS: [char; 7] = ['(', ')', '|', '#', '{', '}', ','];

/// A single dictionary word usable inside a rule.
///
/// Guaranteed non-empty, free of whitespace and of [`RESERVED_CHARS`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureWord(String);

impl FeatureWord {
    pub fn new(text: impl Into<String>) -> Result<Self, InvalidWord> {
        let text = text.into();
        if text.is_empty() {
            return Err(InvalidWord::Empty);
        }
        if let Some(c) = text
            .chars()
            .find(|c| c.is_whitespace() || RESERVED_CHARS.contains(c))
        {
            return Err(InvalidWord::ReservedChar { word: text, c });
        }
        Ok(FeatureWord(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FeatureWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for FeatureWord {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidWord {
    #[error("feature word is empty")]
    Empty,
    #[error("feature word {word:?} contains reserved character {c:?}")]
    ReservedChar { word: String, c: char },
}

/// A disjunction of feature words: one operand of a proximity pair,
/// serialized as `(w1|w2|...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordGroup {
    pub words: Vec<FeatureWord>,
}

impl WordGroup {
    pub fn new(words: Vec<FeatureWord>) -> Self {
        WordGroup { words }
    }

    /// Convenience constructor from plain strings; panics on invalid words,
    /// intended for literals in tests and seeds built from tokenizer output.
    pub fn of<S: AsRef<str>>(words: &[S]) -> Self {
        WordGroup {
            words: words
                .iter()
                .map(|w| FeatureWord::new(w.as_ref()).expect("valid feature word"))
                .collect(),
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.iter().any(|w| w.as_str() == token)
    }
}

/// Inclusive bounds on the number of tokens allowed between the two
/// operands of a proximity pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapRange {
    pub min: u32,
    pub max: u32,
}

impl GapRange {
    pub fn new(min: u32, max: u32) -> Self {
        GapRange { min, max }
    }

    pub fn contains(&self, gap: u32) -> bool {
        self.min <= gap && gap <= self.max
    }
}

/// An ordered proximity constraint: some word of `left` must occur before
/// some word of `right`, with the token gap between them inside `gap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proximity {
    pub left: WordGroup,
    pub right: WordGroup,
    pub gap: GapRange,
}

impl Proximity {
    pub fn new(left: WordGroup, right: WordGroup, gap: GapRange) -> Self {
        Proximity { left, right, gap }
    }
}

/// One element of a rule's negative part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Negative {
    Word(FeatureWord),
    Proximity(Proximity),
}

/// A complete classifier rule: `NOT(positive, negatives)`.
///
/// The rule matches a token sequence iff the positive proximity pair matches
/// and no negative expression matches. An empty negative list is legal and
/// leaves the rule purely positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub positive: Proximity,
    pub negatives: Vec<Negative>,
}

impl Rule {
    pub fn new(positive: Proximity, negatives: Vec<Negative>) -> Self {
        Rule {
            positive,
            negatives,
        }
    }
}

/// An ordered list of rules classifying one category. The vector matches a
/// text iff any rule matches, so the match decision is order-independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleVector {
    pub category: String,
    pub rules: Vec<Rule>,
}

impl RuleVector {
    pub fn new(category: impl Into<String>, rules: Vec<Rule>) -> Self {
        RuleVector {
            category: category.into(),
            rules,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_word_rejects_empty_and_reserved() {
        assert_eq!(FeatureWord::new(""), Err(InvalidWord::Empty));
        for c in RESERVED_CHARS {
            let word = format!("ab{c}");
            assert!(matches!(
                FeatureWord::new(&word),
                Err(InvalidWord::ReservedChar { .. })
            ));
        }
        assert!(FeatureWord::new("two words").is_err());
        assert!(FeatureWord::new("fever").is_ok());
        // '.' is not reserved: the gap syntax only occurs between groups.
        assert!(FeatureWord::new("a.b").is_ok());
    }

    #[test]
    fn gap_range_bounds_are_inclusive() {
        let gap = GapRange::new(2, 4);
        assert!(!gap.contains(1));
        assert!(gap.contains(2));
        assert!(gap.contains(4));
        assert!(!gap.contains(5));
    }
}
