//! Unrestricted expression trees and their refinement into [`Rule`]s.
//!
//! The general dialect has three functions (OR, proximity, NOT) that could
//! nest arbitrarily. Generated rules are restricted to a fixed first-layer
//! shape by five structural constraints:
//!
//! 1. the top level is a NOT connecting a positive and a negative part,
//! 2. the positive part is exactly one proximity pair,
//! 3. every negative element is a word or a proximity pair,
//! 4. proximity operands contain no nested function other than OR,
//! 5. an OR in the positive part contains only words.
//!
//! [`Expr::into_rule`] checks the constraints and the value-level invariants
//! (non-empty groups, no duplicate words, ordered gap bounds) and produces
//! the typed [`Rule`], which enforces the structural constraints by
//! construction from then on.

use super::ast::{FeatureWord, GapRange, Negative, Proximity, Rule, WordGroup};

/// A structural-constraint or invariant breach found during validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Constraint 1: the top level must be a NOT function.
    TopLevelNotNot,
    /// Constraint 2: the positive part must be a single proximity pair.
    PositiveNotProximity,
    /// Constraint 3: a negative element must be a word or a proximity pair.
    NegativeNotWordOrProximity,
    /// Constraint 4: a proximity operand may only be an OR of words.
    NestedProximityOperand,
    /// Constraint 5: an OR in the positive part may not nest functions.
    NestedFunctionInOr,
    /// A word group with no words.
    EmptyWordGroup,
    /// The same word twice inside one group.
    DuplicateWord(String),
    /// A word that is empty or carries reserved characters or whitespace.
    InvalidWord(String),
    /// Gap bounds out of order.
    GapReversed { min: u32, max: u32 },
}

impl Violation {
    /// The structural-constraint number (1-5) this violation corresponds
    /// to, if any. Value-level invariant breaches return `None`.
    pub fn constraint(&self) -> Option<u8> {
        match self {
            Violation::TopLevelNotNot => Some(1),
            Violation::PositiveNotProximity => Some(2),
            Violation::NegativeNotWordOrProximity => Some(3),
            Violation::NestedProximityOperand => Some(4),
            Violation::NestedFunctionInOr => Some(5),
            _ => None,
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(n) = self.constraint() {
            write!(f, "constraint {n}: ")?;
        }
        match self {
            Violation::TopLevelNotNot => write!(f, "top level must be a NOT function"),
            Violation::PositiveNotProximity => {
                write!(f, "positive part must be a single proximity pair")
            }
            Violation::NegativeNotWordOrProximity => {
                write!(f, "negative element must be a word or a proximity pair")
            }
            Violation::NestedProximityOperand => {
                write!(f, "proximity operand must be an OR of words")
            }
            Violation::NestedFunctionInOr => {
                write!(f, "OR in the positive part must contain words only")
            }
            Violation::EmptyWordGroup => write!(f, "word group is empty"),
            Violation::DuplicateWord(w) => write!(f, "duplicate word {w:?} in group"),
            Violation::InvalidWord(w) => write!(f, "invalid feature word {w:?}"),
            Violation::GapReversed { min, max } => {
                write!(f, "gap minimum {min} exceeds maximum {max}")
            }
        }
    }
}

/// An expression tree with no structural restrictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Word(String),
    Or(Vec<Expr>),
    Proximity {
        left: Box<Expr>,
        right: Box<Expr>,
        gap: GapRange,
    },
    Not {
        positive: Box<Expr>,
        negatives: Vec<Expr>,
    },
}

impl Expr {
    /// Validates the five structural constraints plus the value invariants
    /// and refines the tree into a typed [`Rule`].
    pub fn into_rule(self) -> Result<Rule, Vec<Violation>> {
        let mut violations = Vec::new();
        let rule = self.refine(&mut violations);
        match rule {
            Some(rule) if violations.is_empty() => Ok(rule),
            _ => Err(violations),
        }
    }

    fn refine(self, out: &mut Vec<Violation>) -> Option<Rule> {
        let Expr::Not {
            positive,
            negatives,
        } = self
        else {
            out.push(Violation::TopLevelNotNot);
            return None;
        };
        let positive = refine_positive(*positive, out);
        let negatives: Vec<Option<Negative>> = negatives
            .into_iter()
            .map(|n| refine_negative(n, out))
            .collect();
        let positive = positive?;
        let negatives = negatives.into_iter().collect::<Option<Vec<_>>>()?;
        Some(Rule::new(positive, negatives))
    }
}

fn refine_positive(expr: Expr, out: &mut Vec<Violation>) -> Option<Proximity> {
    match expr {
        Expr::Proximity { left, right, gap } => {
            if gap.min > gap.max {
                out.push(Violation::GapReversed {
                    min: gap.min,
                    max: gap.max,
                });
            }
            let left = refine_operand(*left, out);
            let right = refine_operand(*right, out);
            Some(Proximity::new(left?, right?, gap))
        }
        _ => {
            out.push(Violation::PositiveNotProximity);
            None
        }
    }
}

fn refine_operand(expr: Expr, out: &mut Vec<Violation>) -> Option<WordGroup> {
    let before = out.len();
    match expr {
        // A bare word is shorthand for a one-word group.
        Expr::Word(w) => Some(WordGroup::new(vec![refine_word(w, out)?])),
        Expr::Or(items) => {
            if items.is_empty() {
                out.push(Violation::EmptyWordGroup);
                return None;
            }
            let mut words = Vec::with_capacity(items.len());
            for item in items {
                match item {
                    Expr::Word(w) => {
                        if let Some(word) = refine_word(w, out) {
                            if words.contains(&word) {
                                out.push(Violation::DuplicateWord(word.as_str().to_owned()));
                            } else {
                                words.push(word);
                            }
                        }
                    }
                    _ => out.push(Violation::NestedFunctionInOr),
                }
            }
            if out.len() > before {
                None
            } else {
                Some(WordGroup::new(words))
            }
        }
        _ => {
            out.push(Violation::NestedProximityOperand);
            None
        }
    }
}

fn refine_negative(expr: Expr, out: &mut Vec<Violation>) -> Option<Negative> {
    match expr {
        Expr::Word(w) => Some(Negative::Word(refine_word(w, out)?)),
        Expr::Proximity { .. } => Some(Negative::Proximity(refine_positive(expr, out)?)),
        _ => {
            out.push(Violation::NegativeNotWordOrProximity);
            None
        }
    }
}

fn refine_word(word: String, out: &mut Vec<Violation>) -> Option<FeatureWord> {
    match FeatureWord::new(&word) {
        Ok(w) => Some(w),
        Err(_) => {
            out.push(Violation::InvalidWord(word));
            None
        }
    }
}

/// Checks the value-level invariants of an already-typed rule: non-empty
/// groups, no duplicate words within a group, ordered gap bounds. The
/// structural constraints hold by construction for [`Rule`] values.
pub fn validate(rule: &Rule) -> Vec<Violation> {
    let mut out = Vec::new();
    check_proximity(&rule.positive, &mut out);
    for negative in &rule.negatives {
        if let Negative::Proximity(p) = negative {
            check_proximity(p, &mut out);
        }
    }
    out
}

fn check_proximity(p: &Proximity, out: &mut Vec<Violation>) {
    if p.gap.min > p.gap.max {
        out.push(Violation::GapReversed {
            min: p.gap.min,
            max: p.gap.max,
        });
    }
    check_group(&p.left, out);
    check_group(&p.right, out);
}

fn check_group(group: &WordGroup, out: &mut Vec<Violation>) {
    if group.words.is_empty() {
        out.push(Violation::EmptyWordGroup);
    }
    for (i, word) in group.words.iter().enumerate() {
        if group.words[..i].contains(word) {
            out.push(Violation::DuplicateWord(word.as_str().to_owned()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(w: &str) -> Expr {
        Expr::Word(w.to_owned())
    }

    fn or(words: &[&str]) -> Expr {
        Expr::Or(words.iter().map(|w| word(w)).collect())
    }

    fn prox(left: Expr, right: Expr, min: u32, max: u32) -> Expr {
        Expr::Proximity {
            left: Box::new(left),
            right: Box::new(right),
            gap: GapRange::new(min, max),
        }
    }

    #[test]
    fn accepts_the_canonical_seed_shape() {
        // NOT(AD(flu, flu, {0,8}), OR(w_neg))
        let expr = Expr::Not {
            positive: Box::new(prox(or(&["flu"]), or(&["flu"]), 0, 8)),
            negatives: vec![word("w_neg")],
        };
        let rule = expr.into_rule().unwrap();
        assert_eq!(rule.positive.gap, GapRange::new(0, 8));
        assert_eq!(rule.negatives.len(), 1);
        assert!(validate(&rule).is_empty());
    }

    #[test]
    fn nested_proximity_operand_breaks_constraint_4() {
        let inner = prox(or(&["a"]), or(&["b"]), 0, 1);
        let expr = Expr::Not {
            positive: Box::new(prox(inner, or(&["c"]), 0, 2)),
            negatives: vec![],
        };
        let violations = expr.into_rule().unwrap_err();
        assert!(violations.contains(&Violation::NestedProximityOperand));
        assert_eq!(violations[0].constraint(), Some(4));
    }

    #[test]
    fn empty_group_in_positive_left_slot_is_reported() {
        let expr = Expr::Not {
            positive: Box::new(prox(Expr::Or(vec![]), or(&["b"]), 0, 2)),
            negatives: vec![],
        };
        let violations = expr.into_rule().unwrap_err();
        assert!(violations.contains(&Violation::EmptyWordGroup));
    }

    #[test]
    fn non_not_top_level_breaks_constraint_1() {
        let violations = prox(or(&["a"]), or(&["b"]), 0, 1).into_rule().unwrap_err();
        assert_eq!(violations, vec![Violation::TopLevelNotNot]);
        assert_eq!(violations[0].constraint(), Some(1));
    }

    #[test]
    fn or_as_negative_breaks_constraint_3() {
        let expr = Expr::Not {
            positive: Box::new(prox(or(&["a"]), or(&["b"]), 0, 1)),
            negatives: vec![or(&["c", "d"])],
        };
        let violations = expr.into_rule().unwrap_err();
        assert_eq!(violations, vec![Violation::NegativeNotWordOrProximity]);
    }

    #[test]
    fn nested_or_breaks_constraint_5() {
        let expr = Expr::Not {
            positive: Box::new(prox(Expr::Or(vec![or(&["a"])]), or(&["b"]), 0, 1)),
            negatives: vec![],
        };
        let violations = expr.into_rule().unwrap_err();
        assert!(violations.contains(&Violation::NestedFunctionInOr));
        assert_eq!(violations[0].constraint(), Some(5));
    }

    #[test]
    fn validate_flags_value_invariants_on_typed_rules() {
        let mut rule = Rule::new(
            Proximity::new(
                WordGroup::of(&["a"]),
                WordGroup::of(&["b"]),
                GapRange::new(5, 2),
            ),
            vec![],
        );
        rule.positive
            .left
            .words
            .push(rule.positive.left.words[0].clone());
        let violations = validate(&rule);
        assert!(violations.contains(&Violation::GapReversed { min: 5, max: 2 }));
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::DuplicateWord(w) if w == "a")));
    }
}
