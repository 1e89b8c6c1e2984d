//! Evolves interpretable text classifiers in a restricted proximity-rule
//! dialect.
//!
//! A classifier for a category is an ordered vector of rules of the shape
//! `NOT(AD(left-words, right-words, {min,max}), negatives)`: a text matches
//! when some left word occurs before some right word within the token gap
//! and no negative expression fires. Rules serialize to a line-oriented
//! exchange format people can read and edit, e.g.
//! `(fever|cough).{0,10}(pneumonia)##(cold)`.
//!
//! The crate ships the full pipeline: corpus ingestion and statistics
//! ([`corpus`]), the dialect itself ([`rule`]), the genetic search that
//! breeds rule vectors per category ([`engine`]), the evaluation harness
//! ([`eval`]) and a hybrid mode that backs a probabilistic baseline with
//! rule arbitration ([`hybrid`]).
//!
//! ```
//! use regevo_core::rule::parse_rule;
//!
//! let rule = parse_rule("(fever|cough).{0,10}(pneumonia)##(cold)").unwrap();
//! let tokens = ["fever", "then", "pneumonia"];
//! assert!(rule.matches(&tokens));
//! assert!(!rule.matches(&["fever", "cold", "pneumonia"]));
//! ```

pub mod corpus;
pub mod engine;
pub mod eval;
pub mod hybrid;
pub mod rule;
pub mod synth;

pub use corpus::{LabeledCorpus, ReferenceTokenizer, Tokenize};
pub use engine::{evolve, EvolutionContext, GpConfig, Individual};
pub use rule::{Rule, RuleVector};
