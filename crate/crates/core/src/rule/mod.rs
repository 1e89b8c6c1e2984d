//! The restricted rule dialect: AST, validation, matching and the
//! human-editable exchange format.

mod ast;
pub mod format;
mod matcher;
pub mod raw;

pub use ast::{
    FeatureWord, GapRange, InvalidWord, Negative, Proximity, Rule, RuleVector, WordGroup,
    RESERVED_CHARS,
};
pub use format::{parse_rule, serialize_rule, ParseError, RuleFileError};
pub use raw::{validate, Violation};
