//! The human-editable exchange format for rules.
//!
//! One rule per line, UTF-8:
//!
//! ```text
//! rule      := positive "##" negatives?
//! positive  := group gap group
//! group     := "(" word ("|" word)* ")"
//! gap       := ".{" int "," int "}"
//! negatives := "(" negitem ("|" negitem)* ")"
//! negitem   := word | positive
//! ```
//!
//! Example: `(fever|cough).{0,10}(pneumonia)##(cold)`. An empty negative
//! part serializes to a bare trailing `##`. The separator `#.#` is accepted
//! as an alias of `##` on input only.
//!
//! Rule files hold one serialized rule per line. Lines starting with `#`
//! are comments and a header line `category: <id>` opens each category
//! block.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::ast::{Negative, Proximity, Rule, RuleVector};
use super::raw::{self, Violation};

/// Serializes a rule to its exchange form. Deterministic: equal rules
/// produce equal strings.
pub fn serialize_rule(rule: &Rule) -> String {
    let mut out = String::new();
    write_proximity(&mut out, &rule.positive);
    out.push_str("##");
    if !rule.negatives.is_empty() {
        out.push('(');
        for (i, negative) in rule.negatives.iter().enumerate() {
            if i > 0 {
                out.push('|');
            }
            match negative {
                Negative::Word(w) => out.push_str(w.as_str()),
                Negative::Proximity(p) => write_proximity(&mut out, p),
            }
        }
        out.push(')');
    }
    out
}

fn write_proximity(out: &mut String, p: &Proximity) {
    write_group(out, &p.left);
    let _ = write!(out, ".{{{},{}}}", p.gap.min, p.gap.max);
    write_group(out, &p.right);
}

fn write_group(out: &mut String, group: &super::ast::WordGroup) {
    out.push('(');
    for (i, word) in group.words.iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        out.push_str(word.as_str());
    }
    out.push(')');
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    /// Lexical or grammatical error. `position` is a character offset into
    /// the input line.
    #[error("syntax error at {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: &'static str,
        found: String,
    },
    /// The line parsed but the resulting tree breaks a constraint or an
    /// invariant.
    #[error("invalid rule: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Parses one rule line. Inverse of [`serialize_rule`] on valid rules.
pub fn parse_rule(input: &str) -> Result<Rule, ParseError> {
    let mut parser = Parser::new(input);
    let raw = parser.rule()?;
    raw.into_rule().map_err(ParseError::Invalid)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(input: &str) -> Self {
        Parser {
            chars: input.chars().collect(),
            pos: 0,
        }
    }

    fn rule(&mut self) -> Result<raw::Expr, ParseError> {
        let positive = self.positive()?;
        self.separator()?;
        let negatives = if self.pos < self.chars.len() {
            self.negatives()?
        } else {
            Vec::new()
        };
        if self.pos < self.chars.len() {
            return Err(self.err("end of line"));
        }
        Ok(raw::Expr::Not {
            positive: Box::new(positive),
            negatives,
        })
    }

    fn positive(&mut self) -> Result<raw::Expr, ParseError> {
        let left = self.group()?;
        let gap = self.gap()?;
        let right = self.group()?;
        Ok(raw::Expr::Proximity {
            left: Box::new(left),
            right: Box::new(right),
            gap,
        })
    }

    fn group(&mut self) -> Result<raw::Expr, ParseError> {
        self.expect('(', "'('")?;
        let mut words = vec![raw::Expr::Word(self.word()?)];
        while self.peek() == Some('|') {
            self.pos += 1;
            words.push(raw::Expr::Word(self.word()?));
        }
        self.expect(')', "'|' or ')'")?;
        Ok(raw::Expr::Or(words))
    }

    fn gap(&mut self) -> Result<super::ast::GapRange, ParseError> {
        self.expect('.', "'.{'")?;
        self.expect('{', "'{'")?;
        let min = self.integer()?;
        self.expect(',', "','")?;
        let max = self.integer()?;
        self.expect('}', "'}'")?;
        Ok(super::ast::GapRange::new(min, max))
    }

    fn separator(&mut self) -> Result<(), ParseError> {
        self.expect('#', "'##'")?;
        // Alias accepted on input: '#.#'
        if self.peek() == Some('.') {
            self.pos += 1;
        }
        self.expect('#', "'#'")?;
        Ok(())
    }

    fn negatives(&mut self) -> Result<Vec<raw::Expr>, ParseError> {
        self.expect('(', "'(' or end of line")?;
        let mut items = vec![self.negitem()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            items.push(self.negitem()?);
        }
        self.expect(')', "'|' or ')'")?;
        Ok(items)
    }

    fn negitem(&mut self) -> Result<raw::Expr, ParseError> {
        if self.peek() == Some('(') {
            self.positive()
        } else {
            Ok(raw::Expr::Word(self.word()?))
        }
    }

    fn word(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || super::ast::RESERVED_CHARS.contains(&c) {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("word"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn integer(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| ParseError::Syntax {
            position: start,
            expected: "integer within u32 range",
            found: digits,
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(expected))
        }
    }

    fn err(&self, expected: &'static str) -> ParseError {
        ParseError::Syntax {
            position: self.pos,
            expected,
            found: match self.peek() {
                Some(c) => format!("{c:?}"),
                None => "end of line".to_owned(),
            },
        }
    }
}

/// Error while reading or writing a rule file, with line context.
#[derive(Debug, thiserror::Error)]
pub enum RuleFileError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Rule {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: rule outside of a category block")]
    MissingCategoryHeader { line: usize },
    #[error("line {line}: category header with empty id")]
    EmptyCategoryId { line: usize },
    #[error("line {line}: duplicate category {category:?}")]
    DuplicateCategory { line: usize, category: String },
    #[error("category {category:?} has no rules")]
    EmptyCategory { category: String },
}

/// Reads category blocks of rules from an exchange-format file.
pub fn read_rule_file<R: BufRead>(reader: R) -> Result<Vec<RuleVector>, RuleFileError> {
    let mut vectors: Vec<RuleVector> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(id) = line.strip_prefix("category:") {
            let id = id.trim();
            if id.is_empty() {
                return Err(RuleFileError::EmptyCategoryId { line: line_no });
            }
            if vectors.iter().any(|v| v.category == id) {
                return Err(RuleFileError::DuplicateCategory {
                    line: line_no,
                    category: id.to_owned(),
                });
            }
            if let Some(last) = vectors.last() {
                if last.rules.is_empty() {
                    return Err(RuleFileError::EmptyCategory {
                        category: last.category.clone(),
                    });
                }
            }
            vectors.push(RuleVector::new(id, Vec::new()));
            continue;
        }
        let rule = parse_rule(line).map_err(|source| RuleFileError::Rule {
            line: line_no,
            source,
        })?;
        match vectors.last_mut() {
            Some(v) => v.rules.push(rule),
            None => return Err(RuleFileError::MissingCategoryHeader { line: line_no }),
        }
    }
    if let Some(last) = vectors.last() {
        if last.rules.is_empty() {
            return Err(RuleFileError::EmptyCategory {
                category: last.category.clone(),
            });
        }
    }
    Ok(vectors)
}

/// Writes category blocks in exchange format, one rule per line.
pub fn write_rule_file<W: Write>(mut writer: W, vectors: &[RuleVector]) -> std::io::Result<()> {
    for vector in vectors {
        writeln!(writer, "category: {}", vector.category)?;
        for rule in &vector.rules {
            writeln!(writer, "{}", serialize_rule(rule))?;
        }
    }
    Ok(())
}
