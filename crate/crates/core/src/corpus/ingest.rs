//! Corpus records and JSON-lines ingestion.

use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tokenize::{Token, Tokenize};

/// One labeled text record, tokenized. Guaranteed to hold at least one
/// token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inquiry {
    pub id: String,
    pub text: String,
    pub label: String,
    /// All tokens in reading order, sentences concatenated.
    pub tokens: Vec<Token>,
    /// Exclusive end offset into `tokens` of each sentence.
    pub sentence_ends: Vec<usize>,
}

impl Inquiry {
    /// Tokenizes `text`; `None` when it yields no tokens at all.
    pub fn from_text(
        id: impl Into<String>,
        text: impl Into<String>,
        label: impl Into<String>,
        tokenizer: &dyn Tokenize,
    ) -> Option<Inquiry> {
        let text = text.into();
        let sentences = tokenizer.tokenize(&text);
        if sentences.is_empty() {
            return None;
        }
        let mut tokens = Vec::new();
        let mut sentence_ends = Vec::with_capacity(sentences.len());
        for sentence in sentences {
            tokens.extend(sentence);
            sentence_ends.push(tokens.len());
        }
        Some(Inquiry {
            id: id.into(),
            text,
            label: label.into(),
            tokens,
            sentence_ends,
        })
    }

    pub fn sentence_count(&self) -> usize {
        self.sentence_ends.len()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &[Token]> {
        self.sentence_ends.iter().scan(0usize, |start, &end| {
            let s = &self.tokens[*start..end];
            *start = end;
            Some(s)
        })
    }
}

/// The full labeled corpus, immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    pub inquiries: Vec<Inquiry>,
    pub categories: BTreeSet<String>,
}

impl LabeledCorpus {
    pub fn new(inquiries: Vec<Inquiry>) -> Self {
        let categories = inquiries.iter().map(|q| q.label.clone()).collect();
        LabeledCorpus {
            inquiries,
            categories,
        }
    }

    pub fn len(&self) -> usize {
        self.inquiries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inquiries.is_empty()
    }

    /// FNV-1a hash over ids, labels and raw texts, for run manifests.
    pub fn content_hash(&self) -> String {
        let mut hash = 0xcbf29ce484222325u64;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x100000001b3);
            }
        };
        for q in &self.inquiries {
            eat(q.id.as_bytes());
            eat(&[0u8]);
            eat(q.label.as_bytes());
            eat(&[0u8]);
            eat(q.text.as_bytes());
            eat(b"\n");
        }
        format!("{hash:016x}")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    id: String,
    text: String,
    label: String,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed record: {source}")]
    MalformedLine {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: empty label")]
    EmptyLabel { line: usize },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: record {id:?} has no tokens")]
    EmptyText { line: usize, id: String },
    #[error("empty corpus")]
    EmptyCorpus,
}

/// Reads a JSON-lines corpus: one `{"id", "text", "label"}` object per
/// line. Blank lines are skipped.
pub fn read_corpus<R: BufRead>(
    reader: R,
    tokenizer: &dyn Tokenize,
) -> Result<LabeledCorpus, IngestError> {
    let mut inquiries = Vec::new();
    let mut seen_ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord =
            serde_json::from_str(&line).map_err(|source| IngestError::MalformedLine {
                line: line_no,
                source,
            })?;
        if record.label.trim().is_empty() {
            return Err(IngestError::EmptyLabel { line: line_no });
        }
        if !seen_ids.insert(record.id.clone()) {
            return Err(IngestError::DuplicateId {
                line: line_no,
                id: record.id,
            });
        }
        let inquiry = Inquiry::from_text(&record.id, record.text, record.label, tokenizer).ok_or(
            IngestError::EmptyText {
                line: line_no,
                id: record.id,
            },
        )?;
        inquiries.push(inquiry);
    }
    if inquiries.is_empty() {
        return Err(IngestError::EmptyCorpus);
    }
    Ok(LabeledCorpus::new(inquiries))
}

/// Reads a corpus from a JSONL file on disk.
pub fn ingest(path: &Path, tokenizer: &dyn Tokenize) -> Result<LabeledCorpus, IngestError> {
    let file = std::fs::File::open(path)?;
    read_corpus(std::io::BufReader::new(file), tokenizer)
}

/// Writes a corpus back out as JSON lines, the inverse of [`ingest`].
pub fn write_corpus<W: Write>(mut writer: W, corpus: &LabeledCorpus) -> std::io::Result<()> {
    for q in &corpus.inquiries {
        let record = RawRecord {
            id: q.id.clone(),
            text: q.text.clone(),
            label: q.label.clone(),
        };
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
