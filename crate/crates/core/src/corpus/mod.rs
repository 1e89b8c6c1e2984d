//! Corpus ingestion, tokenization, per-category statistics and the
//! inverted index backing fitness evaluation.

mod cooccur;
mod dictionary;
mod index;
mod ingest;
mod split;
mod tokenize;

pub use cooccur::{build_cooccurrence, CooccurrenceMatrix};
pub use dictionary::{
    average_word_frequency, build_feature_dictionary, build_negative_dictionary, DictEntry,
    WordDictionary,
};
pub use index::InvertedIndex;
pub use ingest::{ingest, read_corpus, write_corpus, IngestError, Inquiry, LabeledCorpus};
pub use split::{split_by_category, train_test_split, CategorySplit, CorpusError};
pub use tokenize::{ReferenceTokenizer, Token, Tokenize};
