//! Tokenization contract and the reference tokenizer.
//!
//! Tokenization is pluggable: anything implementing [`Tokenize`] (for
//! example an external word segmenter) can feed the pipeline. The shipped
//! [`ReferenceTokenizer`] splits sentences on terminal punctuation and
//! tokens on everything non-alphanumeric.

/// One token with its character span `[start, end)` in the original text.
/// Offsets count characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

/// Splits raw text into sentences of tokens. Implementations must be
/// deterministic and safe to share across threads.
pub trait Tokenize: Sync {
    fn tokenize(&self, text: &str) -> Vec<Vec<Token>>;
}

/// Sentence terminators recognized by the reference tokenizer, half- and
/// full-width.
const SENTENCE_TERMINATORS: [char; 6] = ['.', '!', '?', '。', '！', '？'];

/// Whitespace/punctuation tokenizer: a token is a maximal run of
/// alphanumeric characters. With `lowercase` set (the default), token text
/// is lowercased; spans always reference the original text.
#[derive(Debug, Clone)]
pub struct ReferenceTokenizer {
    pub lowercase: bool,
}

impl Default for ReferenceTokenizer {
    fn default() -> Self {
        ReferenceTokenizer { lowercase: true }
    }
}

impl Tokenize for ReferenceTokenizer {
    fn tokenize(&self, text: &str) -> Vec<Vec<Token>> {
        let mut sentences = Vec::new();
        let mut sentence: Vec<Token> = Vec::new();
        let mut current = String::new();
        let mut token_start = 0usize;

        for (pos, c) in text.chars().enumerate() {
            if c.is_alphanumeric() {
                if current.is_empty() {
                    token_start = pos;
                }
                current.push(c);
            } else {
                self.flush(&mut sentence, &mut current, token_start, pos);
                if SENTENCE_TERMINATORS.contains(&c) && !sentence.is_empty() {
                    sentences.push(std::mem::take(&mut sentence));
                }
            }
        }
        let total = text.chars().count();
        self.flush(&mut sentence, &mut current, token_start, total);
        if !sentence.is_empty() {
            sentences.push(sentence);
        }
        sentences
    }
}

impl ReferenceTokenizer {
    fn flush(&self, sentence: &mut Vec<Token>, current: &mut String, start: usize, end: usize) {
        if current.is_empty() {
            return;
        }
        let text = if self.lowercase {
            current.to_lowercase()
        } else {
            current.clone()
        };
        sentence.push(Token { text, start, end });
        current.clear();
    }
}
