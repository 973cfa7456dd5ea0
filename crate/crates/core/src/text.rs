//! Tokens, texts, frequency tables, and the preprocessing pipeline.
//!
//! The tokenizer mirrors a deliberately aggressive cleanup: input is split on
//! whitespace, any chunk containing a non-letter character is dropped
//! entirely (so `"3-D"` and `"world!"` vanish rather than being stripped),
//! chunks shorter than two letters are dropped, and survivors are folded to
//! lowercase. What remains is a plain sequence of words.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Default per-text token cap applied by the tokenizer.
pub const DEFAULT_TOKEN_CAP: usize = 15_000;

/// A single word: lowercase, letters only, at least two characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(String);

impl Token {
    /// Case-folds `word` and accepts it if the folded form is all letters
    /// and at least two characters long.
    pub fn new(word: &str) -> Option<Token> {
        let folded = word.to_lowercase();
        if is_valid_token(&folded, false) {
            Some(Token(folded))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_valid_token(folded: &str, ascii_only: bool) -> bool {
    let letters = if ascii_only {
        folded.chars().all(|c| c.is_ascii_alphabetic())
    } else {
        folded.chars().all(char::is_alphabetic)
    };
    letters && folded.chars().count() >= 2
}

/// Options for [`tokenize`].
#[derive(Debug, Clone, Copy)]
pub struct TokenizeOptions {
    /// Treat only ASCII letters as letters (strict mode). The default
    /// accepts any Unicode alphabetic character.
    pub ascii_only: bool,
    /// Maximum number of tokens a text may hold after filtering.
    pub max_tokens: usize,
}

impl Default for TokenizeOptions {
    fn default() -> Self {
        TokenizeOptions {
            ascii_only: false,
            max_tokens: DEFAULT_TOKEN_CAP,
        }
    }
}

/// A named, ordered sequence of tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    id: String,
    tokens: Vec<Token>,
}

impl Text {
    /// Wraps an already-validated token sequence. The token cap is enforced
    /// at the input boundary ([`tokenize`] and the file readers), not here.
    pub fn new(id: impl Into<String>, tokens: Vec<Token>) -> Text {
        Text {
            id: id.into(),
            tokens,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Number of tokens.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Same token sequence under a different id.
    pub fn with_id(&self, id: impl Into<String>) -> Text {
        Text {
            id: id.into(),
            tokens: self.tokens.clone(),
        }
    }
}

/// Splits `raw` on whitespace, drops chunks that contain non-letters or are
/// shorter than two letters, lowercases the rest, and enforces the token cap.
pub fn tokenize(id: impl Into<String>, raw: &str, options: &TokenizeOptions) -> Result<Text> {
    let id = id.into();
    let tokens: Vec<Token> = raw
        .split_whitespace()
        .filter_map(|chunk| {
            let folded = if options.ascii_only {
                chunk.to_ascii_lowercase()
            } else {
                chunk.to_lowercase()
            };
            if is_valid_token(&folded, options.ascii_only) {
                Some(Token(folded))
            } else {
                None
            }
        })
        .collect();
    if tokens.len() > options.max_tokens {
        return Err(Error::TokenCapExceeded {
            id,
            actual: tokens.len(),
            cap: options.max_tokens,
        });
    }
    Ok(Text { id, tokens })
}

/// Concatenation: `a`'s tokens followed by `b`'s.
pub fn concat(a: &Text, b: &Text) -> Text {
    let mut tokens = Vec::with_capacity(a.len() + b.len());
    tokens.extend_from_slice(&a.tokens);
    tokens.extend_from_slice(&b.tokens);
    Text {
        id: format!("{}+{}", a.id, b.id),
        tokens,
    }
}

/// Absolute frequencies of the tokens of one text. Tokens that do not occur
/// are absent from the table (their count is implicitly zero).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    // Ordered so that iteration (and any float accumulation over it) is
    // reproducible across runs and platforms.
    counts: BTreeMap<Token, usize>,
}

impl FrequencyTable {
    /// Occurrences of `token`, zero if absent.
    pub fn count(&self, token: &Token) -> usize {
        self.counts.get(token).copied().unwrap_or(0)
    }

    /// Whether the token occurs at least once.
    pub fn contains(&self, token: &Token) -> bool {
        self.counts.contains_key(token)
    }

    /// Number of distinct tokens.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Sum of all counts; equals the source text's length.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Token, usize)> {
        self.counts.iter().map(|(t, &c)| (t, c))
    }
}

/// Counts each distinct token of `a`.
pub fn frequency(a: &Text) -> FrequencyTable {
    let mut counts = BTreeMap::new();
    for token in &a.tokens {
        *counts.entry(token.clone()).or_insert(0) += 1;
    }
    FrequencyTable { counts }
}

/// Input encodings accepted by the file readers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    /// Strict UTF-8; invalid bytes are an error.
    Utf8,
    /// UTF-8, falling back to Latin-1 if the bytes are not valid UTF-8.
    Utf8OrLatin1,
}

/// Decodes raw bytes under the given encoding policy.
pub fn decode(bytes: &[u8], encoding: Encoding) -> Result<String> {
    match std::str::from_utf8(bytes) {
        Ok(s) => Ok(s.to_owned()),
        Err(e) => match encoding {
            Encoding::Utf8 => Err(Error::Encoding(format!("invalid UTF-8: {e}"))),
            // Latin-1 maps each byte to the code point of the same value.
            Encoding::Utf8OrLatin1 => Ok(bytes.iter().map(|&b| b as char).collect()),
        },
    }
}

/// Reads and tokenizes one document. The text id is the file name.
pub fn read_text_file(path: &Path, encoding: Encoding, options: &TokenizeOptions) -> Result<Text> {
    let bytes = fs::read(path)?;
    let raw = decode(&bytes, encoding)?;
    let id = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    tokenize(id, &raw, options)
}
