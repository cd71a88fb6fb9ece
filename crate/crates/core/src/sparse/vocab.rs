use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::SparseRow;
use crate::error::{Result, StmError};

/// Splits raw text into tokens: optional lowercasing, split on every
/// non-alphanumeric character, optional adjacent-pair bigrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tokenizer {
    pub lowercase: bool,
    pub bigrams: bool,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self { lowercase: true, bigrams: false }
    }
}

impl Tokenizer {
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let words: Vec<String> = text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(|w| if self.lowercase { w.to_lowercase() } else { w.to_owned() })
            .collect();
        if !self.bigrams || words.len() < 2 {
            return words;
        }
        // A space can never occur inside a unigram, so bigrams cannot collide with them.
        let pairs: Vec<String> = words.windows(2).map(|w| format!("{} {}", w[0], w[1])).collect();
        let mut out = words;
        out.extend(pairs);
        out
    }
}

/// Bijection between tokens and dense feature indices `0..o`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Keeps the `max_size` tokens with the highest document frequency among
    /// those seen in at least `min_df` documents. Ties go to the token that
    /// appeared first in the corpus. Indices follow the same order.
    pub fn build<S: AsRef<str>>(corpus: &[Vec<S>], max_size: usize, min_df: usize) -> Result<Self> {
        if max_size == 0 {
            return Err(StmError::Config("vocabulary max_size must be at least 1".into()));
        }
        // token -> (document frequency, first occurrence)
        let mut stats: HashMap<&str, (usize, usize)> = HashMap::new();
        let mut seen_in_doc: HashMap<&str, usize> = HashMap::new();
        let mut order = 0usize;
        for (doc_id, doc) in corpus.iter().enumerate() {
            for tok in doc {
                let tok = tok.as_ref();
                if seen_in_doc.get(tok) == Some(&doc_id) {
                    continue;
                }
                seen_in_doc.insert(tok, doc_id);
                let entry = stats.entry(tok).or_insert_with(|| {
                    order += 1;
                    (0, order)
                });
                entry.0 += 1;
            }
        }
        if stats.is_empty() {
            return Err(StmError::NoTokens);
        }

        let mut ranked: Vec<(&str, usize, usize)> = stats
            .into_iter()
            .filter(|&(_, (df, _))| df >= min_df)
            .map(|(tok, (df, first))| (tok, df, first))
            .collect();
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
        ranked.truncate(max_size);

        Ok(Self::from_tokens(ranked.into_iter().map(|(t, _, _)| t.to_owned()).collect()))
    }

    /// Assigns index `i` to `tokens[i]`. Later duplicates are ignored.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        let mut vocab = Self::default();
        for tok in tokens {
            if !vocab.index.contains_key(&tok) {
                vocab.index.insert(tok.clone(), vocab.tokens.len() as u32);
                vocab.tokens.push(tok);
            }
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: u32) -> Option<&str> {
        self.tokens.get(index as usize).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Binary bag-of-words: in-vocabulary tokens, deduplicated and sorted.
    pub fn vectorize<S: AsRef<str>>(&self, tokens: &[S]) -> SparseRow {
        SparseRow::from_unsorted(tokens.iter().filter_map(|t| self.get(t.as_ref())))
    }
}
