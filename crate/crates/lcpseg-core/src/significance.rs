//! Corpus-frequency word significance.
//!
//! A word's significance is its information content normalized against the
//! rarest word in the frequency table:
//!
//! ```text
//! s(w) = log(total / count(w)) / log(total / min_count)
//! ```
//!
//! which puts every known word in `(0, 1]`: the rarest word scores exactly 1
//! and the most frequent word scores lowest. Words missing from the table
//! are treated like the rarest word and score the default of 1.0, on the
//! assumption that unseen words are rare rather than meaningless.

use std::collections::HashMap;
use std::io::{self, BufRead};

use thiserror::Error;

use crate::textnorm;

/// Significance assigned to words absent from the frequency table.
pub const DEFAULT_SIGNIFICANCE: f64 = 1.0;

#[derive(Debug, Error)]
pub enum SignificanceError {
    #[error("frequency table is empty")]
    EmptyTable,
    #[error("word `{0}` has a zero count")]
    ZeroCount(String),
    /// A malformed line in a frequency file; `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Frequency-derived significance scores over a fixed corpus vocabulary.
#[derive(Debug, Clone)]
pub struct SignificanceTable {
    counts: HashMap<String, u64>,
    total: u64,
    min_count: u64,
    // ln(total / min_count); zero only for a single-entry table, where the
    // formula degenerates and every known word is the rarest.
    log_norm: f64,
}

impl SignificanceTable {
    /// Builds a table from word counts. Counts must be positive; the table
    /// must be non-empty.
    pub fn build<I>(counts: I) -> Result<Self, SignificanceError>
    where
        I: IntoIterator<Item = (String, u64)>,
    {
        let mut by_word: HashMap<String, u64> = HashMap::new();
        for (word, count) in counts {
            if count == 0 {
                return Err(SignificanceError::ZeroCount(word));
            }
            *by_word.entry(word).or_insert(0) += count;
        }
        if by_word.is_empty() {
            return Err(SignificanceError::EmptyTable);
        }
        let total: u64 = by_word.values().sum();
        let min_count: u64 = *by_word.values().min().expect("table is non-empty");
        let log_norm = (total as f64 / min_count as f64).ln();
        Ok(Self {
            counts: by_word,
            total,
            min_count,
            log_norm,
        })
    }

    /// Significance of `word`, in `(0, 1]`. Unknown words score
    /// [`DEFAULT_SIGNIFICANCE`].
    pub fn significance(&self, word: &str) -> f64 {
        match self.counts.get(word) {
            Some(&count) => {
                if self.log_norm == 0.0 {
                    // Single-entry table: the one word is the rarest word.
                    return 1.0;
                }
                (self.total as f64 / count as f64).ln() / self.log_norm
            }
            None => DEFAULT_SIGNIFICANCE,
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Number of distinct words in the table.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Parses the frequency file format: one `word<SPACE>count` pair per line.
/// Words are normalized like running text; counts for repeated words are
/// summed. Errors carry the 1-based line number.
pub fn parse_frequencies<R: BufRead>(
    reader: R,
) -> Result<HashMap<String, u64>, SignificanceError> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let number = number + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let parse_err = |message: String| SignificanceError::Parse { line: number, message };
        let raw_word = fields.next().expect("non-blank line has a first field");
        let raw_count = fields
            .next()
            .ok_or_else(|| parse_err("expected `word count`".to_string()))?;
        if fields.next().is_some() {
            return Err(parse_err("trailing fields after count".to_string()));
        }
        let word = textnorm::normalize(raw_word)
            .ok_or_else(|| parse_err(format!("word `{raw_word}` is empty after normalization")))?;
        let count: u64 = raw_count
            .parse()
            .map_err(|_| parse_err(format!("count `{raw_count}` is not a positive integer")))?;
        let slot = counts.entry(word).or_insert(0);
        *slot = slot
            .checked_add(count)
            .ok_or_else(|| parse_err("count overflow".to_string()))?;
    }
    Ok(counts)
}
