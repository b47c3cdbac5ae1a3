use std::collections::HashMap;
use std::io::BufRead;

use crate::Result;

/// Token frequency table with dense, frequency-descending indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Keeps tokens seen at least `min_count` times. Index 0 is the most
    /// frequent token; equal counts are ordered lexicographically.
    pub fn from_counts(counts: HashMap<String, u64>, min_count: u64) -> Self {
        let mut entries: Vec<(String, u64)> = counts
            .into_iter()
            .filter(|&(_, n)| n >= min_count)
            .collect();
        entries.sort_by(|(a, na), (b, nb)| nb.cmp(na).then_with(|| a.cmp(b)));
        let mut vocab = Vocabulary::default();
        for (i, (token, n)) in entries.into_iter().enumerate() {
            vocab.index.insert(token.clone(), i as u32);
            vocab.tokens.push(token);
            vocab.counts.push(n);
            vocab.total_tokens += n;
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Occurrences of in-vocabulary tokens in the corpus.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }
}

/// Counts the space-separated tokens of a corpus, words and concept tokens
/// alike.
pub fn build_vocab<R: BufRead>(corpus: R, min_count: u64) -> Result<Vocabulary> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for line in corpus.lines() {
        let line = line?;
        for token in line.split_ascii_whitespace() {
            match counts.get_mut(token) {
                Some(n) => *n += 1,
                None => {
                    counts.insert(token.to_string(), 1);
                }
            }
        }
    }
    Ok(Vocabulary::from_counts(counts, min_count))
}
