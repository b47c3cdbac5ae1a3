//! Vector sets: storage, text format and cosine queries.

mod query;
mod text;

use std::collections::HashMap;

pub(crate) use query::analogy_index;
pub use query::{analogy_query, cosine, nearest, Neighbor};
pub use text::{load_text, read_text, save_text, write_text};

use crate::{Error, Result};

/// Tokens with dense vectors of one dimensionality.
///
/// Rows keep insertion order. When the set is ranked, row order is the
/// frequency rank (row 0 is the most frequent token).
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSet {
    dim: usize,
    tokens: Vec<String>,
    data: Vec<f32>,
    norms: Vec<f64>,
    index: HashMap<String, usize>,
    ranked: bool,
}

impl VectorSet {
    pub fn new(dim: usize) -> Self {
        VectorSet {
            dim,
            tokens: Vec::new(),
            data: Vec::new(),
            norms: Vec::new(),
            index: HashMap::new(),
            ranked: false,
        }
    }

    /// Marks row order as the frequency rank.
    pub fn with_frequency_rank(mut self, ranked: bool) -> Self {
        self.ranked = ranked;
        self
    }

    pub fn push(&mut self, token: impl Into<String>, vector: &[f32]) -> Result<()> {
        let token = token.into();
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "vector for {token:?} has non-finite entries"
            )));
        }
        if token.is_empty() || token.contains(char::is_whitespace) {
            return Err(Error::InvalidConfig(format!(
                "token {token:?} is empty or contains whitespace"
            )));
        }
        if self.index.contains_key(&token) {
            return Err(Error::DuplicateToken {
                line: self.tokens.len() + 1,
                token,
            });
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(vector);
        self.norms.push(
            vector
                .iter()
                .map(|&x| f64::from(x) * f64::from(x))
                .sum::<f64>()
                .sqrt(),
        );
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn row(&self, index: usize) -> &[f32] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.index_of(token).map(|i| self.row(i))
    }

    pub(crate) fn norm(&self, index: usize) -> f64 {
        self.norms[index]
    }

    pub fn is_ranked(&self) -> bool {
        self.ranked
    }

    /// Frequency rank of a token (0 = most frequent), if the set is ranked.
    pub fn frequency_rank(&self, token: &str) -> Option<usize> {
        if self.ranked {
            self.index_of(token)
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.tokens
            .iter()
            .zip(self.data.chunks_exact(self.dim.max(1)))
            .map(|(t, v)| (t.as_str(), v))
    }

    /// Lowercased token → index of its highest-ranked (earliest) spelling.
    pub(crate) fn case_folded_index(&self) -> HashMap<String, usize> {
        let mut folded = HashMap::with_capacity(self.len());
        for (i, token) in self.tokens.iter().enumerate() {
            folded.entry(token.to_lowercase()).or_insert(i);
        }
        folded
    }
}
