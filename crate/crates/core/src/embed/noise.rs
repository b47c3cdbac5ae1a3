use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use super::Vocabulary;
use crate::{Error, Result};

const NOISE_EXPONENT: f64 = 0.75;

/// Unigram noise distribution raised to the 3/4 power, sampled in O(1)
/// with an alias table.
#[derive(Clone, Debug)]
pub struct NoiseDistribution {
    alias: WeightedAliasIndex<f64>,
    probabilities: Vec<f64>,
}

impl NoiseDistribution {
    pub fn new(vocab: &Vocabulary) -> Result<Self> {
        Self::from_counts(vocab.counts())
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let weights: Vec<f64> = counts
            .iter()
            .map(|&n| (n as f64).powf(NOISE_EXPONENT))
            .collect();
        let total: f64 = weights.iter().sum();
        let probabilities = weights.iter().map(|w| w / total).collect();
        let alias = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::InvalidConfig(format!("noise distribution: {e}")))?;
        Ok(NoiseDistribution {
            alias,
            probabilities,
        })
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.probabilities[index]
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.alias.sample(rng)
    }
}
