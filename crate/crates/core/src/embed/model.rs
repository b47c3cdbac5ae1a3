use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::neg::neg_terms;
use super::{TrainingConfig, Vocabulary};
use crate::vectors::VectorSet;
use crate::wiki::parse_concept_token;
use crate::{Error, Result};

/// Skip-gram parameters: input rows are the published embeddings, output
/// rows are the context side used only during training.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    pub(crate) vocab: Vocabulary,
    pub(crate) dim: usize,
    pub(crate) input: Vec<f32>,
    pub(crate) output: Vec<f32>,
}

impl EmbeddingModel {
    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn input_row(&self, index: usize) -> &[f32] {
        &self.input[index * self.dim..(index + 1) * self.dim]
    }

    pub fn output_row(&self, index: usize) -> &[f32] {
        &self.output[index * self.dim..(index + 1) * self.dim]
    }

    pub fn input_vectors(&self) -> &[f32] {
        &self.input
    }

    pub fn output_vectors(&self) -> &[f32] {
        &self.output
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if !self.input.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("input vectors"));
        }
        if !self.output.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("output vectors"));
        }
        Ok(())
    }

    /// One stochastic gradient step on the negative-sampling loss for
    /// (`center`, `context`) with the given noise indices. Returns the loss
    /// before the update.
    pub fn sgd_step(
        &mut self,
        center: usize,
        context: usize,
        negatives: &[usize],
        lr: f32,
    ) -> Result<f32> {
        let len = self.vocab.len();
        for &index in [center, context].iter().chain(negatives) {
            if index >= len {
                return Err(Error::IndexOutOfRange { index, len });
            }
        }
        let dim = self.dim;
        let mut scratch = StepScratch::new(dim, negatives.len() + 1);
        scratch.center.copy_from_slice(self.input_row(center));
        for (t, &row) in std::iter::once(&context).chain(negatives).enumerate() {
            scratch.targets[t * dim..(t + 1) * dim].copy_from_slice(self.output_row(row));
        }
        let loss = scratch.compute();
        for (t, &row) in std::iter::once(&context).chain(negatives).enumerate() {
            let scale = -lr * scratch.coeffs[t];
            for (u, &v) in self.output[row * dim..(row + 1) * dim]
                .iter_mut()
                .zip(&scratch.center)
            {
                *u += scale * v;
            }
        }
        for (v, &g) in self.input[center * dim..(center + 1) * dim]
            .iter_mut()
            .zip(&scratch.grad)
        {
            *v -= lr * g;
        }
        Ok(loss)
    }

    /// The input vectors as a frequency-ranked vector set.
    pub fn to_vector_set(&self) -> VectorSet {
        let mut set = VectorSet::new(self.dim).with_frequency_rank(true);
        for (i, token) in self.vocab.tokens().iter().enumerate() {
            set.push(token.as_str(), self.input_row(i))
                .expect("vocabulary tokens are unique and rows finite");
        }
        set
    }
}

/// Buffers for one update: snapshots of the center and target rows, and
/// the resulting coefficients and center gradient.
pub(crate) struct StepScratch {
    pub(crate) center: Vec<f32>,
    pub(crate) targets: Vec<f32>,
    pub(crate) coeffs: Vec<f32>,
    pub(crate) grad: Vec<f32>,
}

impl StepScratch {
    pub(crate) fn new(dim: usize, rows: usize) -> Self {
        StepScratch {
            center: vec![0.0; dim],
            targets: vec![0.0; dim * rows],
            coeffs: vec![0.0; rows],
            grad: vec![0.0; dim],
        }
    }

    pub(crate) fn compute(&mut self) -> f32 {
        neg_terms(
            &self.center,
            &self.targets,
            &mut self.coeffs,
            &mut self.grad,
        )
    }
}

/// Initializes a model over `vocab`.
///
/// Input rows are uniform in `[-0.5/dim, 0.5/dim]`; output rows are zero.
/// With `pretrained`, every vocabulary token found there (compared after
/// lowercasing the pre-trained token) takes the pre-trained vector
/// instead. Concept tokens never match.
pub fn init_model(
    vocab: &Vocabulary,
    config: &TrainingConfig,
    pretrained: Option<&VectorSet>,
) -> Result<EmbeddingModel> {
    config.validate()?;
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let dim = config.dim;
    if let Some(p) = pretrained {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = 0.5 / dim as f32;
    let mut input: Vec<f32> = (0..vocab.len() * dim)
        .map(|_| rng.random_range(-bound..=bound))
        .collect();

    if let Some(p) = pretrained {
        let folded = p.case_folded_index();
        for (i, token) in vocab.tokens().iter().enumerate() {
            if parse_concept_token(token).is_some() {
                continue;
            }
            let row = p.index_of(token).or_else(|| folded.get(token).copied());
            if let Some(row) = row {
                input[i * dim..(i + 1) * dim].copy_from_slice(p.row(row));
            }
        }
    }

    Ok(EmbeddingModel {
        vocab: vocab.clone(),
        dim,
        input,
        output: vec![0.0; vocab.len() * dim],
    })
}
