//! Vocabulary and skip-gram training with negative sampling.

mod config;
mod model;
mod neg;
mod noise;
mod train;
mod vocab;

pub use config::TrainingConfig;
pub use model::{init_model, EmbeddingModel};
pub use neg::{neg_gradient, NegGradient};
pub use noise::NoiseDistribution;
pub use train::train;
pub use vocab::{build_vocab, Vocabulary};
