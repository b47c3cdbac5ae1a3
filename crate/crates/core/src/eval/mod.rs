//! Analogy and word-pair similarity evaluation.

mod analogy;
mod sense;
mod similarity;
mod spearman;

pub use analogy::{
    eval_analogy, eval_analogy_commons, load_analogy_questions, read_analogy_questions,
    AnalogyQuestion, AnalogyReport,
};
pub use sense::{build_sense_index, SenseIndex};
pub use similarity::{
    common_subset_eval, eval_similarity, eval_similarity_with, load_similarity_pairs,
    read_similarity_pairs, CommonSubsetRow, CommonSubsetTable, PairScorer, SimilarityDataset,
    SimilarityPair, SimilarityReport, VectorScorer,
};
pub use spearman::{average_ranks, spearman};
