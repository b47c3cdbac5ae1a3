//! Concept-annotated Wikipedia corpora and joint word/concept embeddings.
//!
//! The crate is organised as a pipeline:
//!
//! * [`wiki`] streams a MediaWiki XML export, prunes non-article pages,
//!   resolves redirects and renders one corpus line per kept page, with
//!   links to kept pages replaced by `wiki_<page id>` concept tokens.
//! * [`embed`] builds a vocabulary over that corpus and trains skip-gram
//!   vectors with negative sampling, optionally starting from pre-trained
//!   word vectors.
//! * [`vectors`] stores vector sets in the common text format and answers
//!   nearest-neighbour and analogy queries.
//! * [`eval`] scores vector sets on analogy questions and word-pair
//!   similarity datasets.
//! * [`links`] is a link-overlap relatedness measure over the page graph,
//!   usable as an alternative scorer for the similarity datasets.

pub mod embed;
mod error;
pub mod eval;
pub mod links;
pub mod vectors;
pub mod wiki;

pub use error::{Error, Result};

pub use embed::{
    build_vocab, init_model, train, EmbeddingModel, NoiseDistribution, TrainingConfig, Vocabulary,
};
pub use eval::{
    build_sense_index, common_subset_eval, eval_analogy, eval_analogy_commons, eval_similarity,
    load_analogy_questions, load_similarity_pairs, spearman, AnalogyQuestion, AnalogyReport,
    SenseIndex, SimilarityPair, SimilarityReport,
};
pub use links::{link_similarity, LinkGraph};
pub use vectors::{analogy_query, load_text, nearest, save_text, VectorSet};
pub use wiki::{
    build_corpus, build_redirect_map, extract_anchors, prune_page, render_line, stream_pages,
    AnchorSpan, CorpusLine, CorpusMode, IngestStats, PageId, PageRecord, PruneDecision, PruneRule,
    RedirectMap, Token,
};
