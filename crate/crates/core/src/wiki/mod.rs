//! Dump ingestion: streaming parse, pruning, redirects, anchors and
//! corpus rendering.

mod anchor;
mod corpus;
mod dump;
mod markup;
mod prune;
mod redirect;
mod render;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use anchor::{apply_title_heuristic, extract_anchors, AnchorScan, AnchorSpan, Provenance};
pub use corpus::surface_key;
pub use corpus::{
    build_corpus, scan_catalog, write_corpus, AnchorStats, IngestOptions, IngestOutput,
    IngestStats, PageCatalog,
};
pub(crate) use corpus::{open, page_anchors};
pub use dump::{stream_pages, PageRecord, PageStream};
pub use markup::{strip_markup, tokenize};
pub use prune::{matching_rules, prune_page, PruneDecision, PruneRule};
pub use redirect::{build_redirect_map, normalize_title, RedirectDiagnostics, RedirectMap};
pub use render::{render_line, CorpusLine, CorpusMode, Token};

/// Dump-assigned page identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PageId(pub u64);

impl fmt::Display for PageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Prefix of the corpus token standing for a concept.
pub const CONCEPT_PREFIX: &str = "wiki_";

/// Encodes a page id as its corpus token, `wiki_<id>`.
pub fn concept_token(id: PageId) -> String {
    format!("{CONCEPT_PREFIX}{id}")
}

/// Decodes a `wiki_<id>` token.
pub fn parse_concept_token(token: &str) -> Option<PageId> {
    let digits = token.strip_prefix(CONCEPT_PREFIX)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(PageId)
}
