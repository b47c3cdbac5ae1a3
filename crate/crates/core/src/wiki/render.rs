use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{concept_token, tokenize, AnchorSpan, PageId, RedirectMap};

/// Corpus flavour produced by ingestion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusMode {
    /// Text with links to kept pages replaced by concept tokens.
    #[default]
    Standard,
    /// As standard, plus mentions of a page's own title become anchors.
    Heuristic,
    /// Only the concept tokens of anchors; all other text dropped.
    AnchorsOnly,
}

impl CorpusMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CorpusMode::Standard => "standard",
            CorpusMode::Heuristic => "heuristic",
            CorpusMode::AnchorsOnly => "anchors-only",
        }
    }
}

impl fmt::Display for CorpusMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorpusMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(CorpusMode::Standard),
            "heuristic" => Ok(CorpusMode::Heuristic),
            "anchors-only" | "anchors_only" => Ok(CorpusMode::AnchorsOnly),
            other => Err(format!(
                "unknown corpus mode {other:?} (expected standard, heuristic or anchors-only)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    Word(String),
    Concept(PageId),
}

impl Token {
    pub fn is_concept(&self) -> bool {
        matches!(self, Token::Concept(_))
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word(w) => f.write_str(w),
            Token::Concept(id) => f.write_str(&concept_token(*id)),
        }
    }
}

/// The tokens of one page; written as a single corpus line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusLine {
    pub page_id: PageId,
    pub tokens: Vec<Token>,
}

impl CorpusLine {
    pub fn concept_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_concept()).count()
    }
}

impl fmt::Display for CorpusLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, token) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{token}")?;
        }
        Ok(())
    }
}

/// Renders a page body (see [`super::strip_markup`]) into tokens.
///
/// `anchors` must be ordered, non-overlapping spans into `body`. An anchor
/// whose redirect-resolved target is in `kept` becomes one concept token;
/// otherwise its surface text is tokenized like the surrounding prose. In
/// [`CorpusMode::AnchorsOnly`] only the concept tokens are emitted.
pub fn render_line(
    page_id: PageId,
    body: &str,
    anchors: &[AnchorSpan],
    redirects: &RedirectMap,
    kept: &HashSet<PageId>,
    mode: CorpusMode,
) -> CorpusLine {
    let with_text = mode != CorpusMode::AnchorsOnly;
    let mut tokens = Vec::new();
    let mut pos = 0;
    for anchor in anchors {
        debug_assert!(anchor.span.start >= pos, "anchors out of order");
        if with_text {
            tokens.extend(tokenize(&body[pos..anchor.span.start]).map(Token::Word));
        }
        match redirects
            .resolve(&anchor.target_title)
            .filter(|id| kept.contains(id))
        {
            Some(id) => tokens.push(Token::Concept(id)),
            None if with_text => {
                tokens.extend(tokenize(&anchor.surface_text).map(Token::Word));
            }
            None => {}
        }
        pos = anchor.span.end;
    }
    if with_text {
        tokens.extend(tokenize(&body[pos..]).map(Token::Word));
    }
    CorpusLine { page_id, tokens }
}
