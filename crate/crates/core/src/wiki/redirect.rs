use std::collections::HashMap;

use super::{PageId, PageRecord};

/// Canonical form of a page title as used for link lookup: underscores
/// read as spaces, runs of whitespace collapsed, first letter uppercased
/// and any `#fragment` removed.
pub fn normalize_title(title: &str) -> String {
    let title = title.split('#').next().unwrap_or_default();
    let mut out = String::with_capacity(title.len());
    for word in title
        .split(|c: char| c == '_' || c.is_whitespace())
        .filter(|w| !w.is_empty())
    {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    let mut chars = out.chars();
    match chars.next() {
        Some(first) if first.is_lowercase() => first.to_uppercase().chain(chars).collect(),
        _ => out,
    }
}

/// Counts collected while resolving redirects.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RedirectDiagnostics {
    /// Distinct redirect cycles found.
    pub cycles: u64,
    /// Redirects dropped because their chain runs into a cycle.
    pub cyclic_entries: u64,
    /// Redirects dropped because their chain ends at an unknown title.
    pub missing_targets: u64,
}

/// Maps titles to canonical (non-redirect) page ids.
#[derive(Clone, Debug, Default)]
pub struct RedirectMap {
    articles: HashMap<String, PageId>,
    redirects: HashMap<String, PageId>,
    redirect_ids: HashMap<PageId, PageId>,
    diagnostics: RedirectDiagnostics,
}

impl RedirectMap {
    /// Resolves a link target or title to its canonical page.
    pub fn resolve(&self, title: &str) -> Option<PageId> {
        let key = normalize_title(title);
        self.articles
            .get(&key)
            .or_else(|| self.redirects.get(&key))
            .copied()
    }

    /// Maps a redirect page's id to its canonical target; other ids map to
    /// themselves.
    pub fn resolve_id(&self, id: PageId) -> PageId {
        self.redirect_ids.get(&id).copied().unwrap_or(id)
    }

    /// Number of redirect titles with a resolved target.
    pub fn len(&self) -> usize {
        self.redirects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.redirects.is_empty()
    }

    pub fn diagnostics(&self) -> RedirectDiagnostics {
        self.diagnostics
    }
}

/// Collects titles during a pass over the dump.
#[derive(Default)]
pub(crate) struct RedirectMapBuilder {
    articles: HashMap<String, PageId>,
    /// title → (page id, target title)
    pending: HashMap<String, (PageId, String)>,
}

impl RedirectMapBuilder {
    pub(crate) fn add(&mut self, page: &PageRecord) {
        let title = normalize_title(&page.title);
        match &page.redirect_target {
            Some(target) => {
                self.pending
                    .insert(title, (page.page_id, normalize_title(target)));
            }
            None => {
                self.articles.entry(title).or_insert(page.page_id);
            }
        }
    }

    pub(crate) fn finish(self) -> RedirectMap {
        #[derive(Clone, Copy)]
        enum Outcome {
            Resolved(PageId),
            Cyclic,
            Missing,
        }
        #[derive(Clone, Copy)]
        enum State {
            OnPath,
            Done(Outcome),
        }

        let RedirectMapBuilder { articles, pending } = self;
        let mut diagnostics = RedirectDiagnostics::default();
        let mut state: HashMap<&str, State> = HashMap::with_capacity(pending.len());

        // Sorted so cycle accounting does not depend on hash order.
        let mut titles: Vec<&String> = pending.keys().collect();
        titles.sort();

        for start in titles {
            let mut path: Vec<&str> = Vec::new();
            let mut cur: &str = start;
            let outcome = loop {
                if let Some(&id) = articles.get(cur) {
                    break Outcome::Resolved(id);
                }
                match state.get(cur) {
                    Some(State::Done(outcome)) => break *outcome,
                    Some(State::OnPath) => {
                        diagnostics.cycles += 1;
                        break Outcome::Cyclic;
                    }
                    None => {}
                }
                let Some((_, target)) = pending.get(cur) else {
                    break Outcome::Missing;
                };
                state.insert(cur, State::OnPath);
                path.push(cur);
                cur = target;
            };
            match outcome {
                Outcome::Cyclic => diagnostics.cyclic_entries += path.len() as u64,
                Outcome::Missing => diagnostics.missing_targets += path.len() as u64,
                Outcome::Resolved(_) => {}
            }
            for title in path {
                state.insert(title, State::Done(outcome));
            }
        }

        let mut redirects = HashMap::new();
        let mut redirect_ids = HashMap::new();
        for (title, (id, _)) in &pending {
            if let Some(State::Done(Outcome::Resolved(target))) = state.get(title.as_str()) {
                redirects.insert(title.clone(), *target);
                redirect_ids.insert(*id, *target);
            }
        }
        RedirectMap {
            articles,
            redirects,
            redirect_ids,
            diagnostics,
        }
    }
}

/// Builds the redirect map from a full pass over the dump.
pub fn build_redirect_map<'a>(pages: impl IntoIterator<Item = &'a PageRecord>) -> RedirectMap {
    let mut builder = RedirectMapBuilder::default();
    for page in pages {
        builder.add(page);
    }
    builder.finish()
}
