use std::fmt;

use serde::{Deserialize, Serialize};

use super::PageRecord;

/// Page-pruning rules, in the order they are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneRule {
    RedirectTag,
    CategoryPrefix,
    FilePrefix,
    TemplatePrefix,
    Disambiguation,
    PortalPrefix,
    DraftPrefix,
    MediawikiPrefix,
    ListOfPrefix,
    WikipediaPrefix,
    TimedtextPrefix,
    HelpPrefix,
    BookPrefix,
    ModulePrefix,
    TopicPrefix,
}

impl PruneRule {
    pub const ALL: [PruneRule; 15] = [
        PruneRule::RedirectTag,
        PruneRule::CategoryPrefix,
        PruneRule::FilePrefix,
        PruneRule::TemplatePrefix,
        PruneRule::Disambiguation,
        PruneRule::PortalPrefix,
        PruneRule::DraftPrefix,
        PruneRule::MediawikiPrefix,
        PruneRule::ListOfPrefix,
        PruneRule::WikipediaPrefix,
        PruneRule::TimedtextPrefix,
        PruneRule::HelpPrefix,
        PruneRule::BookPrefix,
        PruneRule::ModulePrefix,
        PruneRule::TopicPrefix,
    ];

    pub fn id(self) -> &'static str {
        match self {
            PruneRule::RedirectTag => "redirect-tag",
            PruneRule::CategoryPrefix => "category-prefix",
            PruneRule::FilePrefix => "file-prefix",
            PruneRule::TemplatePrefix => "template-prefix",
            PruneRule::Disambiguation => "disambiguation",
            PruneRule::PortalPrefix => "portal-prefix",
            PruneRule::DraftPrefix => "draft-prefix",
            PruneRule::MediawikiPrefix => "mediawiki-prefix",
            PruneRule::ListOfPrefix => "list-of-prefix",
            PruneRule::WikipediaPrefix => "wikipedia-prefix",
            PruneRule::TimedtextPrefix => "timedtext-prefix",
            PruneRule::HelpPrefix => "help-prefix",
            PruneRule::BookPrefix => "book-prefix",
            PruneRule::ModulePrefix => "module-prefix",
            PruneRule::TopicPrefix => "topic-prefix",
        }
    }

    /// Case-sensitive title prefix for the prefix rules.
    pub fn title_prefix(self) -> Option<&'static str> {
        Some(match self {
            PruneRule::CategoryPrefix => "Category:",
            PruneRule::FilePrefix => "File:",
            PruneRule::TemplatePrefix => "Template:",
            PruneRule::PortalPrefix => "Portal:",
            PruneRule::DraftPrefix => "Draft:",
            PruneRule::MediawikiPrefix => "MediaWiki:",
            PruneRule::ListOfPrefix => "List of",
            PruneRule::WikipediaPrefix => "Wikipedia:",
            PruneRule::TimedtextPrefix => "TimedText:",
            PruneRule::HelpPrefix => "Help:",
            PruneRule::BookPrefix => "Book:",
            PruneRule::ModulePrefix => "Module:",
            PruneRule::TopicPrefix => "Topic:",
            PruneRule::RedirectTag | PruneRule::Disambiguation => return None,
        })
    }

    pub fn matches(self, page: &PageRecord) -> bool {
        match self {
            PruneRule::RedirectTag => page.is_redirect(),
            PruneRule::Disambiguation => {
                page.title.contains("(disambiguation)")
                    || page.wikitext.contains("may refer to:")
                    || page.wikitext.contains("may also refer to")
            }
            rule => rule
                .title_prefix()
                .is_some_and(|prefix| page.title.starts_with(prefix)),
        }
    }
}

impl fmt::Display for PruneRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "rule", rename_all = "kebab-case")]
pub enum PruneDecision {
    Keep,
    Discard(PruneRule),
}

impl PruneDecision {
    pub fn is_keep(self) -> bool {
        self == PruneDecision::Keep
    }

    pub fn rule(self) -> Option<PruneRule> {
        match self {
            PruneDecision::Keep => None,
            PruneDecision::Discard(rule) => Some(rule),
        }
    }
}

/// Discards with the first matching rule, keeps otherwise.
pub fn prune_page(page: &PageRecord) -> PruneDecision {
    PruneRule::ALL
        .into_iter()
        .find(|rule| rule.matches(page))
        .map_or(PruneDecision::Keep, PruneDecision::Discard)
}

/// Every rule the page matches, in checking order. The first element, if
/// any, is the rule [`prune_page`] reports.
pub fn matching_rules(page: &PageRecord) -> Vec<PruneRule> {
    PruneRule::ALL
        .into_iter()
        .filter(|rule| rule.matches(page))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiki::PageId;
    use proptest::prelude::*;

    fn page(title: &str, text: &str) -> PageRecord {
        PageRecord {
            page_id: PageId(1),
            title: title.into(),
            namespace: 0,
            redirect_target: None,
            wikitext: text.into(),
        }
    }

    #[test]
    fn category_prefix() {
        assert_eq!(
            prune_page(&page("Category:Musicians", "")),
            PruneDecision::Discard(PruneRule::CategoryPrefix)
        );
    }

    #[test]
    fn ordinary_article_is_kept() {
        let p = page("Amazon (company)", "Amazon is an American company.");
        assert_eq!(prune_page(&p), PruneDecision::Keep);
        assert!(matching_rules(&p).is_empty());
    }

    #[test]
    fn disambiguation_by_title_or_body() {
        let d = PruneDecision::Discard(PruneRule::Disambiguation);
        assert_eq!(prune_page(&page("Mercury (disambiguation)", "")), d);
        assert_eq!(
            prune_page(&page("Mercury", "'''Mercury''' may refer to:")),
            d
        );
        assert_eq!(
            prune_page(&page("Mercury", "It may also refer to a god")),
            d
        );
        assert_eq!(
            prune_page(&page("Mercury", "may refer to")),
            PruneDecision::Keep
        );
    }

    #[test]
    fn prefixes_are_case_sensitive_and_anchored() {
        assert_eq!(
            prune_page(&page("category:Musicians", "")),
            PruneDecision::Keep
        );
        assert_eq!(
            prune_page(&page("The List of rivers", "")),
            PruneDecision::Keep
        );
        assert_eq!(prune_page(&page("list of rivers", "")), PruneDecision::Keep);
        assert_eq!(
            prune_page(&page("List of rivers", "")),
            PruneDecision::Discard(PruneRule::ListOfPrefix)
        );
    }

    #[test]
    fn redirect_rule_comes_first() {
        let mut p = page("Draft:Thing (disambiguation)", "");
        p.redirect_target = Some("Thing".into());
        assert_eq!(
            prune_page(&p),
            PruneDecision::Discard(PruneRule::RedirectTag)
        );
        assert_eq!(
            matching_rules(&p),
            vec![
                PruneRule::RedirectTag,
                PruneRule::Disambiguation,
                PruneRule::DraftPrefix
            ]
        );
    }

    #[test]
    fn every_prefix_rule_fires() {
        for rule in PruneRule::ALL {
            if let Some(prefix) = rule.title_prefix() {
                let p = page(&format!("{prefix}X"), "");
                assert_eq!(prune_page(&p), PruneDecision::Discard(rule), "{rule}");
            }
        }
    }

    proptest! {
        #[test]
        fn decision_is_first_matching_rule(
            title in "(Category:|List of|Help:|Topic:|)[A-Za-z ()]{0,20}",
            body in "[a-z :]{0,30}",
            redirect in any::<bool>(),
        ) {
            let mut p = page(&title, &body);
            if redirect {
                p.redirect_target = Some("T".into());
            }
            let decision = prune_page(&p);
            let rules = matching_rules(&p);
            prop_assert_eq!(decision.rule(), rules.first().copied());
            prop_assert_eq!(decision.is_keep(), rules.is_empty());
        }
    }
}
