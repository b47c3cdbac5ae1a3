use std::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Written as a `[[...]]` link in the page.
    Explicit,
    /// Added by the title-mention rule.
    Heuristic,
}

/// One link occurrence in a page body.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorSpan {
    pub target_title: String,
    pub surface_text: String,
    /// Byte range of the whole link (brackets included) in the scanned text.
    pub span: Range<usize>,
    pub provenance: Provenance,
}

/// Result of scanning a text for links.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnchorScan {
    /// Anchors in order of position; spans never overlap.
    pub anchors: Vec<AnchorSpan>,
    /// Unbalanced or otherwise malformed `[[` openings that were skipped.
    pub malformed: usize,
}

/// How a `[[...]]` link is treated.
#[derive(Debug, PartialEq, Eq)]
pub(crate) enum LinkKind<'a> {
    Anchor {
        target: &'a str,
        surface: &'a str,
    },
    /// A link that shows text but points at no article, e.g. `[[#History|history]]`.
    TextOnly(&'a str),
    /// Files, images, categories and interlanguage links; not part of the prose.
    Hidden,
}

const HIDDEN_NAMESPACES: [&str; 4] = ["file", "image", "media", "category"];

fn is_language_code(prefix: &str) -> bool {
    let mut parts = prefix.splitn(2, '-');
    let head = parts.next().unwrap_or_default();
    (2..=3).contains(&head.len())
        && head.bytes().all(|b| b.is_ascii_lowercase())
        && parts
            .next()
            .is_none_or(|tail| !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_lowercase()))
}

/// Classifies the text between `[[` and `]]`. `None` means malformed.
pub(crate) fn classify_link(inner: &str) -> Option<LinkKind<'_>> {
    let (raw_target, surface) = match inner.find('|') {
        Some(bar) => (&inner[..bar], Some(&inner[bar + 1..])),
        None => (inner, None),
    };
    if raw_target.contains(['\n', '{', '}', '[', ']', '<', '>']) {
        return None;
    }
    let visible_colon = raw_target.trim_start().starts_with(':');
    let target_text = raw_target.trim().trim_start_matches(':').trim();
    if !visible_colon {
        if let Some((prefix, _)) = target_text.split_once(':') {
            let prefix = prefix.trim();
            let lower = prefix.to_ascii_lowercase();
            if HIDDEN_NAMESPACES.contains(&lower.as_str()) || is_language_code(prefix) {
                return Some(LinkKind::Hidden);
            }
        }
    }
    let target = target_text.split('#').next().unwrap_or_default().trim();
    let surface = match surface.map(str::trim) {
        Some(s) if !s.is_empty() => s,
        // Pipe trick and plain links show the target as written.
        _ => target_text,
    };
    if target.is_empty() {
        return Some(LinkKind::TextOnly(surface));
    }
    if surface.is_empty() {
        return None;
    }
    Some(LinkKind::Anchor { target, surface })
}

/// Given `text[start..]` beginning with `[[`, returns the byte offset just
/// past the matching `]]`, and whether any link was nested inside.
pub(crate) fn find_link_end(text: &str, start: usize) -> Option<(usize, bool)> {
    let bytes = text.as_bytes();
    debug_assert!(bytes[start..].starts_with(b"[["));
    let mut depth = 0usize;
    let mut nested = false;
    let mut i = start;
    while i + 1 < bytes.len() {
        match (bytes[i], bytes[i + 1]) {
            (b'[', b'[') => {
                depth += 1;
                if depth > 1 {
                    nested = true;
                }
                i += 2;
            }
            (b']', b']') => {
                depth -= 1;
                i += 2;
                if depth == 0 {
                    return Some((i, nested));
                }
            }
            _ => i += 1,
        }
    }
    None
}

/// Extracts `[[Target]]` and `[[Target|surface]]` links from wikitext.
///
/// Section fragments are stripped from targets. File, image, category and
/// interlanguage links are not anchors, and neither is anything nested in
/// them. Malformed openings are skipped and counted.
pub fn extract_anchors(text: &str) -> AnchorScan {
    let mut scan = AnchorScan::default();
    let mut pos = 0;
    while let Some(found) = text[pos..].find("[[") {
        let start = pos + found;
        let Some((end, nested)) = find_link_end(text, start) else {
            scan.malformed += 1;
            pos = start + 2;
            continue;
        };
        let inner = &text[start + 2..end - 2];
        match classify_link(inner) {
            Some(LinkKind::Hidden) => pos = end,
            Some(LinkKind::Anchor { target, surface }) if !nested => {
                scan.anchors.push(AnchorSpan {
                    target_title: target.to_string(),
                    surface_text: clean_surface(surface),
                    span: start..end,
                    provenance: Provenance::Explicit,
                });
                pos = end;
            }
            Some(LinkKind::TextOnly(_)) if !nested => pos = end,
            _ => {
                scan.malformed += 1;
                pos = start + 2;
            }
        }
    }
    scan
}

fn clean_surface(surface: &str) -> String {
    if surface.contains("''") {
        surface.replace("'''", "").replace("''", "")
    } else {
        surface.to_string()
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '-' || c == '_'
}

/// Adds a heuristic anchor for every exact, case-sensitive mention of the
/// page title in `body` that sits on token boundaries and does not overlap
/// an existing anchor. Existing anchors are returned untouched; the result
/// is ordered by position.
pub fn apply_title_heuristic(title: &str, body: &str, anchors: Vec<AnchorSpan>) -> Vec<AnchorSpan> {
    if title.is_empty() {
        return anchors;
    }
    let mut added = Vec::new();
    let mut taken = anchors.iter().map(|a| a.span.clone()).collect::<Vec<_>>();
    taken.sort_by_key(|r| r.start);

    for (start, matched) in body.match_indices(title) {
        let end = start + matched.len();
        let before_ok = body[..start]
            .chars()
            .next_back()
            .is_none_or(|c| !is_word_char(c));
        let after_ok = body[end..].chars().next().is_none_or(|c| !is_word_char(c));
        if !before_ok || !after_ok {
            continue;
        }
        let overlaps = taken.iter().any(|r| r.start < end && start < r.end);
        if overlaps {
            continue;
        }
        added.push(AnchorSpan {
            target_title: title.to_string(),
            surface_text: title.to_string(),
            span: start..end,
            provenance: Provenance::Heuristic,
        });
    }

    let mut out = anchors;
    out.extend(added);
    out.sort_by_key(|a| a.span.start);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(text: &str) -> AnchorSpan {
        let scan = extract_anchors(text);
        assert_eq!(scan.anchors.len(), 1, "{scan:?}");
        scan.anchors.into_iter().next().unwrap()
    }

    #[test]
    fn plain_link() {
        let a = one("born in [[Paris]]");
        assert_eq!(a.target_title, "Paris");
        assert_eq!(a.surface_text, "Paris");
        assert_eq!(a.span, 8..17);
        assert_eq!(a.provenance, Provenance::Explicit);
    }

    #[test]
    fn piped_link() {
        let a = one("[[Paris|the French capital]]");
        assert_eq!(a.target_title, "Paris");
        assert_eq!(a.surface_text, "the French capital");
    }

    #[test]
    fn fragment_is_stripped() {
        let a = one("[[Paris#History|Paris]]");
        assert_eq!(a.target_title, "Paris");
        assert_eq!(a.surface_text, "Paris");
    }

    #[test]
    fn pipe_trick_uses_target() {
        let a = one("[[Paris|]]");
        assert_eq!(a.surface_text, "Paris");
    }

    #[test]
    fn files_and_their_captions_are_skipped() {
        let scan = extract_anchors("[[File:Eiffel.jpg|thumb|The tower in [[Paris]]]] and [[Lyon]]");
        assert_eq!(scan.anchors.len(), 1);
        assert_eq!(scan.anchors[0].target_title, "Lyon");
        assert_eq!(scan.malformed, 0);
    }

    #[test]
    fn categories_and_interlanguage_are_not_anchors() {
        let scan = extract_anchors("[[Category:Cities]] [[fr:Paris]] [[:Category:Cities|see]]");
        assert_eq!(scan.anchors.len(), 1);
        assert_eq!(scan.anchors[0].target_title, "Category:Cities");
        assert_eq!(scan.anchors[0].surface_text, "see");
    }

    #[test]
    fn section_links_are_not_anchors() {
        let scan = extract_anchors("see [[#History|history]]");
        assert!(scan.anchors.is_empty());
        assert_eq!(scan.malformed, 0);
    }

    #[test]
    fn unbalanced_brackets_are_skipped() {
        let scan = extract_anchors("[[Broken and then [[Paris]] and [[Tail");
        assert_eq!(scan.anchors.len(), 1);
        assert_eq!(scan.anchors[0].target_title, "Paris");
        assert_eq!(scan.malformed, 2);
    }

    #[test]
    fn italic_surface_is_cleaned() {
        let a = one("[[Hamlet|''Hamlet'']]");
        assert_eq!(a.surface_text, "Hamlet");
    }

    #[test]
    fn heuristic_counts_free_mentions() {
        let body =
            "Data mining is a field. [[Statistics]] helps Data mining and [[Data mining|it]].";
        let anchors = extract_anchors(body).anchors;
        let out = apply_title_heuristic("Data mining", body, anchors.clone());
        let heuristic: Vec<_> = out
            .iter()
            .filter(|a| a.provenance == Provenance::Heuristic)
            .collect();
        assert_eq!(heuristic.len(), 2);
        assert!(heuristic
            .iter()
            .all(|a| &body[a.span.clone()] == "Data mining"));
        for a in &anchors {
            assert!(out.contains(a));
        }
    }

    #[test]
    fn heuristic_without_mentions_is_a_no_op() {
        let anchors = extract_anchors("about [[Paris]]").anchors;
        let out = apply_title_heuristic("London", "about [[Paris]]", anchors.clone());
        assert_eq!(out, anchors);
    }

    #[test]
    fn heuristic_skips_mentions_inside_links() {
        let body = "[[Paris]] is big";
        let anchors = extract_anchors(body).anchors;
        let out = apply_title_heuristic("Paris", body, anchors.clone());
        assert_eq!(out, anchors);
    }

    #[test]
    fn heuristic_requires_token_boundaries_and_case() {
        let out = apply_title_heuristic("Paris", "Parisian paris Paris-based Paris.", vec![]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].span, 27..32);
    }

    proptest! {
        #[test]
        fn anchors_never_overlap(text in "(\\[\\[|\\]\\]|\\||#|[a-c ]){0,60}") {
            let scan = extract_anchors(&text);
            for pair in scan.anchors.windows(2) {
                prop_assert!(pair[0].span.end <= pair[1].span.start);
            }
            for a in &scan.anchors {
                prop_assert!(a.span.end <= text.len());
                prop_assert!(!a.surface_text.is_empty());
            }
        }

        #[test]
        fn heuristic_is_monotone(
            text in "(\\[\\[ab\\]\\]|ab|[a-c ]){0,30}",
        ) {
            let anchors = extract_anchors(&text).anchors;
            let out = apply_title_heuristic("ab", &text, anchors.clone());
            prop_assert!(out.len() >= anchors.len());
            for a in &anchors {
                prop_assert!(out.contains(a));
            }
            for pair in out.windows(2) {
                prop_assert!(pair[0].span.end <= pair[1].span.start);
            }
        }
    }
}
