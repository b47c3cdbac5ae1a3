//! Wikitext to plain text.
//!
//! [`strip_markup`] removes templates, tables, comments, references, file
//! and category links, emphasis and list/heading markers but leaves article
//! links (`[[...]]`) in place so anchors can be located in the result.

use super::anchor::{classify_link, find_link_end, LinkKind};

/// Tags dropped together with their content.
const DROPPED_ELEMENTS: [&str; 12] = [
    "ref",
    "math",
    "gallery",
    "timeline",
    "imagemap",
    "score",
    "syntaxhighlight",
    "source",
    "hiero",
    "chem",
    "ce",
    "references",
];

const ENTITIES: [(&str, &str); 8] = [
    ("&nbsp;", " "),
    ("&amp;", "&"),
    ("&lt;", "<"),
    ("&gt;", ">"),
    ("&quot;", "\""),
    ("&ndash;", "–"),
    ("&mdash;", "—"),
    ("&minus;", "−"),
];

/// Skips a balanced `open ... close` region starting at `start`.
/// Returns the offset past the final `close`, or `None` when unbalanced.
fn skip_balanced(text: &str, start: usize, open: &[u8], close: &[u8]) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut i = start;
    while i < bytes.len() {
        if bytes[i..].starts_with(open) {
            depth += 1;
            i += open.len();
        } else if bytes[i..].starts_with(close) {
            depth -= 1;
            i += close.len();
            if depth == 0 {
                return Some(i);
            }
        } else {
            i += 1;
        }
    }
    None
}

fn find_ci(haystack: &str, from: usize, needle: &str) -> Option<usize> {
    let hay = haystack.as_bytes();
    let needle = needle.as_bytes();
    (from..hay.len().saturating_sub(needle.len() - 1))
        .find(|&i| hay[i..i + needle.len()].eq_ignore_ascii_case(needle))
}

/// Parses an HTML-ish tag at `start` (which holds `<`). Returns
/// (lowercased name, is closing, is self-closing, offset past `>`).
fn parse_tag(text: &str, start: usize) -> Option<(String, bool, bool, usize)> {
    let rest = &text[start + 1..];
    let line_end = rest.find('\n').unwrap_or(rest.len());
    let gt = rest[..line_end].find('>')?;
    let inner = &rest[..gt];
    let (closing, inner) = match inner.strip_prefix('/') {
        Some(r) => (true, r),
        None => (false, inner),
    };
    let name: String = inner
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    if name.is_empty() || !name.as_bytes()[0].is_ascii_alphabetic() {
        return None;
    }
    let self_closing = inner.trim_end().ends_with('/');
    Some((name, closing, self_closing, start + 1 + gt + 1))
}

/// Removes non-prose markup from wikitext, keeping article links.
pub fn strip_markup(wikitext: &str) -> String {
    let bytes = wikitext.as_bytes();
    let mut out = String::with_capacity(wikitext.len());
    let mut i = 0;
    let mut line_start = true;
    // Start of the pending run of bytes copied verbatim.
    let mut run = 0;

    macro_rules! flush {
        () => {
            out.push_str(&wikitext[run..i]);
        };
    }

    while i < bytes.len() {
        let rest = &bytes[i..];

        if line_start {
            line_start = false;
            // Table at line start.
            if rest.starts_with(b"{|") {
                flush!();
                i = skip_balanced(wikitext, i, b"{|", b"|}").unwrap_or(bytes.len());
                run = i;
                continue;
            }
            // List and indent markers.
            let markers = rest
                .iter()
                .take_while(|b| matches!(b, b'*' | b'#' | b':' | b';'))
                .count();
            // Heading markers.
            let equals = rest.iter().take_while(|&&b| b == b'=').count();
            if markers > 0 || equals > 0 {
                flush!();
                i += markers + equals;
                run = i;
                continue;
            }
        }

        match bytes[i] {
            b'\n' => {
                // Trailing heading markers.
                let mut j = i;
                while j > run && bytes[j - 1] == b'=' {
                    j -= 1;
                }
                out.push_str(&wikitext[run..j]);
                out.push('\n');
                i += 1;
                run = i;
                line_start = true;
            }
            b'<' if rest.starts_with(b"<!--") => {
                flush!();
                i = wikitext[i + 4..]
                    .find("-->")
                    .map_or(bytes.len(), |p| i + 4 + p + 3);
                run = i;
            }
            b'<' => match parse_tag(wikitext, i) {
                Some((name, closing, self_closing, after)) => {
                    flush!();
                    i = after;
                    if !closing && !self_closing && DROPPED_ELEMENTS.contains(&name.as_str()) {
                        let close = format!("</{name}");
                        i = match find_ci(wikitext, i, &close) {
                            Some(p) => wikitext[p..].find('>').map_or(bytes.len(), |g| p + g + 1),
                            None => bytes.len(),
                        };
                    }
                    run = i;
                }
                None => i += 1,
            },
            b'{' if rest.starts_with(b"{{") => {
                flush!();
                i = skip_balanced(wikitext, i, b"{{", b"}}").unwrap_or(i + 2);
                run = i;
            }
            b'[' if rest.starts_with(b"[[") => {
                let Some((end, _)) = find_link_end(wikitext, i) else {
                    i += 2;
                    continue;
                };
                match classify_link(&wikitext[i + 2..end - 2]) {
                    Some(LinkKind::Hidden) => {
                        flush!();
                        i = end;
                        run = i;
                    }
                    Some(LinkKind::TextOnly(display)) => {
                        flush!();
                        out.push_str(display);
                        i = end;
                        run = i;
                    }
                    // Kept verbatim for anchor extraction.
                    _ => i = end,
                }
            }
            b'[' if is_external_link(&rest[1..]) => {
                let close = wikitext[i..].find([']', '\n']).map(|p| i + p);
                match close {
                    Some(c) if bytes[c] == b']' => {
                        flush!();
                        let inner = &wikitext[i + 1..c];
                        if let Some((_, label)) = inner.split_once(' ') {
                            out.push_str(label.trim());
                        }
                        i = c + 1;
                        run = i;
                    }
                    _ => i += 1,
                }
            }
            b'\'' if rest.starts_with(b"''") => {
                flush!();
                i += rest.iter().take_while(|&&b| b == b'\'').count();
                run = i;
            }
            b'_' if rest.starts_with(b"__") => {
                let word = rest[2..]
                    .iter()
                    .take_while(|b| b.is_ascii_uppercase())
                    .count();
                if word > 0 && rest[2 + word..].starts_with(b"__") {
                    flush!();
                    i += word + 4;
                    run = i;
                } else {
                    i += 2;
                }
            }
            b'&' => match ENTITIES
                .iter()
                .find(|(e, _)| rest.starts_with(e.as_bytes()))
            {
                Some((entity, replacement)) => {
                    flush!();
                    out.push_str(replacement);
                    i += entity.len();
                    run = i;
                }
                None => i += 1,
            },
            _ => i += 1,
        }
    }
    let mut j = bytes.len();
    while j > run && bytes[j - 1] == b'=' {
        j -= 1;
    }
    out.push_str(&wikitext[run..j]);
    out
}

fn is_external_link(rest: &[u8]) -> bool {
    ["http://", "https://", "ftp://", "//"]
        .iter()
        .any(|scheme| {
            rest.len() >= scheme.len()
                && rest[..scheme.len()].eq_ignore_ascii_case(scheme.as_bytes())
        })
}

/// Splits plain text into lowercase word tokens.
///
/// Tokens are maximal runs of alphanumeric characters; a hyphen between
/// two alphanumerics stays inside the token. Everything else separates.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    Tokens { text, pos: 0 }
}

struct Tokens<'a> {
    text: &'a str,
    pos: usize,
}

impl Iterator for Tokens<'_> {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        let rest = &self.text[self.pos..];
        let start = self.pos + rest.find(char::is_alphanumeric)?;
        let mut end = start;
        let mut chars = self.text[start..].char_indices().peekable();
        while let Some((off, c)) = chars.next() {
            if c.is_alphanumeric() {
                end = start + off + c.len_utf8();
            } else if c == '-' && chars.peek().is_some_and(|(_, n)| n.is_alphanumeric()) {
                continue;
            } else {
                break;
            }
        }
        self.pos = end;
        Some(self.text[start..end].to_lowercase())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).collect()
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(toks("Hello, World!"), ["hello", "world"]);
        assert_eq!(
            toks("state-of-the-art 2016 x86-64"),
            ["state-of-the-art", "2016", "x86-64"]
        );
        assert_eq!(toks("-lead trail- a--b"), ["lead", "trail", "a", "b"]);
        assert_eq!(toks("don't"), ["don", "t"]);
        assert_eq!(toks("Ünïcode ÉCOLE"), ["ünïcode", "école"]);
        assert_eq!(toks("wiki_42"), ["wiki", "42"]);
        assert!(toks(" ... ").is_empty());
    }

    #[test]
    fn templates_and_comments_removed() {
        let s = strip_markup("A{{Infobox|x={{nested|[[Paris]]}}}} b<!-- hidden [[Lyon]] --> c");
        assert_eq!(s, "A b c");
    }

    #[test]
    fn references_removed_links_kept() {
        let s = strip_markup(
            "born in [[Paris]]<ref name=\"a\">Source [[Lyon]]</ref> and<ref name=b/> here",
        );
        assert_eq!(s, "born in [[Paris]] and here");
    }

    #[test]
    fn emphasis_headings_and_lists() {
        let s =
            strip_markup("'''Data mining''' is ''great''.\n== History ==\n* item [[One]]\n#: two");
        assert_eq!(s, "Data mining is great.\n History \n item [[One]]\n two");
    }

    #[test]
    fn files_categories_and_section_links() {
        let s = strip_markup(
            "[[File:X.jpg|thumb|cap [[Paris]]]]Text [[#History|history]].\n[[Category:Cities]]",
        );
        assert_eq!(s, "Text history.\n");
    }

    #[test]
    fn external_links_keep_label() {
        let s = strip_markup("see [http://example.com the site] and [https://x.org]");
        assert_eq!(s, "see the site and ");
    }

    #[test]
    fn tables_and_entities() {
        let s = strip_markup("x&nbsp;y\n{| class=\"wikitable\"\n| [[A]] || b\n|}\nz &amp; w");
        assert_eq!(s, "x y\n\nz & w");
    }

    #[test]
    fn inline_tags_dropped_content_kept() {
        let s = strip_markup("a <small>b</small> c<br/>d<math>x^2</math>e");
        assert_eq!(s, "a b cde");
    }

    #[test]
    fn unbalanced_template_does_not_swallow_text() {
        assert_eq!(strip_markup("a {{broken b"), "a broken b");
    }
}
