use std::io::BufRead;

use quick_xml::errors::SyntaxError;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::PageId;
use crate::{Error, Result};

/// One `<page>` element of a MediaWiki export.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageRecord {
    pub page_id: PageId,
    pub title: String,
    pub namespace: i32,
    /// Set iff the page is a redirect.
    pub redirect_target: Option<String>,
    pub wikitext: String,
}

impl PageRecord {
    pub fn is_redirect(&self) -> bool {
        self.redirect_target.is_some()
    }
}

/// Streams the pages of a MediaWiki XML export in document order.
///
/// Only one page is held in memory at a time. The iterator is fused after
/// the first error.
pub fn stream_pages<R: BufRead>(reader: R) -> PageStream<R> {
    let mut reader = Reader::from_reader(reader);
    reader.config_mut().trim_text(false);
    PageStream {
        reader,
        buf: Vec::new(),
        path: Vec::new(),
        done: false,
    }
}

pub struct PageStream<R> {
    reader: Reader<R>,
    buf: Vec<u8>,
    /// Local names of the currently open elements.
    path: Vec<Vec<u8>>,
    done: bool,
}

#[derive(Default)]
struct PageBuilder {
    title: Option<String>,
    namespace: Option<String>,
    id: Option<String>,
    redirect: Option<String>,
    text: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Title,
    Namespace,
    Id,
    Text,
}

impl<R: BufRead> PageStream<R> {
    fn offset(&self) -> u64 {
        self.reader.buffer_position()
    }

    fn xml_error(&self, message: impl Into<String>) -> Error {
        Error::Xml {
            offset: self.offset(),
            message: message.into(),
        }
    }

    /// Which page field, if any, the current element path captures.
    fn field(&self) -> Option<Field> {
        let page = self.path.iter().rposition(|n| n == b"page")?;
        let rest = &self.path[page + 1..];
        match rest {
            [n] if n == b"title" => Some(Field::Title),
            [n] if n == b"ns" => Some(Field::Namespace),
            [n] if n == b"id" => Some(Field::Id),
            [r, n] if r == b"revision" && n == b"text" => Some(Field::Text),
            _ => None,
        }
    }

    fn in_page(&self) -> bool {
        self.path.iter().any(|n| n == b"page")
    }

    fn redirect_title(&self, e: &BytesStart<'_>) -> Result<Option<String>> {
        for attr in e.attributes() {
            let attr = attr.map_err(|err| self.xml_error(err.to_string()))?;
            if attr.key.local_name().as_ref() == b"title" {
                let value = attr
                    .unescape_value()
                    .map_err(|err| self.xml_error(err.to_string()))?;
                return Ok(Some(value.into_owned()));
            }
        }
        Ok(None)
    }

    fn next_page(&mut self) -> Result<Option<PageRecord>> {
        let mut page: Option<PageBuilder> = None;
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(event) => event.into_owned(),
                // Every syntax error except bad `<!` markup means the input
                // ended inside a construct.
                Err(quick_xml::Error::Syntax(e)) if e != SyntaxError::InvalidBangMarkup => {
                    return Err(Error::TruncatedDump {
                        offset: self.reader.error_position(),
                    })
                }
                Err(err) => {
                    return Err(Error::Xml {
                        offset: self.reader.error_position(),
                        message: err.to_string(),
                    })
                }
            };
            match event {
                Event::Start(e) => {
                    let name = e.local_name().as_ref().to_vec();
                    if name == b"page" && !self.in_page() {
                        page = Some(PageBuilder::default());
                    } else if name == b"redirect" && self.path.last().is_some_and(|n| n == b"page")
                    {
                        if let Some(p) = page.as_mut() {
                            p.redirect = Some(self.redirect_title(&e)?.unwrap_or_default());
                        }
                    }
                    self.path.push(name);
                }
                Event::Empty(e) => {
                    if e.local_name().as_ref() == b"redirect"
                        && self.path.last().is_some_and(|n| n == b"page")
                    {
                        let title = self.redirect_title(&e)?;
                        if let Some(p) = page.as_mut() {
                            p.redirect = Some(title.unwrap_or_default());
                        }
                    }
                }
                Event::End(e) => {
                    let name = e.local_name().as_ref().to_vec();
                    if self.path.pop().as_deref() != Some(name.as_slice()) {
                        return Err(self.xml_error("mismatched end tag"));
                    }
                    if name == b"page" && !self.in_page() {
                        let builder = page.take().ok_or_else(|| self.xml_error("stray </page>"))?;
                        return self.finish_page(builder).map(Some);
                    }
                }
                Event::Text(t) => {
                    if let (Some(p), Some(field)) = (page.as_mut(), self.field()) {
                        let text = t.unescape().map_err(|err| Error::Xml {
                            offset: self.reader.buffer_position(),
                            message: err.to_string(),
                        })?;
                        p.push(field, &text);
                    }
                }
                Event::CData(t) => {
                    if let (Some(p), Some(field)) = (page.as_mut(), self.field()) {
                        p.push(field, &String::from_utf8_lossy(&t));
                    }
                }
                Event::Eof => {
                    if !self.path.is_empty() {
                        return Err(Error::TruncatedDump {
                            offset: self.offset(),
                        });
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }

    fn finish_page(&self, p: PageBuilder) -> Result<PageRecord> {
        let title = p
            .title
            .ok_or_else(|| self.xml_error("page without <title>"))?;
        let id =
            p.id.as_deref()
                .map(str::trim)
                .and_then(|s| s.parse::<u64>().ok())
                .filter(|&id| id > 0)
                .ok_or_else(|| self.xml_error(format!("page {title:?} has no positive <id>")))?;
        let namespace = match p.namespace.as_deref().map(str::trim) {
            None | Some("") => 0,
            Some(ns) => ns
                .parse()
                .map_err(|_| self.xml_error(format!("bad <ns> {ns:?}")))?,
        };
        // Older dumps carry an empty <redirect/>; fall back to the #REDIRECT line.
        let redirect_target = match p.redirect {
            Some(t) if !t.trim().is_empty() => Some(t),
            Some(_) => redirect_from_text(&p.text),
            None => None,
        };
        Ok(PageRecord {
            page_id: PageId(id),
            title,
            namespace,
            redirect_target,
            wikitext: p.text,
        })
    }
}

impl PageBuilder {
    fn push(&mut self, field: Field, text: &str) {
        let slot = match field {
            Field::Title => self.title.get_or_insert_with(String::new),
            Field::Namespace => self.namespace.get_or_insert_with(String::new),
            Field::Id => self.id.get_or_insert_with(String::new),
            Field::Text => &mut self.text,
        };
        slot.push_str(text);
    }
}

fn redirect_from_text(text: &str) -> Option<String> {
    let trimmed = text.trim_start();
    let head = trimmed.get(..9)?;
    if !head.eq_ignore_ascii_case("#redirect") {
        return None;
    }
    let start = trimmed.find("[[")? + 2;
    let end = start + trimmed[start..].find("]]")?;
    let target = trimmed[start..end].split('|').next()?.trim();
    (!target.is_empty()).then(|| target.to_string())
}

impl<R: BufRead> Iterator for PageStream<R> {
    type Item = Result<PageRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_page() {
            Ok(Some(page)) => Some(Ok(page)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(err) => {
                self.done = true;
                Some(Err(err))
            }
        }
    }
}

impl<R: BufRead> std::iter::FusedIterator for PageStream<R> {}
