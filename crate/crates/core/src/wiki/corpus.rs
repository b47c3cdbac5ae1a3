use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::anchor::{apply_title_heuristic, extract_anchors, AnchorScan, Provenance};
use super::redirect::RedirectMapBuilder;
use super::{
    prune_page, render_line, stream_pages, strip_markup, CorpusMode, PageId, PageRecord,
    PruneDecision, PruneRule, RedirectMap,
};
use crate::{Error, Result};

const BATCH_PAGES: usize = 256;

/// Counters reported by an ingest run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub pages_seen: u64,
    pub pages_kept: u64,
    pub anchors_explicit: u64,
    pub anchors_heuristic: u64,
    pub tokens_emitted: u64,
    pub redirect_cycles: u64,
    pub redirects_missing: u64,
    pub malformed_links: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct IngestOptions {
    pub mode: CorpusMode,
    pub workers: usize,
    /// Render in a single thread; lines are in dump order either way.
    pub ordered: bool,
    /// Also count (surface form, target) pairs of anchors to kept pages.
    pub collect_anchor_stats: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            mode: CorpusMode::Standard,
            workers: 1,
            ordered: true,
            collect_anchor_stats: false,
        }
    }
}

/// Result of the first pass over a dump: redirects and the kept page set.
#[derive(Clone, Debug, Default)]
pub struct PageCatalog {
    pub redirects: RedirectMap,
    pub kept: HashSet<PageId>,
    pub pages_seen: u64,
    pub discarded: BTreeMap<PruneRule, u64>,
}

pub fn scan_catalog<R: BufRead>(dump: R) -> Result<PageCatalog> {
    let mut builder = RedirectMapBuilder::default();
    let mut catalog = PageCatalog::default();
    for page in stream_pages(dump) {
        let page = page?;
        catalog.pages_seen += 1;
        builder.add(&page);
        match prune_page(&page) {
            PruneDecision::Keep => {
                catalog.kept.insert(page.page_id);
            }
            PruneDecision::Discard(rule) => *catalog.discarded.entry(rule).or_default() += 1,
        }
    }
    catalog.redirects = builder.finish();
    Ok(catalog)
}

/// Normalizes an anchor surface for sense statistics: lowercase, single spaces.
pub fn surface_key(surface: &str) -> String {
    surface
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// How often each surface form links to each kept page.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnchorStats {
    counts: HashMap<(String, PageId), u64>,
}

impl AnchorStats {
    pub fn add(&mut self, surface: &str, target: PageId) {
        *self
            .counts
            .entry((surface_key(surface), target))
            .or_default() += 1;
    }

    fn merge(&mut self, other: AnchorStats) {
        for (key, n) in other.counts {
            *self.counts.entry(key).or_default() += n;
        }
    }

    /// (surface, target, count) triples sorted by surface then target.
    pub fn entries(&self) -> Vec<(&str, PageId, u64)> {
        let mut out: Vec<_> = self
            .counts
            .iter()
            .map(|((s, id), n)| (s.as_str(), *id, *n))
            .collect();
        out.sort();
        out
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Writes `surface<TAB>page_id<TAB>count` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for (surface, id, n) in self.entries() {
            writeln!(out, "{surface}\t{id}\t{n}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut stats = AnchorStats::default();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(surface), Some(id), Some(n), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::format(i + 1, "expected surface, page id and count"));
            };
            let id = id
                .parse()
                .map_err(|_| Error::format(i + 1, format!("bad page id {id:?}")))?;
            let n: u64 = n
                .parse()
                .map_err(|_| Error::format(i + 1, format!("bad count {n:?}")))?;
            *stats
                .counts
                .entry((surface_key(surface), PageId(id)))
                .or_default() += n;
        }
        Ok(stats)
    }
}

#[derive(Debug, Default)]
pub struct IngestOutput {
    pub stats: IngestStats,
    pub anchor_stats: Option<AnchorStats>,
}

/// Plain body and explicit anchors of a page.
pub(crate) fn page_anchors(page: &PageRecord) -> (String, AnchorScan) {
    let body = strip_markup(&page.wikitext);
    let scan = extract_anchors(&body);
    (body, scan)
}

struct Rendered {
    line: String,
    tokens: u64,
    explicit: u64,
    heuristic: u64,
    malformed: u64,
    anchor_stats: Option<AnchorStats>,
}

fn render_page(page: &PageRecord, catalog: &PageCatalog, opts: &IngestOptions) -> Rendered {
    let (body, scan) = page_anchors(page);
    let explicit = scan.anchors.len() as u64;

    let anchor_stats = opts.collect_anchor_stats.then(|| {
        let mut stats = AnchorStats::default();
        for a in &scan.anchors {
            if let Some(id) = catalog
                .redirects
                .resolve(&a.target_title)
                .filter(|id| catalog.kept.contains(id))
            {
                stats.add(&a.surface_text, id);
            }
        }
        stats
    });

    let anchors = match opts.mode {
        CorpusMode::Heuristic => apply_title_heuristic(&page.title, &body, scan.anchors),
        _ => scan.anchors,
    };
    let heuristic = anchors
        .iter()
        .filter(|a| a.provenance == Provenance::Heuristic)
        .count() as u64;
    let line = render_line(
        page.page_id,
        &body,
        &anchors,
        &catalog.redirects,
        &catalog.kept,
        opts.mode,
    );
    Rendered {
        tokens: line.tokens.len() as u64,
        line: line.to_string(),
        explicit,
        heuristic,
        malformed: scan.malformed as u64,
        anchor_stats,
    }
}

/// Second pass: renders one line per kept page of `dump` into `out`.
pub fn write_corpus<R: BufRead, W: Write>(
    catalog: &PageCatalog,
    dump: R,
    mut out: W,
    opts: &IngestOptions,
) -> Result<IngestOutput> {
    let pool = if opts.ordered || opts.workers <= 1 {
        None
    } else {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.workers)
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?,
        )
    };

    let diagnostics = catalog.redirects.diagnostics();
    let mut output = IngestOutput {
        stats: IngestStats {
            redirect_cycles: diagnostics.cycles,
            redirects_missing: diagnostics.missing_targets,
            ..IngestStats::default()
        },
        anchor_stats: opts.collect_anchor_stats.then(AnchorStats::default),
    };

    let mut batch: Vec<PageRecord> = Vec::with_capacity(BATCH_PAGES);
    let mut flush = |batch: &mut Vec<PageRecord>, output: &mut IngestOutput| -> Result<()> {
        let rendered: Vec<Rendered> = match &pool {
            Some(pool) => pool.install(|| {
                batch
                    .par_iter()
                    .map(|p| render_page(p, catalog, opts))
                    .collect()
            }),
            None => batch
                .iter()
                .map(|p| render_page(p, catalog, opts))
                .collect(),
        };
        for r in rendered {
            out.write_all(r.line.as_bytes())?;
            out.write_all(b"\n")?;
            let stats = &mut output.stats;
            stats.pages_kept += 1;
            stats.tokens_emitted += r.tokens;
            stats.anchors_explicit += r.explicit;
            stats.anchors_heuristic += r.heuristic;
            stats.malformed_links += r.malformed;
            if let (Some(total), Some(part)) = (output.anchor_stats.as_mut(), r.anchor_stats) {
                total.merge(part);
            }
        }
        batch.clear();
        Ok(())
    };

    for page in stream_pages(dump) {
        let page = page?;
        output.stats.pages_seen += 1;
        if !catalog.kept.contains(&page.page_id) {
            continue;
        }
        batch.push(page);
        if batch.len() == BATCH_PAGES {
            flush(&mut batch, &mut output)?;
        }
    }
    flush(&mut batch, &mut output)?;
    out.flush()?;
    Ok(output)
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::file(path, e))
}

/// Two-pass ingest of the dump at `dump` into a corpus file at `out`.
pub fn build_corpus(dump: &Path, out: &Path, opts: &IngestOptions) -> Result<IngestOutput> {
    let catalog = scan_catalog(open(dump)?)?;
    let file = File::create(out).map_err(|e| Error::file(out, e))?;
    write_corpus(&catalog, open(dump)?, BufWriter::new(file), opts)
}
