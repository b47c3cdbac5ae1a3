//! Link-overlap relatedness between pages.
//!
//! For two pages with link sets `A` and `B` (in-links or out-links) over a
//! graph of `N` pages:
//!
//! ```text
//! sim = 1 - (ln max(|A|,|B|) - ln |A∩B|) / (ln N - ln min(|A|,|B|))
//! ```
//!
//! clamped to `[0, 1]`, taken as 0 when either set or the intersection is
//! empty. The in-link and out-link scores are averaged.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eval::{PairScorer, SenseIndex};
use crate::wiki::{open, page_anchors, scan_catalog, stream_pages, PageId};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"WVLINKS1";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Adjacency {
    ins: Vec<PageId>,
    outs: Vec<PageId>,
}

/// Directed page graph with sorted, duplicate-free adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinkGraph {
    pages: HashMap<PageId, Adjacency>,
    edge_count: u64,
}

/// Contents of the JSON file written next to a saved graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub page_count: u64,
    pub edge_count: u64,
}

impl LinkGraph {
    /// Builds a graph over `pages`. Self-links and repeated edges are
    /// dropped; an edge endpoint outside `pages` is an error.
    pub fn from_edges(
        pages: impl IntoIterator<Item = PageId>,
        edges: impl IntoIterator<Item = (PageId, PageId)>,
    ) -> Result<Self> {
        let mut adjacency: HashMap<PageId, (BTreeSet<PageId>, BTreeSet<PageId>)> =
            pages.into_iter().map(|p| (p, Default::default())).collect();
        for (from, to) in edges {
            for id in [from, to] {
                if !adjacency.contains_key(&id) {
                    return Err(Error::UnknownPage(id));
                }
            }
            if from == to {
                continue;
            }
            adjacency.get_mut(&from).expect("checked").1.insert(to);
            adjacency.get_mut(&to).expect("checked").0.insert(from);
        }
        let mut edge_count = 0;
        let pages = adjacency
            .into_iter()
            .map(|(id, (ins, outs))| {
                edge_count += outs.len() as u64;
                (
                    id,
                    Adjacency {
                        ins: ins.into_iter().collect(),
                        outs: outs.into_iter().collect(),
                    },
                )
            })
            .collect();
        Ok(LinkGraph { pages, edge_count })
    }

    /// One edge per explicit anchor from a kept page to a different kept
    /// page, after redirect resolution.
    pub fn from_dump(dump: &Path) -> Result<Self> {
        let catalog = scan_catalog(open(dump)?)?;
        let mut edges = Vec::new();
        for page in stream_pages(open(dump)?) {
            let page = page?;
            if !catalog.kept.contains(&page.page_id) {
                continue;
            }
            let (_, scan) = page_anchors(&page);
            for anchor in scan.anchors {
                if let Some(target) = catalog
                    .redirects
                    .resolve(&anchor.target_title)
                    .filter(|id| catalog.kept.contains(id))
                {
                    edges.push((page.page_id, target));
                }
            }
        }
        Self::from_edges(catalog.kept.iter().copied(), edges)
    }

    pub fn page_count(&self) -> u64 {
        self.pages.len() as u64
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn contains(&self, id: PageId) -> bool {
        self.pages.contains_key(&id)
    }

    pub fn in_links(&self, id: PageId) -> Option<&[PageId]> {
        self.pages.get(&id).map(|a| a.ins.as_slice())
    }

    pub fn out_links(&self, id: PageId) -> Option<&[PageId]> {
        self.pages.get(&id).map(|a| a.outs.as_slice())
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            page_count: self.page_count(),
            edge_count: self.edge_count,
        }
    }

    /// Binary layout, all integers u64 little-endian: magic, page count,
    /// edge count, sorted page ids, then (from, to) pairs.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let sorted: BTreeMap<PageId, &Adjacency> =
            self.pages.iter().map(|(k, v)| (*k, v)).collect();
        out.write_all(MAGIC)?;
        out.write_all(&self.page_count().to_le_bytes())?;
        out.write_all(&self.edge_count.to_le_bytes())?;
        for id in sorted.keys() {
            out.write_all(&id.0.to_le_bytes())?;
        }
        for (from, adj) in &sorted {
            for to in &adj.outs {
                out.write_all(&from.0.to_le_bytes())?;
                out.write_all(&to.0.to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let bad = |what: &str| Error::InvalidConfig(format!("link graph file: {what}"));
        let mut magic = [0u8; 8];
        input
            .read_exact(&mut magic)
            .map_err(|_| bad("missing header"))?;
        if &magic != MAGIC {
            return Err(bad("unrecognized header"));
        }
        let mut next = || -> Result<u64> {
            let mut word = [0u8; 8];
            input.read_exact(&mut word).map_err(|_| bad("truncated"))?;
            Ok(u64::from_le_bytes(word))
        };
        let page_count = next()?;
        let edge_count = next()?;
        let pages = (0..page_count)
            .map(|_| next().map(PageId))
            .collect::<Result<Vec<_>>>()?;
        let edges = (0..edge_count)
            .map(|_| Ok((PageId(next()?), PageId(next()?))))
            .collect::<Result<Vec<_>>>()?;
        let graph = Self::from_edges(pages, edges)?;
        if graph.page_count() != page_count || graph.edge_count != edge_count {
            return Err(bad("duplicate pages or edges"));
        }
        Ok(graph)
    }

    /// Path of the JSON summary written beside `path`.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        let mut name = path.as_os_str().to_owned();
        name.push(".json");
        PathBuf::from(name)
    }

    /// Writes the binary graph to `path` and its summary to
    /// [`LinkGraph::sidecar_path`].
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::file(path, e))?;
        self.write_binary(BufWriter::new(file))?;
        let sidecar = Self::sidecar_path(path);
        let json = serde_json::to_string_pretty(&self.summary()).expect("plain struct");
        std::fs::write(&sidecar, json + "\n").map_err(|e| Error::file(&sidecar, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::file(path, e))?;
        Self::read_binary(BufReader::new(file))
    }
}

fn intersection_size(a: &[PageId], b: &[PageId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Relatedness of two link sets in a graph of `n` pages.
pub fn overlap_relatedness(size_a: usize, size_b: usize, common: usize, n: u64) -> f64 {
    if size_a == 0 || size_b == 0 || common == 0 {
        return 0.0;
    }
    let (lo, hi) = (size_a.min(size_b) as f64, size_a.max(size_b) as f64);
    let denominator = (n as f64).ln() - lo.ln();
    if denominator <= 0.0 {
        return 1.0;
    }
    (1.0 - (hi.ln() - (common as f64).ln()) / denominator).clamp(0.0, 1.0)
}

fn side(a: &[PageId], b: &[PageId], n: u64) -> f64 {
    overlap_relatedness(a.len(), b.len(), intersection_size(a, b), n)
}

/// Mean of the in-link and out-link relatedness of two pages.
pub fn link_similarity(graph: &LinkGraph, a: PageId, b: PageId) -> Result<f64> {
    let pa = graph.pages.get(&a).ok_or(Error::UnknownPage(a))?;
    let pb = graph.pages.get(&b).ok_or(Error::UnknownPage(b))?;
    let n = graph.page_count();
    Ok((side(&pa.ins, &pb.ins, n) + side(&pa.outs, &pb.outs, n)) / 2.0)
}

/// Terms are mapped to pages by most frequent sense; terms without a sense
/// are not covered.
impl PairScorer for LinkGraph {
    fn score(&self, first: &str, second: &str, senses: &SenseIndex) -> Option<f64> {
        link_similarity(self, senses.lookup(first)?, senses.lookup(second)?).ok()
    }
}
