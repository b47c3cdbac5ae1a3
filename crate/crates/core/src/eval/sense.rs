use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use crate::wiki::{surface_key, AnchorStats, PageId};
use crate::{Error, Result};

/// Most-frequent-sense map from a (lowercased) surface form to the concept
/// it links to most often.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SenseIndex {
    senses: HashMap<String, (PageId, u64)>,
}

impl SenseIndex {
    pub fn lookup(&self, surface: &str) -> Option<PageId> {
        self.senses.get(&surface_key(surface)).map(|&(id, _)| id)
    }

    /// The chosen concept and its anchor count.
    pub fn get(&self, surface: &str) -> Option<(PageId, u64)> {
        self.senses.get(&surface_key(surface)).copied()
    }

    pub fn len(&self) -> usize {
        self.senses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    pub fn from_anchor_stats(stats: &AnchorStats) -> Self {
        build_sense_index(stats.entries())
    }

    /// Reads anchor statistics as written by ingest (`surface<TAB>id<TAB>count`).
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::file(path, e))?;
        let stats = AnchorStats::read_tsv(BufReader::new(file))?;
        Ok(Self::from_anchor_stats(&stats))
    }
}

/// Builds the index from `(surface, target, count)` observations. Counts for
/// the same surface and target are summed; each surface then maps to the
/// target with the largest total, ties going to the smaller page id.
pub fn build_sense_index<'a, S>(
    observations: impl IntoIterator<Item = (S, PageId, u64)>,
) -> SenseIndex
where
    S: AsRef<str> + 'a,
{
    let mut totals: HashMap<(String, PageId), u64> = HashMap::new();
    for (surface, id, n) in observations {
        if n > 0 {
            *totals
                .entry((surface_key(surface.as_ref()), id))
                .or_default() += n;
        }
    }
    let mut senses: HashMap<String, (PageId, u64)> = HashMap::new();
    for ((surface, id), n) in totals {
        let best = senses.entry(surface).or_insert((id, n));
        if n > best.1 || (n == best.1 && id < best.0) {
            *best = (id, n);
        }
    }
    SenseIndex { senses }
}
