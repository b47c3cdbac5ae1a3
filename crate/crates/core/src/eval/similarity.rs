use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

use super::{spearman, SenseIndex};
use crate::vectors::{cosine, VectorSet};
use crate::wiki::{concept_token, surface_key};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimilarityPair {
    pub first: String,
    pub second: String,
    pub score: f64,
}

/// A named list of human-scored pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimilarityDataset {
    pub name: String,
    pub pairs: Vec<SimilarityPair>,
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Reads `term<TAB>term<TAB>score` lines (commas or plain whitespace also
/// accepted). A first line whose score does not parse is taken as a column
/// header; `#` lines are comments. Terms are normalized like anchor
/// surfaces: lowercase, single spaces.
pub fn read_similarity_pairs<R: BufRead>(input: R) -> Result<Vec<SimilarityPair>> {
    let mut pairs = Vec::new();
    let mut first_data_line = true;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = split_fields(trimmed);
        let parsed = match fields.as_slice() {
            [a, b, score] if !a.is_empty() && !b.is_empty() => score
                .parse::<f64>()
                .ok()
                .filter(|s| s.is_finite())
                .map(|s| (a, b, s)),
            _ => None,
        };
        let header = std::mem::replace(&mut first_data_line, false);
        match parsed {
            Some((a, b, score)) => pairs.push(SimilarityPair {
                first: surface_key(a),
                second: surface_key(b),
                score,
            }),
            None if header => {}
            None => {
                return Err(Error::format(
                    i + 1,
                    "expected two terms and a numeric score",
                ));
            }
        }
    }
    Ok(pairs)
}

/// Loads a dataset, naming it after the file stem.
pub fn load_similarity_pairs(path: &Path) -> Result<SimilarityDataset> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    Ok(SimilarityDataset {
        name: path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        pairs: read_similarity_pairs(BufReader::new(file))?,
    })
}

/// A relatedness measure over surface terms. `None` means the pair is not
/// covered.
pub trait PairScorer: Sync {
    fn score(&self, first: &str, second: &str, senses: &SenseIndex) -> Option<f64>;
}

/// Cosine similarity over a vector set. A term becomes the concept token of
/// its most frequent sense when it has one, and otherwise the word itself
/// (spaces joined by `_`); lookup ignores case.
pub struct VectorScorer<'a> {
    set: &'a VectorSet,
    folded: HashMap<String, usize>,
}

impl<'a> VectorScorer<'a> {
    pub fn new(set: &'a VectorSet) -> Self {
        VectorScorer {
            set,
            folded: set.case_folded_index(),
        }
    }

    fn row(&self, term: &str, senses: &SenseIndex) -> Option<&[f32]> {
        let token = match senses.lookup(term) {
            Some(id) => concept_token(id),
            None => surface_key(term).replace(' ', "_"),
        };
        self.folded.get(&token).map(|&i| self.set.row(i))
    }
}

impl PairScorer for VectorScorer<'_> {
    fn score(&self, first: &str, second: &str, senses: &SenseIndex) -> Option<f64> {
        cosine(self.row(first, senses)?, self.row(second, senses)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub dataset: String,
    pub pairs_total: usize,
    pub not_found: usize,
    /// Spearman correlation over found pairs; absent when undefined.
    pub rho: Option<f64>,
}

fn rho_of(scored: &[(f64, f64)]) -> Option<f64> {
    let (system, human): (Vec<f64>, Vec<f64>) = scored.iter().copied().unzip();
    spearman(&system, &human).ok()
}

pub fn eval_similarity_with(
    scorer: &dyn PairScorer,
    dataset: &SimilarityDataset,
    senses: &SenseIndex,
) -> SimilarityReport {
    let scored: Vec<(f64, f64)> = dataset
        .pairs
        .iter()
        .filter_map(|p| {
            scorer
                .score(&p.first, &p.second, senses)
                .map(|s| (s, p.score))
        })
        .collect();
    SimilarityReport {
        dataset: dataset.name.clone(),
        pairs_total: dataset.pairs.len(),
        not_found: dataset.pairs.len() - scored.len(),
        rho: rho_of(&scored),
    }
}

/// Spearman correlation between cosine similarity and human scores.
pub fn eval_similarity(
    set: &VectorSet,
    dataset: &SimilarityDataset,
    senses: &SenseIndex,
) -> SimilarityReport {
    eval_similarity_with(&VectorScorer::new(set), dataset, senses)
}

/// Correlations on the pairs every scorer covers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommonSubsetRow {
    pub dataset: String,
    pub pairs_total: usize,
    pub pairs_common: usize,
    /// One entry per scorer, in input order.
    pub rho: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommonSubsetTable {
    pub scorers: Vec<String>,
    pub rows: Vec<CommonSubsetRow>,
    /// Datasets left out because fewer than two pairs were common.
    pub skipped: Vec<String>,
    /// Per-scorer mean of the defined correlations over the rows.
    pub average: Vec<Option<f64>>,
}

/// Restricts each dataset to the pairs found by every scorer and
/// correlates each scorer on that shared subset.
pub fn common_subset_eval(
    scorers: &[(&str, &dyn PairScorer)],
    datasets: &[SimilarityDataset],
    senses: &SenseIndex,
) -> Result<CommonSubsetTable> {
    if scorers.len() < 2 {
        return Err(Error::InvalidConfig(
            "common-subset evaluation needs at least two scorers".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for dataset in datasets {
        let scores: Vec<Vec<Option<f64>>> = scorers
            .iter()
            .map(|(_, s)| {
                dataset
                    .pairs
                    .iter()
                    .map(|p| s.score(&p.first, &p.second, senses))
                    .collect()
            })
            .collect();
        let common: Vec<usize> = (0..dataset.pairs.len())
            .filter(|&i| scores.iter().all(|s| s[i].is_some()))
            .collect();
        if common.len() < 2 {
            skipped.push(dataset.name.clone());
            continue;
        }
        let rho = scores
            .iter()
            .map(|s| {
                let scored: Vec<(f64, f64)> = common
                    .iter()
                    .map(|&i| (s[i].expect("common pair"), dataset.pairs[i].score))
                    .collect();
                rho_of(&scored)
            })
            .collect();
        rows.push(CommonSubsetRow {
            dataset: dataset.name.clone(),
            pairs_total: dataset.pairs.len(),
            pairs_common: common.len(),
            rho,
        });
    }
    let average = (0..scorers.len())
        .map(|k| {
            let defined: Vec<f64> = rows.iter().filter_map(|r| r.rho[k]).collect();
            (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
        })
        .collect();
    Ok(CommonSubsetTable {
        scorers: scorers.iter().map(|(n, _)| n.to_string()).collect(),
        rows,
        skipped,
        average,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::build_sense_index;
    use crate::wiki::PageId;

    fn dataset(lines: &str) -> SimilarityDataset {
        SimilarityDataset {
            name: "fixture".into(),
            pairs: read_similarity_pairs(lines.as_bytes()).unwrap(),
        }
    }

    /// Unit vectors at increasing angles from `base`.
    fn fan() -> VectorSet {
        let mut s = VectorSet::new(2);
        for (i, t) in ["base", "w1", "w2", "w3", "w4"].iter().enumerate() {
            let angle = i as f32 * 0.3;
            s.push(*t, &[angle.cos(), angle.sin()]).unwrap();
        }
        s
    }

    #[test]
    fn parses_separators_and_header() {
        let pairs = read_similarity_pairs(
            "Word 1,Word 2,Human (mean)\ntiger,cat,7.35\n# note\nNew  York\tcity\t6\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[1].first, "new york");
        assert_eq!(pairs[1].score, 6.0);
        assert!(read_similarity_pairs("a b 1\nc d\n".as_bytes()).is_err());
    }

    #[test]
    fn perfect_and_reversed_agreement() {
        let senses = SenseIndex::default();
        let agree = dataset("base w1 10\nbase w2 8\nbase w3 5\nbase w4 1\n");
        assert_eq!(eval_similarity(&fan(), &agree, &senses).rho, Some(1.0));
        let reverse = dataset("base w1 1\nbase w2 5\nbase w3 8\nbase w4 10\n");
        assert_eq!(eval_similarity(&fan(), &reverse, &senses).rho, Some(-1.0));
    }

    #[test]
    fn not_found_accounting() {
        let r = eval_similarity(
            &fan(),
            &dataset("base w1 3\nbase nope 2\nzip w2 1\n"),
            &SenseIndex::default(),
        );
        assert_eq!((r.pairs_total, r.not_found), (3, 2));
        assert_eq!(r.rho, None);
    }

    #[test]
    fn sense_mapping_replaces_words_with_concepts() {
        let mut s = fan();
        s.push("wiki_7", &[0.0, -1.0]).unwrap();
        let senses = build_sense_index([("jaguar", PageId(7), 3)]);
        // "jaguar" is only reachable through its concept token.
        let r = eval_similarity(
            &s,
            &dataset("jaguar base 1\nw1 base 5\nw2 base 4\n"),
            &senses,
        );
        assert_eq!(r.not_found, 0);
        assert_eq!(r.rho, Some(1.0));
    }

    #[test]
    fn common_subset_over_shared_pairs() {
        let full = fan();
        let mut partial_a = VectorSet::new(2);
        let mut partial_b = VectorSet::new(2);
        for (t, v) in full.iter() {
            if t != "w4" {
                partial_a.push(t, v).unwrap();
            }
            if t != "w1" {
                partial_b.push(t, v).unwrap();
            }
        }
        let data = [dataset(
            "base w1 9\nbase w2 7\nbase w3 1\nbase w4 0\nw2 w3 8\n",
        )];
        let (a, b) = (VectorScorer::new(&partial_a), VectorScorer::new(&partial_b));
        let senses = SenseIndex::default();
        let table = common_subset_eval(&[("a", &a), ("b", &b)], &data, &senses).unwrap();
        // Pair 1 lacks w1 in b, pair 4 lacks w4 in a: pairs 2, 3 and 5 remain.
        assert_eq!(table.rows[0].pairs_common, 3);
        let shared = dataset("base w2 7\nbase w3 1\nw2 w3 8\n");
        let expected = eval_similarity(&full, &shared, &senses).rho;
        assert_eq!(table.rows[0].rho, vec![expected, expected]);
        assert_eq!(table.average, vec![expected, expected]);

        let empty = VectorSet::new(2);
        let none = VectorScorer::new(&empty);
        let table = common_subset_eval(&[("a", &a), ("none", &none)], &data, &senses).unwrap();
        assert!(table.rows.is_empty());
        assert_eq!(table.skipped, ["fixture"]);
    }
}
