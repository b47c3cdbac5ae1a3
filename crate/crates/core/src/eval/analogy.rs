use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::vectors::{analogy_index, VectorSet};
use crate::{Error, Result};

/// `a` is to `b` as `c` is to `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalogyQuestion {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
    pub section: String,
}

/// Reads questions: `: section` header lines, otherwise exactly four
/// whitespace-separated tokens. Tokens are lowercased.
pub fn read_analogy_questions<R: BufRead>(input: R) -> Result<Vec<AnalogyQuestion>> {
    let mut section = String::new();
    let mut questions = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix(':') {
            section = name.trim().to_string();
            continue;
        }
        let tokens: Vec<String> = trimmed.split_whitespace().map(str::to_lowercase).collect();
        let [a, b, c, d]: [String; 4] = tokens.try_into().map_err(|t: Vec<String>| {
            Error::format(i + 1, format!("expected 4 tokens, found {}", t.len()))
        })?;
        questions.push(AnalogyQuestion {
            a,
            b,
            c,
            d,
            section: section.clone(),
        });
    }
    Ok(questions)
}

pub fn load_analogy_questions(path: &Path) -> Result<Vec<AnalogyQuestion>> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    read_analogy_questions(BufReader::new(file))
}

/// Scores for one vocabulary cap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalogyReport {
    /// Only the `bucket` most frequent tokens are used.
    pub bucket: usize,
    pub total: usize,
    /// Questions whose four tokens all lie within the cap.
    pub found: usize,
    pub correct: usize,
    /// `correct / found`; absent when nothing was found.
    pub accuracy: Option<f64>,
}

impl AnalogyReport {
    fn new(bucket: usize, total: usize, found: usize, correct: usize) -> Self {
        AnalogyReport {
            bucket,
            total,
            found,
            correct,
            accuracy: (found > 0).then(|| correct as f64 / found as f64),
        }
    }

    /// Accuracy as a percentage rounded to one decimal.
    pub fn accuracy_percent(&self) -> Option<f64> {
        self.accuracy.map(|a| (a * 1000.0).round() / 10.0)
    }
}

/// Case-insensitive lookup restricted to the `cap` most frequent rows.
struct CappedLookup<'a> {
    set: &'a VectorSet,
    folded: HashMap<String, usize>,
}

impl<'a> CappedLookup<'a> {
    fn new(set: &'a VectorSet) -> Result<Self> {
        if !set.is_ranked() {
            return Err(Error::MissingFrequencyRank);
        }
        Ok(CappedLookup {
            set,
            folded: set.case_folded_index(),
        })
    }

    fn index(&self, token: &str, cap: usize) -> Option<usize> {
        self.folded.get(token).copied().filter(|&i| i < cap)
    }

    /// `None` when the question is not found under `cap`, otherwise
    /// whether the answer was right.
    fn outcome(&self, q: &AnalogyQuestion, cap: usize) -> Option<bool> {
        let a = self.index(&q.a, cap)?;
        let b = self.index(&q.b, cap)?;
        let c = self.index(&q.c, cap)?;
        self.index(&q.d, cap)?;
        let answer = analogy_index(self.set, a, b, c, cap);
        Some(answer.is_some_and(|i| self.set.token(i).to_lowercase() == q.d))
    }

    fn outcomes(&self, questions: &[AnalogyQuestion], cap: usize) -> Vec<Option<bool>> {
        questions.par_iter().map(|q| self.outcome(q, cap)).collect()
    }
}

fn report(bucket: usize, outcomes: &[Option<bool>], mask: Option<&[bool]>) -> AnalogyReport {
    let (mut found, mut correct) = (0, 0);
    for (i, o) in outcomes.iter().enumerate() {
        if mask.is_some_and(|m| !m[i]) {
            continue;
        }
        if let Some(ok) = o {
            found += 1;
            correct += usize::from(*ok);
        }
    }
    AnalogyReport::new(bucket, outcomes.len(), found, correct)
}

/// One report per bucket. A bucket caps both the tokens a question may use
/// and the candidate answers to the `bucket` most frequent entries.
pub fn eval_analogy(
    set: &VectorSet,
    questions: &[AnalogyQuestion],
    buckets: &[usize],
) -> Result<Vec<AnalogyReport>> {
    let lookup = CappedLookup::new(set)?;
    Ok(buckets
        .iter()
        .map(|&cap| report(cap, &lookup.outcomes(questions, cap), None))
        .collect())
}

/// Scores every set only on the questions found by all sets, per bucket.
/// The outer result has one entry per set, each with one report per bucket.
pub fn eval_analogy_commons(
    sets: &[&VectorSet],
    questions: &[AnalogyQuestion],
    buckets: &[usize],
) -> Result<Vec<Vec<AnalogyReport>>> {
    if sets.len() < 2 {
        return Err(Error::InvalidConfig(
            "common-question scoring needs at least two vector sets".into(),
        ));
    }
    let lookups = sets
        .iter()
        .map(|s| CappedLookup::new(s))
        .collect::<Result<Vec<_>>>()?;
    let mut reports = vec![Vec::with_capacity(buckets.len()); sets.len()];
    for &cap in buckets {
        let outcomes: Vec<Vec<Option<bool>>> =
            lookups.iter().map(|l| l.outcomes(questions, cap)).collect();
        let common: Vec<bool> = (0..questions.len())
            .map(|i| outcomes.iter().all(|o| o[i].is_some()))
            .collect();
        for (per_set, o) in reports.iter_mut().zip(&outcomes) {
            per_set.push(report(cap, o, Some(&common)));
        }
    }
    Ok(reports)
}
