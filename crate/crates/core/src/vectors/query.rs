use std::cmp::Ordering;

use super::VectorSet;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Neighbor {
    pub token: String,
    pub cosine: f64,
}

fn dot(a: &[f32], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * y).sum()
}

/// Cosine similarity; `None` when either vector has zero norm.
pub fn cosine(a: &[f32], b: &[f32]) -> Option<f64> {
    let (mut ab, mut aa, mut bb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (f64::from(x), f64::from(y));
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    (aa > 0.0 && bb > 0.0).then(|| ab / (aa.sqrt() * bb.sqrt()))
}

/// Higher score first, then lexicographic token order.
fn rank_order(set: &VectorSet, a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    b.1.total_cmp(&a.1)
        .then_with(|| set.token(a.0).cmp(set.token(b.0)))
}

/// Exhaustive cosine top-k over rows `0..limit`, skipping rows for which
/// `skip` holds and rows with zero norm.
pub(crate) fn nearest_indices(
    set: &VectorSet,
    query: &[f64],
    k: usize,
    limit: usize,
    skip: impl Fn(usize) -> bool,
) -> Vec<(usize, f64)> {
    let q_norm = query.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut scored: Vec<(usize, f64)> = (0..limit.min(set.len()))
        .filter(|&i| !skip(i) && set.norm(i) > 0.0)
        .map(|i| (i, dot(set.row(i), query) / (set.norm(i) * q_norm)))
        .collect();
    if k == 0 {
        return Vec::new();
    }
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, |a, b| rank_order(set, a, b));
        scored.truncate(k);
    }
    scored.sort_by(|a, b| rank_order(set, a, b));
    scored
}

/// Top-`k` tokens by cosine similarity to `query`, excluding `exclude`.
pub fn nearest(
    set: &VectorSet,
    query: &[f32],
    k: usize,
    exclude: &[&str],
) -> Result<Vec<Neighbor>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if query.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: query.len(),
        });
    }
    let query: Vec<f64> = query.iter().map(|&x| f64::from(x)).collect();
    if query.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroQuery);
    }
    let excluded: Vec<usize> = exclude.iter().filter_map(|t| set.index_of(t)).collect();
    Ok(
        nearest_indices(set, &query, k, set.len(), |i| excluded.contains(&i))
            .into_iter()
            .map(|(i, cosine)| Neighbor {
                token: set.token(i).to_string(),
                cosine,
            })
            .collect(),
    )
}

/// Best answer to `a : b :: c : ?` among rows `0..limit`, by cosine with
/// `V_b - V_a + V_c`, never returning one of the three query rows.
pub(crate) fn analogy_index(
    set: &VectorSet,
    a: usize,
    b: usize,
    c: usize,
    limit: usize,
) -> Option<usize> {
    let query: Vec<f64> = set
        .row(a)
        .iter()
        .zip(set.row(b))
        .zip(set.row(c))
        .map(|((&va, &vb), &vc)| f64::from(vb) - f64::from(va) + f64::from(vc))
        .collect();
    if query.iter().all(|&x| x == 0.0) {
        return None;
    }
    nearest_indices(set, &query, 1, limit, |i| i == a || i == b || i == c)
        .first()
        .map(|&(i, _)| i)
}

/// Answers `a is to b as c is to ?`.
pub fn analogy_query(set: &VectorSet, a: &str, b: &str, c: &str) -> Result<String> {
    let lookup: Vec<Option<usize>> = [a, b, c].iter().map(|t| set.index_of(t)).collect();
    let missing: Vec<String> = [a, b, c]
        .iter()
        .zip(&lookup)
        .filter(|(_, i)| i.is_none())
        .map(|(t, _)| t.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::NotInVocabulary(missing));
    }
    let (ia, ib, ic) = (lookup[0].unwrap(), lookup[1].unwrap(), lookup[2].unwrap());
    analogy_index(set, ia, ib, ic, set.len())
        .map(|i| set.token(i).to_string())
        .ok_or(Error::ZeroQuery)
}
