use crate::{Error, Result};

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Ranks start+1 ..= end.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman's rank correlation with average ranks for ties.
///
/// Fails when the inputs differ in length, have fewer than two elements,
/// or either is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidConfig(format!(
            "spearman inputs differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Undefined(
            "rank correlation needs at least two pairs",
        ));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Undefined("rank correlation of NaN values"));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    // Both rank vectors have mean (n + 1) / 2.
    let mean = (x.len() + 1) as f64 / 2.0;
    let (mut cov, mut vx, mut vy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (a - mean, b - mean);
        cov += da * db;
        vx += da * da;
        vy += db * db;
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::Undefined("rank correlation of a constant sequence"));
    }
    let rho = if vx == vy {
        cov / vx
    } else {
        cov / (vx * vy).sqrt()
    };
    Ok(rho.clamp(-1.0, 1.0))
}
