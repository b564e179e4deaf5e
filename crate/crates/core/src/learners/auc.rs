use crate::error::{Error, Result};

/// Area under the ROC curve of `scores` for `value` against every other
/// class, via the rank-sum statistic with tied scores given their mean rank.
pub fn roc_auc(scores: &[f64], targets: &[u32], value: u32) -> Result<f64> {
    if scores.len() != targets.len() {
        return Err(Error::DimensionMismatch(scores.len(), targets.len()));
    }
    let pos = targets.iter().filter(|&&t| t == value).count();
    let neg = targets.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedAuc);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // twice the rank sum keeps tied mean ranks integral
    let mut rank_sum2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let mean2 = (i + 1 + j + 1) as u128;
        let hits = order[i..=j]
            .iter()
            .filter(|&&k| targets[k] == value)
            .count() as u128;
        rank_sum2 += mean2 * hits;
        i = j + 1;
    }
    let (pos, neg) = (pos as u128, neg as u128);
    let u2 = rank_sum2 - pos * (pos + 1);
    Ok(u2 as f64 / (2 * pos * neg) as f64)
}
