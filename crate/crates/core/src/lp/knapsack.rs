//! Profit-scaling knapsack FPTAS used for column pricing.

use crate::instance::ItemId;

/// A subset of `items` fitting in `capacity` whose profit is at least
/// `(1 - eps)` times the best possible.
pub fn knapsack_fptas(
    profits: &[f64],
    weights: &[i128],
    items: &[ItemId],
    capacity: i128,
    eps: f64,
) -> Vec<ItemId> {
    let cand: Vec<ItemId> = items
        .iter()
        .copied()
        .filter(|&i| profits[i] > 0.0 && weights[i] <= capacity)
        .collect();
    if cand.is_empty() {
        return Vec::new();
    }
    let pmax = cand.iter().map(|&i| profits[i]).fold(0.0, f64::max);
    let unit = eps.max(1e-6) * pmax / cand.len() as f64;
    let scaled: Vec<usize> = cand.iter().map(|&i| (profits[i] / unit).floor() as usize).collect();
    let total: usize = scaled.iter().sum();

    // min_weight[p]: least weight reaching scaled profit exactly p.
    let mut min_weight = vec![i128::MAX; total + 1];
    min_weight[0] = 0;
    let words = (total + 1).div_ceil(64);
    let mut took = vec![vec![0u64; words]; cand.len()];
    let mut reach = 0usize;
    for (k, &i) in cand.iter().enumerate() {
        let q = scaled[k];
        let w = weights[i];
        for p in (q..=reach + q).rev() {
            let prev = min_weight[p - q];
            if prev == i128::MAX {
                continue;
            }
            let cand_w = prev + w;
            if cand_w <= capacity && cand_w < min_weight[p] {
                min_weight[p] = cand_w;
                took[k][p / 64] |= 1 << (p % 64);
            }
        }
        reach += q;
    }
    let mut p = (0..=total).rev().find(|&p| min_weight[p] <= capacity).unwrap_or(0);
    let mut chosen = Vec::new();
    for k in (0..cand.len()).rev() {
        if took[k][p / 64] >> (p % 64) & 1 == 1 {
            chosen.push(cand[k]);
            p -= scaled[k];
        }
    }
    // Anything that still fits only adds profit.
    let mut load: i128 = chosen.iter().map(|&i| weights[i]).sum();
    let mut rest: Vec<ItemId> = cand.iter().copied().filter(|i| !chosen.contains(i)).collect();
    rest.sort_by(|&a, &b| profits[b].total_cmp(&profits[a]).then(a.cmp(&b)));
    for i in rest {
        if load + weights[i] <= capacity {
            load += weights[i];
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    chosen
}
