//! Heavy/light classification, μ-grouping of heavy items and the packing
//! procedures built on it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::ItemId;
use crate::lp::point::ConfigWeights;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ItemClass {
    /// `w <= μ W`.
    Light,
    /// `μ W < w <= W`.
    Heavy,
    /// `w > W`.
    Oversized,
}

pub fn classify(w: i128, capacity: i128, mu: f64) -> ItemClass {
    if w > capacity {
        ItemClass::Oversized
    } else if (w as f64) <= mu * capacity as f64 {
        ItemClass::Light
    } else {
        ItemClass::Heavy
    }
}

/// Heavy items split into consecutive groups of `ȳ`-mass at least `μ|K|`
/// (the last group may be lighter).
#[derive(Clone, Debug, PartialEq)]
pub struct Grouping {
    pub mu: f64,
    pub size: usize,
    /// Heavy items by weight descending, id ascending.
    pub heavy: Vec<ItemId>,
    /// End positions (exclusive) of each group within `heavy`.
    pub pivots: Vec<usize>,
    pub groups: Vec<Vec<ItemId>>,
    pub light: Vec<ItemId>,
    /// Group index per item, `None` for light or unusable items.
    pub group_of: Vec<Option<usize>>,
}

impl Grouping {
    pub fn tau(&self) -> usize {
        self.groups.len()
    }

    pub fn mass(&self, y: &[f64]) -> Vec<f64> {
        self.groups.iter().map(|g| g.iter().map(|&i| y[i]).sum()).collect()
    }
}

pub fn compute_grouping(y: &[f64], weights: &[i128], capacity: i128, size: usize, mu: f64) -> Grouping {
    let n = weights.len();
    let mut heavy: Vec<ItemId> = Vec::new();
    let mut light = Vec::new();
    for i in 0..n {
        match classify(weights[i], capacity, mu) {
            ItemClass::Heavy => heavy.push(i),
            ItemClass::Light => light.push(i),
            ItemClass::Oversized => {}
        }
    }
    heavy.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    let target = mu * size as f64;
    let mut pivots = Vec::new();
    let mut acc = 0.0;
    for (pos, &i) in heavy.iter().enumerate() {
        acc += y[i];
        if acc >= target - 1e-12 {
            pivots.push(pos + 1);
            acc = 0.0;
        }
    }
    if pivots.last().copied().unwrap_or(0) < heavy.len() {
        pivots.push(heavy.len());
    }
    let mut groups = Vec::new();
    let mut group_of = vec![None; n];
    let mut start = 0;
    for (k, &end) in pivots.iter().enumerate() {
        for &i in &heavy[start..end] {
            group_of[i] = Some(k);
        }
        groups.push(heavy[start..end].to_vec());
        start = end;
    }
    Grouping { mu, size, heavy, pivots, groups, light, group_of }
}

/// First-fit in the given order into `bins` of capacity `capacity`, opening
/// new bins as needed.
pub fn first_fit(weights: &[i128], items: &[ItemId], capacity: i128, bins: &mut Vec<Vec<ItemId>>) -> Result<()> {
    let mut loads: Vec<i128> = bins.iter().map(|b| b.iter().map(|&i| weights[i]).sum()).collect();
    for &i in items {
        let w = weights[i];
        if w > capacity {
            return Err(Error::Packing(format!("item {i} exceeds the capacity")));
        }
        match loads.iter().position(|&l| l + w <= capacity) {
            Some(b) => {
                loads[b] += w;
                bins[b].push(i);
            }
            None => {
                loads.push(w);
                bins.push(vec![i]);
            }
        }
    }
    Ok(())
}

/// First-fit decreasing (weight descending, id ascending).
pub fn ffd_bin_pack(weights: &[i128], items: &[ItemId], capacity: i128) -> Result<Vec<Vec<ItemId>>> {
    let mut order = items.to_vec();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    let mut bins = Vec::new();
    first_fit(weights, &order, capacity, &mut bins)?;
    Ok(bins)
}

/// Bin count guaranteed by [`pack_with_grouping`].
pub fn grouping_bin_bound(size: usize, delta: f64, mu: f64, lambda: f64) -> f64 {
    (1.0 - delta + 3.0 * mu) * size as f64 + 4.0 * 4f64.powf(mu.powi(-2)) + 2.0 * lambda
}

/// Packs `s` into bins of capacity `capacity` following the configuration
/// types of `z`: typed bins first, heavy items of group `k` in the slots of
/// group `k - 1`, light items by first-fit, group-one items alone.
pub fn pack_with_grouping(
    s: &[ItemId],
    grouping: &Grouping,
    z: &ConfigWeights,
    weights: &[i128],
    capacity: i128,
) -> Result<Vec<Vec<ItemId>>> {
    let tau = grouping.tau();
    let mut eta: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (config, &v) in &z.entries {
        let mut ty = vec![0usize; tau];
        for &i in config {
            if let Some(k) = grouping.group_of[i] {
                ty[k] += 1;
            }
        }
        *eta.entry(ty).or_insert(0.0) += v;
    }
    let mut types: Vec<Vec<usize>> = Vec::new();
    for (ty, v) in eta {
        let copies = (v - 1e-9).ceil().max(0.0) as usize;
        types.extend(std::iter::repeat_n(ty, copies));
    }
    let mut bins: Vec<Vec<ItemId>> = vec![Vec::new(); types.len()];
    let mut in_s = vec![false; weights.len()];
    for &i in s {
        in_s[i] = true;
        if weights[i] > capacity {
            return Err(Error::Packing(format!("item {i} exceeds the capacity")));
        }
    }
    for k in 1..tau {
        let mut used = vec![0usize; types.len()];
        for &i in grouping.groups[k].iter().filter(|&&i| in_s[i]) {
            let b = (0..types.len())
                .find(|&b| used[b] < types[b][k - 1])
                .ok_or_else(|| Error::Packing(format!("no slot left for group {k}")))?;
            used[b] += 1;
            bins[b].push(i);
        }
    }
    for b in &bins {
        if b.iter().map(|&i| weights[i]).sum::<i128>() > capacity {
            return Err(Error::Invariant("typed bin over capacity".into()));
        }
    }
    let mut light: Vec<ItemId> = grouping.light.iter().copied().filter(|&i| in_s[i]).collect();
    light.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    first_fit(weights, &light, capacity, &mut bins)?;
    if tau > 0 {
        for &i in grouping.groups[0].iter().filter(|&&i| in_s[i]) {
            bins.push(vec![i]);
        }
    }
    let placed: usize = bins.iter().map(|b| b.len()).sum();
    if placed != s.len() {
        return Err(Error::Packing("some items are neither light nor grouped".into()));
    }
    bins.retain(|b| !b.is_empty());
    Ok(bins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_boundaries() {
        assert_eq!(classify(5, 10, 0.5), ItemClass::Light);
        assert_eq!(classify(6, 10, 0.5), ItemClass::Heavy);
        assert_eq!(classify(10, 10, 0.5), ItemClass::Heavy);
        assert_eq!(classify(11, 10, 0.5), ItemClass::Oversized);
    }

    #[test]
    fn heavy_items_with_unit_mass_form_singletons() {
        // weights 0.9, 0.8, 0.7, 0.6 with capacity 1, |K| = 2, μ = 0.5
        let w = vec![9, 8, 7, 6];
        let g = compute_grouping(&[1.0; 4], &w, 10, 2, 0.5);
        assert_eq!(g.groups, vec![vec![0], vec![1], vec![2], vec![3]]);
        assert!(g.tau() as f64 <= 0.5f64.powi(-2) + 1.0);
    }

    #[test]
    fn no_heavy_items_means_no_groups() {
        let g = compute_grouping(&[1.0; 3], &[1, 2, 3], 10, 2, 0.5);
        assert_eq!(g.tau(), 0);
        assert_eq!(g.light, vec![0, 1, 2]);
    }

    #[test]
    fn groups_follow_weight_then_id() {
        let w = vec![6, 9, 6, 9];
        let g = compute_grouping(&[0.5; 4], &w, 10, 1, 0.5);
        assert_eq!(g.heavy, vec![1, 3, 0, 2]);
        assert_eq!(g.pivots, vec![1, 2, 3, 4]);
    }

    #[test]
    fn first_fit_five_items_of_04() {
        let w = vec![4; 5];
        let mut bins = Vec::new();
        first_fit(&w, &[0, 1, 2, 3, 4], 10, &mut bins).unwrap();
        assert_eq!(bins.len(), 3);
    }

    #[test]
    fn ffd_packs_six_items_of_035_in_three() {
        let bins = ffd_bin_pack(&[7; 6], &[0, 1, 2, 3, 4, 5], 20).unwrap();
        assert_eq!(bins.len(), 3);
    }

    #[test]
    fn grouped_packing_of_all_light_items_is_first_fit() {
        let w = vec![1, 1, 2];
        let g = compute_grouping(&[1.0; 3], &w, 10, 1, 0.5);
        let mut z = ConfigWeights::default();
        z.add(vec![0, 1, 2], 1.0);
        let bins = pack_with_grouping(&[0, 1, 2], &g, &z, &w, 10).unwrap();
        assert_eq!(bins.len(), 1);
    }
}
