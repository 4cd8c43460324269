//! Exact reference solvers for small inputs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::{Assignment, Block, Instance, ItemId, Solution};
use crate::lp::simplex::Simplex;
use crate::num::rational_from_f64;
use crate::oracles::SetFunction;

/// Maximum-profit subset fitting in `capacity`, by a Pareto-front DP.
pub fn exact_knapsack(profits: &[f64], weights: &[i128], capacity: i128) -> (f64, Vec<ItemId>) {
    // (weight, profit, items), kept sorted by weight with strictly rising profit
    let mut front: Vec<(i128, f64, Vec<ItemId>)> = vec![(0, 0.0, Vec::new())];
    for i in 0..profits.len() {
        if profits[i] <= 0.0 || weights[i] > capacity {
            continue;
        }
        let mut merged: Vec<(i128, f64, Vec<ItemId>)> = front.clone();
        for (w, p, s) in &front {
            if w + weights[i] <= capacity {
                let mut s = s.clone();
                s.push(i);
                merged.push((w + weights[i], p + profits[i], s));
            }
        }
        merged.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)));
        front.clear();
        for state in merged {
            if front.last().is_none_or(|last| state.1 > last.1) {
                front.push(state);
            }
        }
    }
    let (_, p, s) = front.pop().expect("front is never empty");
    (p, s)
}

pub const BIN_PACK_MAX_ITEMS: usize = 16;

/// Minimum number of bins of capacity `capacity` holding `items`, with a packing.
pub fn exact_bin_pack(weights: &[i128], items: &[ItemId], capacity: i128) -> Result<Vec<Vec<ItemId>>> {
    let k = items.len();
    if k > BIN_PACK_MAX_ITEMS {
        return Err(Error::SizeLimit(format!("exact bin packing limited to {BIN_PACK_MAX_ITEMS} items")));
    }
    if items.iter().any(|&i| weights[i] > capacity) {
        return Err(Error::Packing("an item exceeds the bin capacity".into()));
    }
    let full = (1usize << k) - 1;
    // best[mask] = (bins used, load of the open bin); the open bin counts as used
    let mut best: Vec<(usize, i128)> = vec![(usize::MAX, 0); full + 1];
    let mut parent = vec![(0usize, 0usize); full + 1];
    best[0] = (1, 0);
    for mask in 0..=full {
        let (bins, load) = best[mask];
        if bins == usize::MAX {
            continue;
        }
        for b in 0..k {
            if mask & 1 << b != 0 {
                continue;
            }
            let w = weights[items[b]];
            let next = if load + w <= capacity { (bins, load + w) } else { (bins + 1, w) };
            let to = mask | 1 << b;
            if next < best[to] {
                best[to] = next;
                parent[to] = (mask, b);
            }
        }
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    // Replay the insertion order to recover the bins.
    let mut order = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let (prev, b) = parent[mask];
        order.push(b);
        mask = prev;
    }
    order.reverse();
    let mut bins: Vec<Vec<ItemId>> = vec![Vec::new()];
    let mut load = 0;
    for b in order {
        let w = weights[items[b]];
        if load + w > capacity {
            bins.push(Vec::new());
            load = 0;
        }
        load += w;
        bins.last_mut().unwrap().push(items[b]);
    }
    Ok(bins)
}

/// Exact block LP optimum with a matching dual certificate.
#[derive(Clone, Debug)]
pub struct ExactBlockLp {
    pub value: BigRational,
    pub y: Vec<BigRational>,
    pub z: Vec<(Vec<ItemId>, BigRational)>,
    /// Duals of `y_i <= Σ_{C ∋ i} z_C`.
    pub pi: Vec<BigRational>,
    /// Duals of `y_i <= 1`.
    pub upper: Vec<BigRational>,
    /// Dual of `Σ z <= |K|`.
    pub sigma: BigRational,
}

pub const BLOCK_LP_MAX_ITEMS: usize = 12;

/// All subsets of `items` fitting in `capacity` (the empty set excluded).
pub fn enumerate_configs(weights: &[i128], items: &[ItemId], capacity: i128) -> Vec<Vec<ItemId>> {
    let k = items.len();
    (1usize..1 << k)
        .map(|mask| (0..k).filter(|&b| mask & 1 << b != 0).map(|b| items[b]).collect::<Vec<_>>())
        .filter(|c: &Vec<ItemId>| c.iter().map(|&i| weights[i]).sum::<i128>() <= capacity)
        .collect()
}

/// Solves `max c·y` over the block polytope exactly in rationals by listing
/// every configuration.
pub fn exact_block_lp(weights: &[i128], block: &Block, c: &[f64]) -> Result<ExactBlockLp> {
    let n = weights.len();
    let items: Vec<ItemId> = (0..n).filter(|&i| c[i] > 0.0 && weights[i] <= block.capacity).collect();
    if items.len() > BLOCK_LP_MAX_ITEMS {
        return Err(Error::SizeLimit(format!("exact block LP limited to {BLOCK_LP_MAX_ITEMS} items")));
    }
    let configs = enumerate_configs(weights, &items, block.capacity);
    let k = items.len();
    let one = BigRational::from_integer(BigInt::from(1));
    // rows: coverage (k), upper bounds (k), block
    let mut rhs = vec![BigRational::zero(); 2 * k + 1];
    for r in rhs.iter_mut().skip(k).take(k) {
        *r = one.clone();
    }
    rhs[2 * k] = BigRational::from_integer(BigInt::from(block.size()));
    let mut lp = Simplex::new(rhs);
    for (r, &i) in items.iter().enumerate() {
        lp.add_column(rational_from_f64(c[i]), &[(r, one.clone()), (k + r, one.clone())]);
    }
    let pos = |i: ItemId| items.iter().position(|&j| j == i).unwrap();
    for config in &configs {
        let mut entries: Vec<(usize, BigRational)> = config.iter().map(|&i| (pos(i), -one.clone())).collect();
        entries.push((2 * k, one.clone()));
        lp.add_column(BigRational::zero(), &entries);
    }
    lp.solve()?;
    let prim = lp.primal();
    let duals = lp.duals();
    let mut y = vec![BigRational::zero(); n];
    let mut pi = vec![BigRational::zero(); n];
    let mut upper = vec![BigRational::zero(); n];
    for (r, &i) in items.iter().enumerate() {
        y[i] = prim[r].clone();
        pi[i] = duals[r].clone();
        upper[i] = duals[k + r].clone();
    }
    let z = configs
        .into_iter()
        .enumerate()
        .map(|(col, config)| (config, prim[k + col].clone()))
        .filter(|(_, v)| v.is_positive())
        .collect();
    Ok(ExactBlockLp { value: lp.value(), y, z, pi, upper, sigma: duals[2 * k].clone() })
}

pub const BRUTE_MAX_ITEMS: usize = 14;
pub const BRUTE_MAX_BINS: usize = 6;

/// For each bin prefix, which item masks can be packed into those bins.
struct PackTable {
    n: usize,
    /// reach[b][mask]: `mask` splits exactly into the first `b` bins.
    reach: Vec<Vec<bool>>,
    load: Vec<i128>,
    caps: Vec<i128>,
}

impl PackTable {
    fn new(weights: &[i128], caps: &[i128]) -> Self {
        let n = weights.len();
        let size = 1usize << n;
        let mut load = vec![0i128; size];
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            load[mask] = load[mask & (mask - 1)] + weights[low];
        }
        let mut reach = vec![vec![false; size]];
        reach[0][0] = true;
        for &cap in caps {
            let prev = reach.last().unwrap();
            let mut next = vec![false; size];
            for mask in 0..size {
                if !prev[mask] {
                    continue;
                }
                let free = (size - 1) & !mask;
                let mut s = free;
                loop {
                    if load[s] <= cap {
                        next[mask | s] = true;
                    }
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & free;
                }
            }
            reach.push(next);
        }
        PackTable { n, reach, load, caps: caps.to_vec() }
    }

    fn packable(&self, mask: usize) -> bool {
        self.reach[self.caps.len()][mask]
    }

    fn assignment(&self, mask: usize) -> Assignment {
        let m = self.caps.len();
        let mut bins = vec![Vec::new(); m];
        let mut rest = mask;
        for b in (0..m).rev() {
            let mut s = rest;
            loop {
                if self.load[s] <= self.caps[b] && self.reach[b][rest & !s] {
                    break;
                }
                s = (s - 1) & rest;
            }
            bins[b] = (0..self.n).filter(|&i| s & 1 << i != 0).collect();
            rest &= !s;
        }
        Assignment { bins }
    }
}

/// Optimal solution by exhaustive search; ties go to the smallest item mask.
pub fn brute_force_solve(instance: &Instance) -> Result<Solution> {
    let n = instance.n();
    if n > BRUTE_MAX_ITEMS || instance.constraints.iter().any(|k| k.num_bins() > BRUTE_MAX_BINS) {
        return Err(Error::SizeLimit(format!(
            "brute force limited to {BRUTE_MAX_ITEMS} items and {BRUTE_MAX_BINS} bins per constraint"
        )));
    }
    let tables: Vec<PackTable> =
        instance.constraints.iter().map(|k| PackTable::new(&k.weights, &k.capacities)).collect();
    let mut best: Option<(i128, usize)> = None;
    for mask in 0..1usize << n {
        if !tables.iter().all(|t| t.packable(mask)) {
            continue;
        }
        let set: Vec<ItemId> = (0..n).filter(|&i| mask & 1 << i != 0).collect();
        if !instance.additional.is_member(&set) {
            continue;
        }
        let v = instance.objective.value_scaled(&set);
        if best.is_none_or(|(bv, _)| v > bv) {
            best = Some((v, mask));
        }
    }
    let (_, mask) = best.expect("the empty set is always feasible");
    Ok(Solution {
        selected: (0..n).filter(|&i| mask & 1 << i != 0).collect(),
        assignments: tables.iter().map(|t| t.assignment(mask)).collect(),
    })
}

/// Whether `set` fits into the bins of every constraint.
pub fn packable(instance: &Instance, set: &[ItemId]) -> Result<Option<Vec<Assignment>>> {
    if set.len() > BRUTE_MAX_ITEMS {
        return Err(Error::SizeLimit("packability check limited to 14 items".into()));
    }
    let mut out = Vec::new();
    for k in &instance.constraints {
        let w: Vec<i128> = set.iter().map(|&i| k.weights[i]).collect();
        let table = PackTable::new(&w, &k.capacities);
        let full = (1usize << set.len()) - 1;
        if !table.packable(full) {
            return Ok(None);
        }
        let mut a = table.assignment(full);
        for bin in &mut a.bins {
            for i in bin.iter_mut() {
                *i = set[*i];
            }
        }
        out.push(a);
    }
    Ok(Some(out))
}
