//! N-leveled block structure of a multiple-knapsack constraint and the
//! transfer of assignments onto it.
//!
//! Bins are sorted by capacity (descending, ties by id). Block `j` takes the
//! next `N^⌊j/N²⌋` bins and uses the smallest capacity among them; bins left
//! after the last complete block are dropped.

use crate::error::{Error, Result};
use crate::instance::{Assignment, Block, ItemId};
use crate::oracles::SetFunction;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeveledPartition {
    pub n_level: usize,
    pub blocks: Vec<Block>,
    /// Bin ids sorted by capacity descending, id ascending.
    pub order: Vec<usize>,
    /// Bins after the last block.
    pub leftover: Vec<usize>,
}

impl LeveledPartition {
    pub fn block_size(n_level: usize, j: usize) -> usize {
        n_level.pow((j / (n_level * n_level)) as u32)
    }

    /// Capacity per original bin in the leveled instance; dropped bins get 0.
    pub fn capacities(&self, bins: usize) -> Vec<i128> {
        let mut caps = vec![0; bins];
        for b in &self.blocks {
            for &bin in &b.bins {
                caps[bin] = b.capacity;
            }
        }
        caps
    }
}

pub fn structure_in_blocks(capacities: &[i128], n_level: usize) -> Result<LeveledPartition> {
    if n_level < 2 {
        return Err(Error::Precondition("the level parameter N must be at least 2".into()));
    }
    let m = capacities.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| capacities[b].cmp(&capacities[a]).then(a.cmp(&b)));
    let mut blocks = Vec::new();
    let mut pos = 0;
    loop {
        let size = LeveledPartition::block_size(n_level, blocks.len());
        if pos + size > m {
            break;
        }
        let bins = order[pos..pos + size].to_vec();
        let capacity = bins.iter().map(|&b| capacities[b]).min().unwrap();
        blocks.push(Block { bins, capacity });
        pos += size;
    }
    let leftover = order[pos..].to_vec();
    Ok(LeveledPartition { n_level, blocks, order, leftover })
}

/// Moves a feasible assignment on the original capacities onto the leveled
/// bins, evicting one super-block per level. The kept set `S̃` satisfies
/// `f(S̃) >= (1 - 1/N) f(S)`.
pub fn transfer_assignment<F: SetFunction + ?Sized>(
    f: &F,
    weights: &[i128],
    capacities: &[i128],
    partition: &LeveledPartition,
    assignment: &Assignment,
) -> Result<(Vec<ItemId>, Assignment)> {
    let m = capacities.len();
    let nl = partition.n_level;
    if assignment.bins.len() != m || !assignment.bins.iter().zip(capacities).all(|(b, &c)| b.iter().map(|&i| weights[i]).sum::<i128>() <= c) {
        return Err(Error::Precondition("assignment is not feasible for the original capacities".into()));
    }
    let blocks = &partition.blocks;
    let ell1 = blocks.len(); // index of the leftover pseudo-block
    let k = ell1 / (nl * nl);
    let mut content: Vec<Vec<ItemId>> = partition.order.iter().map(|&b| assignment.bins[b].clone()).collect();
    let mut start = Vec::with_capacity(ell1 + 1);
    let mut p = 0;
    for b in blocks {
        start.push(p);
        p += b.size();
    }
    start.push(p);
    let end_blocks = p;
    let mut block_of = vec![ell1; m];
    for (j, b) in blocks.iter().enumerate() {
        for q in start[j]..start[j] + b.size() {
            block_of[q] = j;
        }
    }
    let to_assignment = |content: &[Vec<ItemId>]| {
        let mut out = Assignment::empty(m);
        for (q, items) in content.iter().enumerate() {
            out.bins[partition.order[q]] = items.clone();
        }
        out.normalize();
        out
    };
    if k == 0 {
        if end_blocks != m {
            return Err(Error::Invariant("level zero leaves bins outside the blocks".into()));
        }
        let kept = assignment.items();
        return Ok((kept, to_assignment(&content)));
    }

    // Positions of super-block r of level t (t < k).
    let super_positions = |t: usize, r: usize| -> std::ops::Range<usize> {
        let first = t * nl * nl + r * nl;
        start[first]..start[first + nl]
    };
    let removed_value = |choice: &[usize]| -> i128 {
        let mut drop = vec![false; weights.len()];
        for (t, &r) in choice.iter().enumerate() {
            for q in super_positions(t, r) {
                for &i in &content[q] {
                    drop[i] = true;
                }
            }
        }
        let kept: Vec<ItemId> = content.iter().flatten().copied().filter(|&i| !drop[i]).collect();
        f.value_scaled(&kept)
    };
    let mut best_r = 0;
    let mut best_v = i128::MIN;
    for r in 0..nl {
        let v = removed_value(&vec![r; k]);
        if v > best_v {
            best_v = v;
            best_r = r;
        }
    }
    let mut choice = vec![best_r; k];
    for t in 0..k {
        for r in 0..nl {
            let mut trial = choice.clone();
            trial[t] = r;
            let v = removed_value(&trial);
            if v > best_v {
                best_v = v;
                choice = trial;
            }
        }
    }
    // Evict, then move the last super-block of each level into the hole.
    for (t, &r) in choice.iter().enumerate() {
        for q in super_positions(t, r) {
            content[q].clear();
        }
        if r != nl - 1 {
            let hole = super_positions(t, r);
            let last = super_positions(t, nl - 1);
            for (dst, src) in hole.zip(last) {
                content[dst] = std::mem::take(&mut content[src]);
            }
        }
    }
    let mut shifted: Vec<Vec<ItemId>> = vec![Vec::new(); m];
    for q in 0..m {
        if content[q].is_empty() {
            continue;
        }
        let level = block_of[q] / (nl * nl);
        let target = if level == 0 { Some(q) } else { q.checked_sub(nl.pow(level as u32)) };
        let target = target.filter(|&tq| tq < end_blocks).ok_or_else(|| {
            Error::Invariant(format!("position {q} has no target in the leveled bins"))
        })?;
        if !shifted[target].is_empty() {
            return Err(Error::Invariant(format!("target position {target} used twice")));
        }
        shifted[target] = std::mem::take(&mut content[q]);
    }
    for (q, items) in shifted.iter().enumerate() {
        let cap = if q < end_blocks { blocks[block_of[q]].capacity } else { 0 };
        if items.iter().map(|&i| weights[i]).sum::<i128>() > cap {
            return Err(Error::Invariant(format!("leveled position {q} over capacity")));
        }
    }
    let out = to_assignment(&shifted);
    Ok((out.items(), out))
}
