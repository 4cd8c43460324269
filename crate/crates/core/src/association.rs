//! Turning a fractional point into an item-to-block association.
//!
//! [`make_perfect`] rewrites a decomposition `x = Σ_r γ^r` so that every item
//! lives in exactly one vector while each linear constraint `c^r·λ^r <= β^r`
//! survives up to one exceptional item. [`block_associate`] applies it to the
//! per-block witnesses of a point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::grouping::{compute_grouping, Grouping};
use crate::instance::{Block, ItemId};
use crate::num::floor_dyadic;

pub type Q = BigRational;

fn q(v: i128) -> Q {
    Q::from_integer(BigInt::from(v))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MakePerfectReport {
    pub iterations: usize,
    pub initial_broken_edges: usize,
    pub cycle_steps: usize,
}

fn dot(c: &[Q], v: &[Q]) -> Q {
    c.iter().zip(v).filter(|(_, b)| !b.is_zero()).map(|(a, b)| a * b).sum()
}

/// The exceptional item certifying `c·λ - c_i λ_i <= β` when the full
/// constraint fails: `Ok(None)` if it already holds, `Err(())` if no single
/// item suffices.
pub fn semi_satisfying_item(c: &[Q], beta: &Q, lambda: &[Q]) -> std::result::Result<Option<usize>, ()> {
    let total = dot(c, lambda);
    if &total <= beta {
        return Ok(None);
    }
    let best = (0..lambda.len())
        .filter(|&i| !lambda[i].is_zero())
        .max_by(|&a, &b| (&c[a] * &lambda[a]).cmp(&(&c[b] * &lambda[b])).then(b.cmp(&a)));
    match best {
        Some(i) if &total - &c[i] * &lambda[i] <= *beta => Ok(Some(i)),
        _ => Err(()),
    }
}

/// Broken items: those appearing in at least two vectors.
fn broken_items(lambda: &[Vec<Q>], n: usize) -> Vec<bool> {
    (0..n).map(|i| lambda.iter().filter(|l| !l[i].is_zero()).count() >= 2).collect()
}

pub fn count_broken_edges(lambda: &[Vec<Q>], n: usize) -> usize {
    let broken = broken_items(lambda, n);
    lambda.iter().map(|l| (0..n).filter(|&i| broken[i] && !l[i].is_zero()).count()).sum()
}

/// Finds a simple cycle `(i_1, r_1, ..., i_k, r_k)` in the broken graph,
/// walking to the smallest unvisited-edge neighbour.
fn find_cycle(adj_items: &[Vec<usize>], adj_vecs: &[Vec<usize>], start: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    // Walk nodes encoded as (is_vector, index).
    let mut path: Vec<(bool, usize)> = vec![(false, start)];
    let mut pos_item = vec![usize::MAX; adj_items.len()];
    let mut pos_vec = vec![usize::MAX; adj_vecs.len()];
    pos_item[start] = 0;
    let mut prev: Option<(bool, usize)> = None;
    loop {
        let &(is_vec, v) = path.last().unwrap();
        let neigh = if is_vec { &adj_vecs[v] } else { &adj_items[v] };
        let next = neigh.iter().copied().find(|&u| prev != Some((!is_vec, u)))?;
        let node = (!is_vec, next);
        let seen = if node.0 { pos_vec[next] } else { pos_item[next] };
        if seen != usize::MAX {
            let mut cycle: Vec<(bool, usize)> = path[seen..].to_vec();
            if cycle[0].0 {
                cycle.rotate_left(1);
            }
            let items = cycle.iter().filter(|n| !n.0).map(|n| n.1).collect();
            let vecs = cycle.iter().filter(|n| n.0).map(|n| n.1).collect();
            return Some((items, vecs));
        }
        if node.0 {
            pos_vec[next] = path.len();
        } else {
            pos_item[next] = path.len();
        }
        prev = Some((is_vec, v));
        path.push(node);
    }
}

/// Makes the decomposition `x = Σ_r γ^r` perfect while keeping every
/// constraint `c^r·λ^r <= β^r` satisfied or semi-satisfied.
pub fn make_perfect(
    x: &[Q],
    c: &[Vec<Q>],
    beta: &[Q],
    gamma: &[Vec<Q>],
) -> Result<(Vec<Vec<Q>>, MakePerfectReport)> {
    let n = x.len();
    let p = gamma.len();
    if c.len() != p || beta.len() != p || gamma.iter().chain(c).any(|v| v.len() != n) {
        return Err(Error::Precondition("decomposition has inconsistent dimensions".into()));
    }
    for i in 0..n {
        let sum: Q = gamma.iter().map(|g| g[i].clone()).sum();
        if sum != x[i] || gamma.iter().any(|g| g[i].is_negative()) {
            return Err(Error::Precondition(format!("vectors do not decompose x at item {i}")));
        }
    }
    for r in 0..p {
        if dot(&c[r], &gamma[r]) > beta[r] || c[r].iter().any(|v| v.is_negative()) {
            return Err(Error::Precondition(format!("constraint {r} is violated initially")));
        }
    }
    let mut lambda = gamma.to_vec();
    let mut report = MakePerfectReport { initial_broken_edges: count_broken_edges(&lambda, n), ..Default::default() };
    loop {
        let broken = broken_items(&lambda, n);
        if !broken.iter().any(|&b| b) {
            break;
        }
        report.iterations += 1;
        if report.iterations > report.initial_broken_edges + 1 {
            return Err(Error::Invariant("make_perfect failed to shrink the broken graph".into()));
        }
        let adj_vecs: Vec<Vec<usize>> =
            lambda.iter().map(|l| (0..n).filter(|&i| broken[i] && !l[i].is_zero()).collect()).collect();
        if let Some(r) = (0..p).find(|&r| adj_vecs[r].len() == 1) {
            let i = adj_vecs[r][0];
            for l in lambda.iter_mut() {
                l[i] = Q::zero();
            }
            lambda[r][i] = x[i].clone();
            continue;
        }
        let mut adj_items = vec![Vec::new(); n];
        for (r, items) in adj_vecs.iter().enumerate() {
            for &i in items {
                adj_items[i].push(r);
            }
        }
        let start = (0..n).find(|&i| broken[i]).unwrap();
        let (items, vecs) = find_cycle(&adj_items, &adj_vecs, start)
            .ok_or_else(|| Error::Invariant("broken graph without a degree-one vector has no cycle".into()))?;
        report.cycle_steps += 1;
        let k = items.len();
        let a: Vec<Q> = (0..k).map(|j| c[vecs[j]][items[j]].clone()).collect();
        let b: Vec<Q> = (0..k).map(|j| c[vecs[j]][items[(j + 1) % k]].clone()).collect();
        let mut nu = vec![Q::zero(); k];
        let start_at = (0..k.saturating_sub(1)).rev().find(|&j| b[j].is_zero()).map_or(0, |j| j + 1);
        nu[start_at] = q(1);
        for j in start_at..k - 1 {
            nu[j + 1] = &a[j] * &nu[j] / &b[j];
        }
        if &a[k - 1] * &nu[k - 1] - &b[k - 1] * &nu[0] > Q::zero() {
            for v in nu.iter_mut() {
                *v = -v.clone();
            }
        }
        // Largest step keeping every touched entry non-negative.
        let mut step: Option<Q> = None;
        let mut consider = |bound: Q| {
            if step.as_ref().is_none_or(|s| bound < *s) {
                step = Some(bound);
            }
        };
        for j in 0..k {
            let up = &lambda[vecs[j]][items[j]];
            if nu[j].is_negative() {
                consider(up / -&nu[j]);
            }
            let next = (j + 1) % k;
            let down = &lambda[vecs[j]][items[next]];
            if nu[next].is_positive() {
                consider(down / &nu[next]);
            }
        }
        let step = step.ok_or_else(|| Error::Invariant("cycle direction has no limiting entry".into()))?;
        for j in 0..k {
            let next = (j + 1) % k;
            let r = vecs[j];
            let up = &lambda[r][items[j]] + &step * &nu[j];
            let down = &lambda[r][items[next]] - &step * &nu[next];
            lambda[r][items[j]] = up;
            lambda[r][items[next]] = down;
        }
    }
    Ok((lambda, report))
}

/// Disjoint item sets `I_j`, one per block, with their exceptional items.
#[derive(Clone, Debug)]
pub struct BlockAssociation {
    pub sets: Vec<Vec<ItemId>>,
    pub exceptional: Vec<Option<ItemId>>,
    /// μ-grouping of each multi-bin block's `ȳ`; `None` for singletons.
    pub groupings: Vec<Option<Grouping>>,
    /// Exact point used: `x = Σ_j ȳ^j`.
    pub x: Vec<Q>,
    pub y: Vec<Vec<Q>>,
    pub report: MakePerfectReport,
}

/// Bits of the dyadic grid the float witnesses are snapped to.
pub const SNAP_BITS: i32 = 48;

/// Associates the items of `Σ_j ȳ^j` with the blocks of one constraint.
pub fn block_associate(weights: &[i128], blocks: &[Block], y: &[Vec<f64>], mu: f64) -> Result<BlockAssociation> {
    let n = weights.len();
    if y.len() != blocks.len() {
        return Err(Error::Precondition("one witness per block is required".into()));
    }
    let yq: Vec<Vec<Q>> = y.iter().map(|yj| yj.iter().map(|&v| floor_dyadic(v, SNAP_BITS)).collect()).collect();
    let mut x = vec![Q::zero(); n];
    for yj in &yq {
        for i in 0..n {
            x[i] += &yj[i];
        }
    }
    let support: Vec<ItemId> = (0..n).filter(|&i| x[i].is_positive()).collect();
    let mut groupings = Vec::new();
    // (block, coefficient per compact item, members)
    let mut vectors: Vec<(usize, Vec<Q>, Vec<bool>)> = Vec::new();
    for (j, b) in blocks.iter().enumerate() {
        let fits = |i: ItemId| weights[i] <= b.capacity;
        if let Some(&bad) = support.iter().find(|&&i| yq[j][i].is_positive() && !fits(i)) {
            return Err(Error::Precondition(format!("block {j} carries oversized item {bad}")));
        }
        let weight_coeff: Vec<Q> = support.iter().map(|&i| q(weights[i])).collect();
        if b.is_singleton() {
            groupings.push(None);
            vectors.push((j, weight_coeff, support.iter().map(|&i| fits(i)).collect()));
        } else {
            let g = compute_grouping(&y[j], weights, b.capacity, b.size(), mu);
            let light: Vec<bool> = {
                let mut m = vec![false; n];
                for &i in &g.light {
                    m[i] = true;
                }
                support.iter().map(|&i| m[i]).collect()
            };
            vectors.push((j, weight_coeff, light));
            for k in 0..g.tau() {
                let member: Vec<bool> = support.iter().map(|&i| g.group_of[i] == Some(k)).collect();
                vectors.push((j, vec![q(1); support.len()], member));
            }
            groupings.push(Some(g));
        }
    }
    let xs: Vec<Q> = support.iter().map(|&i| x[i].clone()).collect();
    let gammas: Vec<Vec<Q>> = vectors
        .iter()
        .map(|(j, _, member)| {
            support.iter().enumerate().map(|(k, &i)| if member[k] { yq[*j][i].clone() } else { Q::zero() }).collect()
        })
        .collect();
    let cs: Vec<Vec<Q>> = vectors.iter().map(|v| v.1.clone()).collect();
    let betas: Vec<Q> = cs.iter().zip(&gammas).map(|(c, g)| dot(c, g)).collect();
    let (lambda, report) = make_perfect(&xs, &cs, &betas, &gammas)?;

    let mut sets = vec![Vec::new(); blocks.len()];
    for ((j, _, _), l) in vectors.iter().zip(&lambda) {
        for (k, &i) in support.iter().enumerate() {
            if !l[k].is_zero() {
                sets[*j].push(i);
            }
        }
    }
    for s in &mut sets {
        s.sort_unstable();
        s.dedup();
    }
    let exceptional = blocks
        .iter()
        .enumerate()
        .map(|(j, _)| {
            let light_only = groupings[j].as_ref().map(|g| g.group_of.clone());
            let members: Vec<ItemId> = sets[j]
                .iter()
                .copied()
                .filter(|&i| light_only.as_ref().is_none_or(|go| go[i].is_none()))
                .collect();
            weight_excess_item(weights, &x, &yq[j], &members, light_only.as_deref())
        })
        .collect();
    Ok(BlockAssociation { sets, exceptional, groupings, x, y: yq, report })
}

/// The item whose removal brings `Σ_{members} x_i w_i` under the `ȳ`-weight
/// of the same class, or `None` if nothing needs removing.
fn weight_excess_item(
    weights: &[i128],
    x: &[Q],
    y: &[Q],
    members: &[ItemId],
    group_of: Option<&[Option<usize>]>,
) -> Option<ItemId> {
    let in_class = |i: ItemId| group_of.is_none_or(|g| g[i].is_none());
    let budget: Q = (0..y.len()).filter(|&i| in_class(i)).map(|i| &y[i] * q(weights[i])).sum();
    let used: Q = members.iter().map(|&i| &x[i] * q(weights[i])).sum();
    if used <= budget {
        return None;
    }
    members.iter().copied().max_by(|&a, &b| (&x[a] * q(weights[a])).cmp(&(&x[b] * q(weights[b]))).then(b.cmp(&a)))
}

/// Checks the association properties; returns a description of the first
/// failure.
pub fn check_association(
    weights: &[i128],
    blocks: &[Block],
    assoc: &BlockAssociation,
    mu: f64,
) -> std::result::Result<(), String> {
    let n = weights.len();
    let mut owner = vec![None; n];
    for (j, set) in assoc.sets.iter().enumerate() {
        for &i in set {
            if owner[i].is_some() {
                return Err(format!("item {i} associated with two blocks"));
            }
            owner[i] = Some(j);
            if !assoc.y[j][i].is_positive() {
                return Err(format!("item {i} associated with block {j} outside its support"));
            }
        }
    }
    for i in 0..n {
        if assoc.x[i].is_positive() != owner[i].is_some() {
            return Err(format!("item {i}: association does not cover the support exactly"));
        }
    }
    for (j, b) in blocks.iter().enumerate() {
        let set = &assoc.sets[j];
        let weighted = |items: &[ItemId], v: &[Q]| -> Q { items.iter().map(|&i| &v[i] * q(weights[i])).sum() };
        let within = |items: &[ItemId], budget: Q| -> bool {
            let total = weighted(items, &assoc.x);
            total <= budget
                || items.iter().any(|&i| &total - &assoc.x[i] * q(weights[i]) <= budget)
        };
        match &assoc.groupings[j] {
            None => {
                let all: Vec<ItemId> = (0..n).collect();
                if !within(set, weighted(&all, &assoc.y[j])) {
                    return Err(format!("singleton block {j} exceeds its weight budget"));
                }
            }
            Some(g) => {
                let bound = mu * b.size() as f64 + 2.0;
                for (k, group) in g.groups.iter().enumerate() {
                    let mass: Q = set.iter().filter(|&&i| g.group_of[i] == Some(k)).map(|&i| assoc.x[i].clone()).sum();
                    if crate::num::to_f64(&mass) > bound + 1e-9 {
                        return Err(format!("block {j} group {k} ({} items) mass too large", group.len()));
                    }
                }
                let light: Vec<ItemId> = set.iter().copied().filter(|&i| g.group_of[i].is_none()).collect();
                if !within(&light, weighted(&g.light, &assoc.y[j])) {
                    return Err(format!("block {j} light weight exceeds its budget"));
                }
            }
        }
    }
    Ok(())
}
