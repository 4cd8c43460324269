//! Column generation over configuration variables.
//!
//! The master problem is
//!
//! ```text
//! max c·x  s.t.  x_i - Σ_{j, C ∋ i} z^{t,j}_C <= 0   for every constraint t, item i
//!                Σ_C z^{t,j}_C <= |K^t_j|             for every block
//!                x_i <= 1, hull rows, x, z >= 0
//! ```
//!
//! and new configurations are priced by a knapsack FPTAS on the coverage duals.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::hull::AdditionalConstraint;
use crate::instance::{Block, ItemId};
use crate::lp::knapsack::knapsack_fptas;
use crate::lp::point::{BlockWitness, ConfigWeights, FractionalPoint};
use crate::lp::simplex::Simplex;

/// Items that may appear in the configurations of one block.
#[derive(Clone, Debug)]
pub struct BlockDomain {
    pub size: usize,
    pub capacity: i128,
    pub eligible: Vec<ItemId>,
}

#[derive(Clone, Debug)]
pub struct PolytopeModel {
    pub n: usize,
    pub weights: Vec<Vec<i128>>,
    pub blocks: Vec<Vec<BlockDomain>>,
    pub hull_rows: Vec<(Vec<ItemId>, usize)>,
    pub eps: f64,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub point: FractionalPoint,
    pub value: f64,
    /// Certified upper bound on the optimum of the full program.
    pub upper_bound: f64,
    pub columns: usize,
    pub rounds: usize,
}

pub const DEFAULT_LP_EPS: f64 = 0.05;
const MAX_ROUNDS: usize = 400;

/// Whether item weight `w` may be used in `block`: it must fit, and when
/// `gamma` is given, singleton blocks only take items of weight at most
/// `gamma` times the capacity.
pub fn eligible_in(w: i128, block: &Block, gamma: Option<f64>) -> bool {
    if w > block.capacity {
        return false;
    }
    match gamma {
        Some(g) if block.is_singleton() => (w as f64) <= g * block.capacity as f64,
        _ => true,
    }
}

impl PolytopeModel {
    /// The γ-partition instance polytope restricted to `active` items.
    pub fn new(
        n: usize,
        weights: Vec<Vec<i128>>,
        partitions: &[Vec<Block>],
        gamma: Option<f64>,
        active: &[ItemId],
        hull: &AdditionalConstraint,
    ) -> Self {
        let mut is_active = vec![false; n];
        for &i in active {
            is_active[i] = true;
        }
        let blocks = partitions
            .iter()
            .zip(&weights)
            .map(|(blocks, w)| {
                blocks
                    .iter()
                    .map(|b| BlockDomain {
                        size: b.size(),
                        capacity: b.capacity,
                        eligible: (0..n).filter(|&i| is_active[i] && eligible_in(w[i], b, gamma)).collect(),
                    })
                    .collect()
            })
            .collect();
        let hull_rows = hull
            .rows(n)
            .into_iter()
            .map(|(items, cap)| (items.into_iter().filter(|&i| is_active[i]).collect::<Vec<_>>(), cap))
            .filter(|(items, _)| !items.is_empty())
            .collect();
        PolytopeModel { n, weights, blocks, hull_rows, eps: DEFAULT_LP_EPS }
    }

    /// The block polytope of a single block over all items.
    pub fn for_block(weights: &[i128], block: &Block) -> Self {
        let n = weights.len();
        let all: Vec<ItemId> = (0..n).collect();
        PolytopeModel::new(n, vec![weights.to_vec()], &[vec![block.clone()]], None, &all, &AdditionalConstraint::Free)
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn shape(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Items usable by at least one block of every constraint.
    pub fn usable(&self) -> Vec<bool> {
        let mut ok = vec![true; self.n];
        for blocks in &self.blocks {
            let mut any = vec![false; self.n];
            for b in blocks {
                for &i in &b.eligible {
                    any[i] = true;
                }
            }
            for i in 0..self.n {
                ok[i] &= any[i];
            }
        }
        ok
    }

    /// Approximately maximizes `c · x̄` over the polytope: the returned value
    /// is at least `(1 - eps)` times the optimum.
    pub fn optimize(&self, c: &[f64]) -> Result<LpSolution> {
        let n = self.n;
        let usable = self.usable();
        let vars: Vec<ItemId> = (0..n).filter(|&i| usable[i] && c[i] > 1e-12).collect();
        if vars.is_empty() {
            return Ok(LpSolution {
                point: FractionalPoint::zero(n, &self.shape()),
                value: 0.0,
                upper_bound: 0.0,
                columns: 0,
                rounds: 0,
            });
        }
        let mut var_index = vec![usize::MAX; n];
        for (k, &i) in vars.iter().enumerate() {
            var_index[i] = k;
        }
        let d = self.blocks.len();
        let nv = vars.len();
        // Row layout: coverage (t, k) | block rows | x upper bounds | hull rows.
        let cover_row = |t: usize, k: usize| t * nv + k;
        let mut block_row = Vec::new();
        let mut next = d * nv;
        for blocks in &self.blocks {
            block_row.push((next..next + blocks.len()).collect::<Vec<_>>());
            next += blocks.len();
        }
        let ub_row = next;
        let hull_row = ub_row + nv;
        let mut rhs = vec![0.0; hull_row + self.hull_rows.len()];
        for (t, blocks) in self.blocks.iter().enumerate() {
            for (j, b) in blocks.iter().enumerate() {
                rhs[block_row[t][j]] = b.size as f64;
            }
        }
        for k in 0..nv {
            rhs[ub_row + k] = 1.0;
        }
        for (h, (_, cap)) in self.hull_rows.iter().enumerate() {
            rhs[hull_row + h] = *cap as f64;
        }
        let mut lp = Simplex::new(rhs);
        let mut in_rows: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (h, (items, _)) in self.hull_rows.iter().enumerate() {
            for &i in items {
                if var_index[i] != usize::MAX {
                    in_rows[var_index[i]].push(hull_row + h);
                }
            }
        }
        for (k, &i) in vars.iter().enumerate() {
            let mut entries: Vec<(usize, f64)> = (0..d).map(|t| (cover_row(t, k), 1.0)).collect();
            entries.push((ub_row + k, 1.0));
            entries.extend(in_rows[k].iter().map(|&r| (r, 1.0)));
            lp.add_column(c[i], &entries);
        }

        // Columns: (constraint, block, configuration).
        let mut columns: Vec<(usize, usize, Vec<ItemId>)> = Vec::new();
        let mut known: Vec<Vec<HashSet<Vec<ItemId>>>> =
            self.blocks.iter().map(|b| vec![HashSet::new(); b.len()]).collect();
        let mut add_config = |lp: &mut Simplex<f64>, t: usize, j: usize, config: Vec<ItemId>| -> bool {
            if config.is_empty() || !known[t][j].insert(config.clone()) {
                return false;
            }
            let mut entries: Vec<(usize, f64)> =
                config.iter().map(|&i| (cover_row(t, var_index[i]), -1.0)).collect();
            entries.push((block_row[t][j], 1.0));
            lp.add_column(0.0, &entries);
            columns.push((t, j, config));
            true
        };
        for (t, blocks) in self.blocks.iter().enumerate() {
            for (j, b) in blocks.iter().enumerate() {
                for &i in &b.eligible {
                    if var_index[i] != usize::MAX {
                        add_config(&mut lp, t, j, vec![i]);
                    }
                }
            }
        }

        let eps_price = 1.0 - (1.0 - self.eps).sqrt();
        let mut upper_bound;
        let mut rounds = 0;
        loop {
            rounds += 1;
            lp.solve()?;
            let duals = lp.duals();
            let value = lp.value();
            let mut gap = 0.0;
            let mut added = false;
            for (t, blocks) in self.blocks.iter().enumerate() {
                let mut profit = vec![0.0; n];
                for (k, &i) in vars.iter().enumerate() {
                    profit[i] = duals[cover_row(t, k)].max(0.0);
                }
                for (j, b) in blocks.iter().enumerate() {
                    let sigma = duals[block_row[t][j]].max(0.0);
                    let config = knapsack_fptas(&profit, &self.weights[t], &b.eligible, b.capacity, eps_price);
                    let found: f64 = config.iter().map(|&i| profit[i]).sum();
                    gap += b.size as f64 * (found / (1.0 - eps_price) - sigma).max(0.0);
                    if found > sigma + 1e-9 * (1.0 + sigma) {
                        added |= add_config(&mut lp, t, j, config);
                    }
                }
            }
            upper_bound = value + gap;
            if !added || value >= (1.0 - eps_price) * upper_bound || rounds >= MAX_ROUNDS {
                break;
            }
        }

        let prim = lp.primal();
        let mut point = FractionalPoint::zero(n, &self.shape());
        for (k, &i) in vars.iter().enumerate() {
            point.x[i] = prim[k].clamp(0.0, 1.0);
        }
        for (col, (t, j, config)) in columns.iter().enumerate() {
            let z = prim[nv + col].min(1.0);
            if z > 1e-12 {
                point.witnesses[*t][*j].z.add(config.clone(), z);
            }
        }
        fill_witnesses(&mut point);
        let value = vars.iter().map(|&i| c[i] * point.x[i]).sum();
        Ok(LpSolution { point, value, upper_bound, columns: columns.len(), rounds })
    }

    /// Verifies membership of `p` in the polytope up to `tol`; configurations
    /// are checked exactly.
    pub fn check(&self, p: &FractionalPoint, tol: f64) -> Result<()> {
        let n = self.n;
        if p.x.len() != n || p.witnesses.len() != self.blocks.len() {
            return Err(Error::Invariant("point has the wrong shape".into()));
        }
        if p.x.iter().any(|&v| !(-tol..=1.0 + tol).contains(&v)) {
            return Err(Error::Invariant("x outside the unit box".into()));
        }
        for (items, cap) in &self.hull_rows {
            if items.iter().map(|&i| p.x[i]).sum::<f64>() > *cap as f64 + tol {
                return Err(Error::Invariant("x violates the additional constraint".into()));
            }
        }
        for (t, (blocks, ws)) in self.blocks.iter().zip(&p.witnesses).enumerate() {
            let mut sum = vec![0.0; n];
            for (j, (b, w)) in blocks.iter().zip(ws).enumerate() {
                let mut allowed = vec![false; n];
                for &i in &b.eligible {
                    allowed[i] = true;
                }
                for (config, &z) in &w.z.entries {
                    if config.iter().any(|&i| !allowed[i])
                        || config.iter().map(|&i| self.weights[t][i]).sum::<i128>() > b.capacity
                    {
                        return Err(Error::Invariant(format!("block ({t},{j}) has an invalid configuration")));
                    }
                    if !(-tol..=1.0 + tol).contains(&z) {
                        return Err(Error::Invariant(format!("block ({t},{j}) has z outside [0,1]")));
                    }
                }
                if w.z.total() > b.size as f64 + tol {
                    return Err(Error::Invariant(format!("block ({t},{j}) uses too many configurations")));
                }
                let cov = w.z.coverage(n);
                for i in 0..n {
                    if w.y[i] < -tol || w.y[i] > cov[i] + tol || w.y[i] > 1.0 + tol {
                        return Err(Error::Invariant(format!("block ({t},{j}) item {i} is not covered")));
                    }
                    sum[i] += w.y[i];
                }
            }
            for i in 0..n {
                if (sum[i] - p.x[i]).abs() > tol {
                    return Err(Error::Invariant(format!("constraint {t} item {i}: Σ y != x")));
                }
            }
        }
        Ok(())
    }
}

/// Derives `ȳ` from `z̄` so that every constraint splits `x̄` exactly,
/// lowering `x̄` where the configurations fall short.
fn fill_witnesses(point: &mut FractionalPoint) {
    let n = point.x.len();
    let covers: Vec<Vec<Vec<f64>>> = point
        .witnesses
        .iter()
        .map(|ws| ws.iter().map(|w| w.z.coverage(n).into_iter().map(|c| c.min(1.0)).collect()).collect())
        .collect();
    for i in 0..n {
        let mut xi = point.x[i];
        for cov in &covers {
            xi = xi.min(cov.iter().map(|c| c[i]).sum());
        }
        if xi < 1e-12 {
            xi = 0.0;
        }
        point.x[i] = xi;
        for (ws, cov) in point.witnesses.iter_mut().zip(&covers) {
            let mut left = xi;
            for (w, c) in ws.iter_mut().zip(cov) {
                let take = left.min(c[i]);
                w.y[i] = take;
                left -= take;
            }
        }
    }
}

/// Anything able to maximize linear functions over a polytope with witnesses.
pub trait LinearOracle: Sync {
    fn n(&self) -> usize;
    fn shape(&self) -> Vec<usize>;
    fn maximize(&self, c: &[f64]) -> Result<FractionalPoint>;
}

impl LinearOracle for PolytopeModel {
    fn n(&self) -> usize {
        self.n
    }

    fn shape(&self) -> Vec<usize> {
        PolytopeModel::shape(self)
    }

    fn maximize(&self, c: &[f64]) -> Result<FractionalPoint> {
        Ok(self.optimize(c)?.point)
    }
}

/// Block-polytope optimum: `(ȳ, z̄, c·ȳ)`.
pub fn block_lp_optimize(
    weights: &[i128],
    block: &Block,
    c: &[f64],
    eps: f64,
) -> Result<(Vec<f64>, ConfigWeights, f64)> {
    let sol = PolytopeModel::for_block(weights, block).with_eps(eps).optimize(c)?;
    let BlockWitness { y, z } = sol.point.witnesses[0][0].clone();
    Ok((y, z, sol.value))
}
