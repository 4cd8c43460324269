//! Approximate separation over a block polytope.
//!
//! Solves `max t  s.t.  t·ȳ_i <= Σ_{C ∋ i} z_C,  Σ z_C <= |K|` by column
//! generation. A large `t` yields a covering witness; otherwise the duals,
//! normalized so that every configuration has weight at most one, separate.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::instance::{Block, ItemId};
use crate::lp::knapsack::knapsack_fptas;
use crate::lp::point::ConfigWeights;
use crate::lp::simplex::Simplex;

#[derive(Clone, Debug, PartialEq)]
pub enum Separation {
    /// `(1 - eps)·ȳ` is covered by these configuration weights.
    InPolytope { z: ConfigWeights },
    /// `ν·ȳ > bound >= ν·y'` for every `y'` in the polytope.
    Separating { nu: Vec<f64>, bound: f64 },
}

pub fn separate_block(weights: &[i128], block: &Block, y: &[f64], eps: f64) -> Result<Separation> {
    let n = y.len();
    let unit = |i: ItemId, bound: f64| {
        let mut nu = vec![0.0; n];
        nu[i] = 1.0;
        Separation::Separating { nu, bound }
    };
    for i in 0..n {
        if y[i] > 0.0 && weights[i] > block.capacity {
            return Ok(unit(i, 0.0));
        }
        if (1.0 - eps) * y[i] > 1.0 {
            return Ok(unit(i, 1.0));
        }
    }
    let support: Vec<ItemId> = (0..n).filter(|&i| y[i] > 0.0).collect();
    if support.is_empty() {
        return Ok(Separation::InPolytope { z: ConfigWeights::default() });
    }
    let size = block.size() as f64;
    let mut row = vec![usize::MAX; n];
    for (r, &i) in support.iter().enumerate() {
        row[i] = r;
    }
    let block_row = support.len();
    let mut rhs = vec![0.0; support.len() + 1];
    rhs[block_row] = size;
    let mut lp = Simplex::new(rhs);
    let t_entries: Vec<(usize, f64)> = support.iter().map(|&i| (row[i], y[i])).collect();
    lp.add_column(1.0, &t_entries);
    let mut configs: Vec<Vec<ItemId>> = Vec::new();
    let mut known = HashSet::new();
    let mut add = |lp: &mut Simplex<f64>, config: Vec<ItemId>| -> bool {
        if config.is_empty() || !known.insert(config.clone()) {
            return false;
        }
        let mut entries: Vec<(usize, f64)> = config.iter().map(|&i| (row[i], -1.0)).collect();
        entries.push((block_row, 1.0));
        lp.add_column(0.0, &entries);
        configs.push(config);
        true
    };
    for &i in &support {
        add(&mut lp, vec![i]);
    }
    let eps_price = eps / 2.0;
    let (pi, sigma_bound) = loop {
        lp.solve()?;
        let duals = lp.duals();
        let mut profit = vec![0.0; n];
        for &i in &support {
            profit[i] = duals[row[i]].max(0.0);
        }
        let sigma = duals[block_row].max(0.0);
        let config = knapsack_fptas(&profit, weights, &support, block.capacity, eps_price);
        let found: f64 = config.iter().map(|&i| profit[i]).sum();
        if found > sigma + 1e-9 * (1.0 + sigma) && add(&mut lp, config) {
            continue;
        }
        break (profit, sigma.max(found / (1.0 - eps_price)));
    };
    let t = lp.value();
    if t >= 1.0 - eps {
        let prim = lp.primal();
        let mut z = ConfigWeights::default();
        for (k, config) in configs.iter().enumerate() {
            let v = prim[k + 1] * (1.0 - eps) / t;
            if v > 0.0 {
                z.add(config.clone(), v.min(1.0));
            }
        }
        return Ok(Separation::InPolytope { z });
    }
    if sigma_bound <= 0.0 {
        return Err(Error::Invariant("separation produced a zero dual".into()));
    }
    let nu: Vec<f64> = pi.iter().map(|p| p / sigma_bound).collect();
    let value: f64 = nu.iter().zip(y).map(|(a, b)| a * b).sum();
    if value <= size {
        return Err(Error::Invariant(format!(
            "separation inconclusive: scale {t:.6}, dual value {value:.6}"
        )));
    }
    Ok(Separation::Separating { nu, bound: size })
}
