//! Fractional points of the extended polytopes together with their
//! per-block witnesses.

use std::collections::BTreeMap;

use crate::instance::ItemId;

/// Configuration weights `z̄` of one block.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigWeights {
    pub entries: BTreeMap<Vec<ItemId>, f64>,
}

impl ConfigWeights {
    pub fn add(&mut self, config: Vec<ItemId>, weight: f64) {
        if weight > 0.0 {
            *self.entries.entry(config).or_insert(0.0) += weight;
        }
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// `Σ_{C ∋ i} z_C` for every item.
    pub fn coverage(&self, n: usize) -> Vec<f64> {
        let mut cov = vec![0.0; n];
        for (c, &w) in &self.entries {
            for &i in c {
                cov[i] += w;
            }
        }
        cov
    }

    pub fn scale(&mut self, alpha: f64) {
        for w in self.entries.values_mut() {
            *w *= alpha;
        }
        self.entries.retain(|_, w| *w > 0.0);
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockWitness {
    pub y: Vec<f64>,
    pub z: ConfigWeights,
}

/// `x̄` with one witness `(ȳ, z̄)` per block of every constraint.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FractionalPoint {
    pub x: Vec<f64>,
    pub witnesses: Vec<Vec<BlockWitness>>,
}

impl FractionalPoint {
    /// The origin with block counts `shape[t]` per constraint.
    pub fn zero(n: usize, shape: &[usize]) -> Self {
        FractionalPoint {
            x: vec![0.0; n],
            witnesses: shape
                .iter()
                .map(|&blocks| vec![BlockWitness { y: vec![0.0; n], z: ConfigWeights::default() }; blocks])
                .collect(),
        }
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, other: &FractionalPoint, alpha: f64) {
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a += alpha * b;
        }
        for (ws, os) in self.witnesses.iter_mut().zip(&other.witnesses) {
            for (w, o) in ws.iter_mut().zip(os) {
                for (a, b) in w.y.iter_mut().zip(&o.y) {
                    *a += alpha * b;
                }
                for (c, &v) in &o.z.entries {
                    w.z.add(c.clone(), alpha * v);
                }
            }
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.x {
            *v *= alpha;
        }
        for w in self.witnesses.iter_mut().flatten() {
            for v in &mut w.y {
                *v *= alpha;
            }
            w.z.scale(alpha);
        }
    }

    /// Zeroes entries below `tol` and re-balances every constraint so that
    /// `Σ_j ȳ^{t,j} = x̄` holds coordinate-wise.
    pub fn clean(&mut self, tol: f64) {
        let n = self.x.len();
        for w in self.witnesses.iter_mut().flatten() {
            for v in &mut w.y {
                if *v < tol {
                    *v = 0.0;
                }
            }
        }
        for i in 0..n {
            let mut xi = self.x[i].clamp(0.0, 1.0);
            for ws in &self.witnesses {
                xi = xi.min(ws.iter().map(|w| w.y[i]).sum());
            }
            if xi < tol {
                xi = 0.0;
            }
            self.x[i] = xi;
            for ws in &mut self.witnesses {
                let total: f64 = ws.iter().map(|w| w.y[i]).sum();
                if total <= 0.0 {
                    continue;
                }
                let factor = xi / total;
                for w in ws.iter_mut() {
                    w.y[i] *= factor;
                }
            }
        }
    }
}
