//! Set-function oracles and the multilinear extension.

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::ItemId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ObjectiveFlags {
    pub monotone: bool,
    pub modular: bool,
}

/// A non-negative submodular set function with exact integer values over a
/// fixed denominator.
pub trait SetFunction: Sync {
    fn ground_size(&self) -> usize;

    /// Denominator of [`SetFunction::value_scaled`].
    fn scale(&self) -> i128;

    /// Exact value times `scale()`. Duplicates in `set` are ignored.
    fn value_scaled(&self, set: &[ItemId]) -> i128;

    fn flags(&self) -> ObjectiveFlags;

    /// Offset and per-item profits when the function is modular.
    fn linear(&self) -> Option<(f64, Vec<f64>)>;

    fn value(&self, set: &[ItemId]) -> f64 {
        self.value_scaled(set) as f64 / self.scale() as f64
    }

    fn marginal_scaled(&self, set: &[ItemId], i: ItemId) -> i128 {
        if set.contains(&i) {
            return 0;
        }
        let mut with = set.to_vec();
        with.push(i);
        self.value_scaled(&with) - self.value_scaled(set)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObjectiveKind {
    /// `offset + sum of profits`.
    Modular { offset: i128, profits: Vec<i128> },
    /// Total weight of universe elements covered by the chosen items.
    Coverage { universe: Vec<i128>, covers: Vec<Vec<usize>> },
    /// Weight of graph edges leaving the vertices of the chosen items.
    Cut { vertices: usize, edges: Vec<(usize, usize, i128)>, item_vertex: Vec<usize> },
    /// Explicit values for all `2^n` subsets, indexed by bitmask.
    Table { values: Vec<i128> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub scale: i128,
    n: usize,
    flags: ObjectiveFlags,
}

pub const TABLE_MAX_ITEMS: usize = 16;

impl Objective {
    pub fn new(kind: ObjectiveKind, scale: i128) -> Result<Self> {
        if scale <= 0 {
            return Err(Error::Invalid("objective scale must be positive".into()));
        }
        let (n, flags) = match &kind {
            ObjectiveKind::Modular { offset, profits } => {
                let low: i128 = offset + profits.iter().filter(|&&p| p < 0).sum::<i128>();
                if low < 0 {
                    return Err(Error::Invalid("modular objective takes negative values".into()));
                }
                let monotone = profits.iter().all(|&p| p >= 0);
                (profits.len(), ObjectiveFlags { monotone, modular: true })
            }
            ObjectiveKind::Coverage { universe, covers } => {
                if universe.iter().any(|&w| w < 0) {
                    return Err(Error::Invalid("coverage weights must be non-negative".into()));
                }
                if covers.iter().flatten().any(|&e| e >= universe.len()) {
                    return Err(Error::Invalid("coverage element out of range".into()));
                }
                (covers.len(), ObjectiveFlags { monotone: true, modular: false })
            }
            ObjectiveKind::Cut { vertices, edges, item_vertex } => {
                if edges.iter().any(|&(u, v, w)| u >= *vertices || v >= *vertices || w < 0) {
                    return Err(Error::Invalid("cut edge out of range or negative".into()));
                }
                let mut used = vec![false; *vertices];
                for &v in item_vertex {
                    if v >= *vertices || used[v] {
                        return Err(Error::Invalid(
                            "cut items must map to distinct vertices".into(),
                        ));
                    }
                    used[v] = true;
                }
                (item_vertex.len(), ObjectiveFlags { monotone: false, modular: false })
            }
            ObjectiveKind::Table { values } => {
                let n = values.len().trailing_zeros() as usize;
                if values.len() != 1 << n || n > TABLE_MAX_ITEMS {
                    return Err(Error::Invalid(format!(
                        "table needs 2^n values with n <= {TABLE_MAX_ITEMS}"
                    )));
                }
                (n, table_flags(values)?)
            }
        };
        Ok(Objective { kind, scale, n, flags })
    }

    pub fn modular(offset: i128, profits: Vec<i128>) -> Self {
        Objective::new(ObjectiveKind::Modular { offset, profits }, 1).expect("valid modular objective")
    }

    pub fn coverage(universe: Vec<i128>, covers: Vec<Vec<usize>>) -> Self {
        Objective::new(ObjectiveKind::Coverage { universe, covers }, 1).expect("valid coverage objective")
    }

    pub fn cut(vertices: usize, edges: Vec<(usize, usize, i128)>, item_vertex: Vec<usize>) -> Result<Self> {
        Objective::new(ObjectiveKind::Cut { vertices, edges, item_vertex }, 1)
    }

    pub fn table(values: Vec<i128>) -> Result<Self> {
        Objective::new(ObjectiveKind::Table { values }, 1)
    }
}

fn table_flags(values: &[i128]) -> Result<ObjectiveFlags> {
    let n = values.len().trailing_zeros() as usize;
    if values.iter().any(|&v| v < 0) {
        return Err(Error::Invalid("table objective takes negative values".into()));
    }
    let mut flags = ObjectiveFlags { monotone: true, modular: true };
    for s in 0..values.len() {
        for i in 0..n {
            if s & (1 << i) != 0 {
                continue;
            }
            let gain_i = values[s | 1 << i] - values[s];
            if gain_i < 0 {
                flags.monotone = false;
            }
            for j in i + 1..n {
                if s & (1 << j) != 0 {
                    continue;
                }
                let gain_after = values[s | 1 << i | 1 << j] - values[s | 1 << j];
                if gain_after > gain_i {
                    return Err(Error::Invalid(format!(
                        "table objective is not submodular at set {s:#b}, items {i} and {j}"
                    )));
                }
                if gain_after != gain_i {
                    flags.modular = false;
                }
            }
        }
    }
    Ok(flags)
}

impl SetFunction for Objective {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn scale(&self) -> i128 {
        self.scale
    }

    fn flags(&self) -> ObjectiveFlags {
        self.flags
    }

    fn value_scaled(&self, set: &[ItemId]) -> i128 {
        let mut chosen = vec![false; self.n];
        for &i in set {
            chosen[i] = true;
        }
        match &self.kind {
            ObjectiveKind::Modular { offset, profits } => {
                offset + (0..self.n).filter(|&i| chosen[i]).map(|i| profits[i]).sum::<i128>()
            }
            ObjectiveKind::Coverage { universe, covers } => {
                let mut covered = vec![false; universe.len()];
                let mut total = 0;
                for i in (0..self.n).filter(|&i| chosen[i]) {
                    for &e in &covers[i] {
                        if !covered[e] {
                            covered[e] = true;
                            total += universe[e];
                        }
                    }
                }
                total
            }
            ObjectiveKind::Cut { vertices, edges, item_vertex } => {
                let mut inside = vec![false; *vertices];
                for i in (0..self.n).filter(|&i| chosen[i]) {
                    inside[item_vertex[i]] = true;
                }
                edges.iter().filter(|&&(u, v, _)| inside[u] != inside[v]).map(|e| e.2).sum()
            }
            ObjectiveKind::Table { values } => {
                let mask = (0..self.n).filter(|&i| chosen[i]).fold(0usize, |m, i| m | 1 << i);
                values[mask]
            }
        }
    }

    fn linear(&self) -> Option<(f64, Vec<f64>)> {
        let s = self.scale as f64;
        match &self.kind {
            ObjectiveKind::Modular { offset, profits } => {
                Some((*offset as f64 / s, profits.iter().map(|&p| p as f64 / s).collect()))
            }
            ObjectiveKind::Table { values } if self.flags.modular => Some((
                values[0] as f64 / s,
                (0..self.n).map(|i| (values[1 << i] - values[0]) as f64 / s).collect(),
            )),
            _ => None,
        }
    }
}

/// `T -> f(base ∪ T)`, the objective of a residual instance.
pub struct Shifted<'a, F: SetFunction + ?Sized> {
    inner: &'a F,
    base: Vec<ItemId>,
    in_base: Vec<bool>,
}

impl<'a, F: SetFunction + ?Sized> Shifted<'a, F> {
    pub fn new(inner: &'a F, base: &[ItemId]) -> Self {
        let mut in_base = vec![false; inner.ground_size()];
        for &i in base {
            in_base[i] = true;
        }
        Shifted { inner, base: base.to_vec(), in_base }
    }
}

impl<F: SetFunction + ?Sized> SetFunction for Shifted<'_, F> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn scale(&self) -> i128 {
        self.inner.scale()
    }

    fn flags(&self) -> ObjectiveFlags {
        self.inner.flags()
    }

    fn value_scaled(&self, set: &[ItemId]) -> i128 {
        let mut all = self.base.clone();
        all.extend(set.iter().copied().filter(|&i| !self.in_base[i]));
        self.inner.value_scaled(&all)
    }

    fn linear(&self) -> Option<(f64, Vec<f64>)> {
        let (offset, profits) = self.inner.linear()?;
        let shift: f64 = self.base.iter().map(|&i| profits[i]).sum();
        Some((offset + shift, profits))
    }
}

/// Mean of `F(x)` together with a 95% confidence half-width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

const FRACTIONAL_EPS: f64 = 1e-12;

fn is_fractional(v: f64) -> bool {
    v > FRACTIONAL_EPS && v < 1.0 - FRACTIONAL_EPS
}

/// Items with `x_i` at one and the remaining fractional coordinates.
fn split_support(x: &[f64]) -> (Vec<ItemId>, Vec<ItemId>) {
    let ones = (0..x.len()).filter(|&i| x[i] >= 1.0 - FRACTIONAL_EPS).collect();
    let frac = (0..x.len()).filter(|&i| is_fractional(x[i])).collect();
    (ones, frac)
}

/// Draws `R` with each `i` present independently with probability `x_i`.
pub fn sample_independent<R: Rng + ?Sized>(x: &[f64], rng: &mut R) -> Vec<ItemId> {
    (0..x.len()).filter(|&i| x[i] > 0.0 && rng.gen::<f64>() < x[i]).collect()
}

/// Multilinear extension `F(x) = E[f(R)]`: closed form for modular functions
/// and integral points, Monte Carlo otherwise.
pub fn multilinear_estimate<F, R>(f: &F, x: &[f64], samples: usize, rng: &mut R) -> Estimate
where
    F: SetFunction + ?Sized,
    R: Rng + ?Sized,
{
    if let Some((offset, profits)) = f.linear() {
        let mean = offset + x.iter().zip(&profits).map(|(a, b)| a * b).sum::<f64>();
        return Estimate { mean, half_width: 0.0 };
    }
    let (ones, frac) = split_support(x);
    if frac.is_empty() {
        return Estimate { mean: f.value(&ones), half_width: 0.0 };
    }
    let samples = samples.max(2);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let mut set = ones.clone();
        set.extend(frac.iter().copied().filter(|&i| rng.gen::<f64>() < x[i]));
        let v = f.value(&set);
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Estimate { mean, half_width: 1.96 * (var / n).sqrt() }
}

pub const EXACT_FRACTIONAL_LIMIT: usize = 20;

/// Exact `F(x)` by enumerating the fractional coordinates.
pub fn multilinear_exact<F: SetFunction + ?Sized>(f: &F, x: &[f64]) -> Result<f64> {
    if let Some((offset, profits)) = f.linear() {
        return Ok(offset + x.iter().zip(&profits).map(|(a, b)| a * b).sum::<f64>());
    }
    let (ones, frac) = split_support(x);
    if frac.len() > EXACT_FRACTIONAL_LIMIT {
        return Err(Error::SizeLimit(format!(
            "{} fractional coordinates exceed {EXACT_FRACTIONAL_LIMIT}",
            frac.len()
        )));
    }
    let mut total = 0.0;
    let mut set = ones.clone();
    for mask in 0u32..1 << frac.len() {
        set.truncate(ones.len());
        let mut p = 1.0;
        for (k, &i) in frac.iter().enumerate() {
            if mask & 1 << k != 0 {
                p *= x[i];
                set.push(i);
            } else {
                p *= 1.0 - x[i];
            }
        }
        if p > 0.0 {
            total += p * f.value(&set);
        }
    }
    Ok(total)
}

/// Drops items of non-positive marginal, visiting `set` in ascending id order.
pub fn purge<F: SetFunction + ?Sized>(f: &F, set: &[ItemId]) -> Vec<ItemId> {
    let mut order = set.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut kept: Vec<ItemId> = Vec::new();
    let mut current = f.value_scaled(&kept);
    for i in order {
        kept.push(i);
        let next = f.value_scaled(&kept);
        if next >= current {
            current = next;
        } else {
            kept.pop();
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_item_coverage() -> Objective {
        // item 0 covers {e0, e1}, item 1 covers {e1, e2}
        Objective::coverage(vec![1, 2, 3], vec![vec![0, 1], vec![1, 2]])
    }

    #[test]
    fn evaluates_each_family() {
        let cov = two_item_coverage();
        assert_eq!(cov.value_scaled(&[]), 0);
        assert_eq!(cov.value_scaled(&[0]), 3);
        assert_eq!(cov.value_scaled(&[0, 1]), 6);
        let cut = Objective::cut(2, vec![(0, 1, 1)], vec![0, 1]).unwrap();
        assert_eq!(cut.value_scaled(&[0]), 1);
        assert_eq!(cut.value_scaled(&[0, 1]), 0);
        assert!(!cut.flags().monotone);
        let m = Objective::modular(1, vec![2, 4]);
        assert_eq!(m.value_scaled(&[1]), 5);
    }

    #[test]
    fn table_validation_rejects_supermodular() {
        assert!(Objective::table(vec![0, 1, 1, 3]).is_err());
        let t = Objective::table(vec![0, 2, 2, 3]).unwrap();
        assert!(t.flags().monotone && !t.flags().modular);
        let m = Objective::table(vec![1, 3, 4, 6]).unwrap();
        assert!(m.flags().modular);
        assert_eq!(m.linear(), Some((1.0, vec![2.0, 3.0])));
    }

    #[test]
    fn cut_rejects_shared_vertices() {
        assert!(Objective::cut(2, vec![(0, 1, 1)], vec![0, 0]).is_err());
    }

    #[test]
    fn modular_multilinear_is_closed_form() {
        let f = Objective::modular(0, vec![2, 4]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = multilinear_estimate(&f, &[0.5, 0.25], 10, &mut rng);
        assert_eq!(e.mean, 2.0);
        assert_eq!(e.half_width, 0.0);
    }

    #[test]
    fn integral_point_is_exact() {
        let f = two_item_coverage();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = multilinear_estimate(&f, &[1.0, 0.0], 10, &mut rng);
        assert_eq!(e, Estimate { mean: 3.0, half_width: 0.0 });
    }

    #[test]
    fn monte_carlo_matches_enumeration() {
        let f = two_item_coverage();
        let x = [0.5, 0.5];
        // (0 + 3 + 5 + 6) / 4
        let exact = multilinear_exact(&f, &x).unwrap();
        assert!((exact - 3.5).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = multilinear_estimate(&f, &x, 4000, &mut rng);
        assert!((e.mean - exact).abs() <= 3.0 * e.half_width);
    }

    #[test]
    fn purge_drops_negative_marginals() {
        let cut = Objective::cut(2, vec![(0, 1, 1)], vec![0, 1]).unwrap();
        assert_eq!(purge(&cut, &[0, 1]), vec![0]);
        let cov = two_item_coverage();
        assert_eq!(purge(&cov, &[1, 0]), vec![0, 1]);
    }

    #[test]
    fn shifted_adds_base() {
        let cov = two_item_coverage();
        let g = Shifted::new(&cov, &[0]);
        assert_eq!(g.value_scaled(&[]), 3);
        assert_eq!(g.value_scaled(&[1]), 6);
        assert_eq!(g.value_scaled(&[0, 1]), 6);
    }
}
