//! Continuous optimization of the multilinear extension and rounding.

use rand::Rng;

use crate::error::{Error, Result};
use crate::hull::AdditionalConstraint;
use crate::instance::ItemId;
use crate::lp::config::LinearOracle;
use crate::lp::point::FractionalPoint;
use crate::oracles::{multilinear_exact, SetFunction};

const SNAP: f64 = 1e-12;

fn snap(v: f64) -> f64 {
    if v < SNAP {
        0.0
    } else if v > 1.0 - SNAP {
        1.0
    } else {
        v
    }
}

fn fractional(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

/// Fractional coordinates up to which endpoint comparisons enumerate exactly.
pub const EXACT_COMPARE_LIMIT: usize = 12;

/// Whether `F(a) >= F(b)`, plus whether the sampled comparison was within
/// its confidence half-width.
fn compare<F, R>(f: &F, a: &[f64], b: &[f64], samples: usize, rng: &mut R) -> (bool, bool)
where
    F: SetFunction + ?Sized,
    R: Rng + ?Sized,
{
    let frac = (0..a.len()).filter(|&i| fractional(a[i]) || fractional(b[i])).count();
    if f.linear().is_some() || frac <= EXACT_COMPARE_LIMIT {
        if let (Ok(fa), Ok(fb)) = (multilinear_exact(f, a), multilinear_exact(f, b)) {
            return (fa >= fb, false);
        }
    }
    let samples = samples.max(2);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut sa = Vec::new();
    let mut sb = Vec::new();
    for _ in 0..samples {
        sa.clear();
        sb.clear();
        for i in 0..a.len() {
            if a[i] == 0.0 && b[i] == 0.0 {
                continue;
            }
            let u: f64 = rng.gen();
            if u < a[i] {
                sa.push(i);
            }
            if u < b[i] {
                sb.push(i);
            }
        }
        let d = f.value(&sa) - f.value(&sb);
        sum += d;
        sum_sq += d * d;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    let half = 1.96 * (var / n).sqrt();
    (mean >= 0.0, mean.abs() <= half)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PipageReport {
    /// The one positive-cost coordinate rounded on its own, if any.
    pub exceptional: Option<ItemId>,
    /// Endpoint choices a sampled comparison could not separate.
    pub ambiguous: usize,
}

/// Rounds the coordinates of `group` to integers, moving along directions
/// that keep `Σ c_i x_i` fixed and choosing the endpoint with larger `F`.
/// Only one coordinate is rounded without a partner, so
/// `Σ c x' <= Σ c x + c_{i*}`.
pub fn pipage<F, R>(
    x: &[f64],
    f: &F,
    group: &[ItemId],
    costs: &[f64],
    samples: usize,
    rng: &mut R,
) -> (Vec<f64>, PipageReport)
where
    F: SetFunction + ?Sized,
    R: Rng + ?Sized,
{
    let mut x: Vec<f64> = x.iter().map(|&v| snap(v)).collect();
    let mut report = PipageReport::default();
    let mut order = group.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut choose = |x: &mut Vec<f64>, a: Vec<f64>, b: Vec<f64>, rng: &mut R| {
        let (a_better, ambiguous) = compare(f, &a, &b, samples, rng);
        report.ambiguous += ambiguous as usize;
        *x = if a_better { a } else { b };
    };
    // Zero-cost coordinates do not touch the budget.
    for &i in &order {
        if fractional(x[i]) && costs[i] <= 0.0 {
            let mut up = x.clone();
            up[i] = 1.0;
            let mut down = x.clone();
            down[i] = 0.0;
            choose(&mut x, up, down, rng);
        }
    }
    loop {
        let frac: Vec<ItemId> = order.iter().copied().filter(|&i| fractional(x[i])).take(2).collect();
        match frac[..] {
            [] => break,
            [i] => {
                report.exceptional = Some(i);
                let mut up = x.clone();
                up[i] = 1.0;
                let mut down = x.clone();
                down[i] = 0.0;
                choose(&mut x, up, down, rng);
            }
            [i, j] => {
                let (ci, cj) = (costs[i], costs[j]);
                let t_up = ((1.0 - x[i]) * ci).min(x[j] * cj);
                let t_down = (x[i] * ci).min((1.0 - x[j]) * cj);
                let mut a = x.clone();
                a[i] = snap(x[i] + t_up / ci);
                a[j] = snap(x[j] - t_up / cj);
                if (1.0 - x[i]) * ci <= x[j] * cj {
                    a[i] = 1.0;
                } else {
                    a[j] = 0.0;
                }
                let mut b = x.clone();
                b[i] = snap(x[i] - t_down / ci);
                b[j] = snap(x[j] + t_down / cj);
                if x[i] * ci <= (1.0 - x[j]) * cj {
                    b[i] = 0.0;
                } else {
                    b[j] = 1.0;
                }
                choose(&mut x, a, b, rng);
            }
            _ => unreachable!(),
        }
    }
    (x, report)
}

/// Random `R` with `Pr[i ∈ R] = (1 - δ)² x_i`: independent for the free
/// family, pairwise dependent rounding per class for matroids, so `R` is
/// always independent.
pub fn sample_set<R: Rng + ?Sized>(
    x: &[f64],
    delta: f64,
    constraint: &AdditionalConstraint,
    rng: &mut R,
) -> Vec<ItemId> {
    let n = x.len();
    let factor = (1.0 - delta) * (1.0 - delta);
    let p: Vec<f64> = x.iter().map(|&v| (v * factor).clamp(0.0, 1.0)).collect();
    let mut out: Vec<ItemId> = match constraint {
        AdditionalConstraint::Free => (0..n).filter(|&i| p[i] > 0.0 && rng.gen::<f64>() < p[i]).collect(),
        _ => constraint
            .rows(n)
            .into_iter()
            .flat_map(|(class, cap)| dependent_round(&p, &class, cap, rng))
            .collect(),
    };
    out.sort_unstable();
    out
}

/// Rounds `p` on `class` keeping the sum, then trims to `cap` (only reached
/// through floating-point drift).
fn dependent_round<R: Rng + ?Sized>(p: &[f64], class: &[ItemId], cap: usize, rng: &mut R) -> Vec<ItemId> {
    let mut v: Vec<f64> = class.iter().map(|&i| snap(p[i])).collect();
    let mut frac: Vec<usize> = (0..v.len()).filter(|&k| fractional(v[k])).collect();
    frac.reverse();
    while frac.len() >= 2 {
        let a = frac[frac.len() - 1];
        let b = frac[frac.len() - 2];
        let up = (1.0 - v[a]).min(v[b]);
        let down = v[a].min(1.0 - v[b]);
        if rng.gen::<f64>() * (up + down) < down {
            v[a] += up;
            v[b] -= up;
        } else {
            v[a] -= down;
            v[b] += down;
        }
        v[a] = snap(v[a]);
        v[b] = snap(v[b]);
        // The pair always settles at least one coordinate.
        if (1.0 - v[a]).min(v[a]) <= (1.0 - v[b]).min(v[b]) {
            v[a] = v[a].round();
        } else {
            v[b] = v[b].round();
        }
        frac.retain(|&k| fractional(v[k]));
    }
    if let Some(&k) = frac.first() {
        v[k] = if rng.gen::<f64>() < v[k] { 1.0 } else { 0.0 };
    }
    let mut chosen: Vec<ItemId> = (0..v.len()).filter(|&k| v[k] == 1.0).map(|k| class[k]).collect();
    chosen.truncate(cap);
    chosen
}

/// `E[f(R + i) - f(R)]` for `R ~ x`, over `items`.
pub fn marginal_gradient<F, R>(f: &F, x: &[f64], items: &[ItemId], samples: usize, rng: &mut R) -> Vec<f64>
where
    F: SetFunction + ?Sized,
    R: Rng + ?Sized,
{
    let n = x.len();
    let mut grad = vec![0.0; n];
    if let Some((_, profits)) = f.linear() {
        for &i in items {
            grad[i] = profits[i] * (1.0 - x[i]);
        }
        return grad;
    }
    let exact = (0..n).all(|i| !fractional(x[i]));
    let rounds = if exact { 1 } else { samples.max(1) };
    let mut set = Vec::new();
    let mut member = vec![false; n];
    for _ in 0..rounds {
        set.clear();
        for i in 0..n {
            member[i] = x[i] >= 1.0 || (x[i] > 0.0 && rng.gen::<f64>() < x[i]);
            if member[i] {
                set.push(i);
            }
        }
        let base = f.value(&set);
        for &i in items {
            if member[i] {
                continue;
            }
            set.push(i);
            grad[i] += f.value(&set) - base;
            set.pop();
        }
    }
    for g in &mut grad {
        *g /= rounds as f64;
    }
    grad
}

#[derive(Clone, Copy, Debug)]
pub struct GreedyParams {
    pub steps: usize,
    pub samples: usize,
}

impl Default for GreedyParams {
    fn default() -> Self {
        GreedyParams { steps: 20, samples: 200 }
    }
}

/// Continuous greedy for monotone objectives: `x += v / T` with `v` the
/// oracle's maximizer of the sampled gradient.
pub fn continuous_greedy<F, R>(
    oracle: &dyn LinearOracle,
    f: &F,
    items: &[ItemId],
    params: GreedyParams,
    rng: &mut R,
) -> Result<FractionalPoint>
where
    F: SetFunction + ?Sized,
    R: Rng + ?Sized,
{
    let flags = f.flags();
    if !flags.monotone && !flags.modular {
        return Err(Error::Precondition("continuous greedy needs a monotone objective".into()));
    }
    let n = oracle.n();
    let mut point = FractionalPoint::zero(n, &oracle.shape());
    if let Some((_, profits)) = f.linear() {
        let mut c = vec![0.0; n];
        for &i in items {
            c[i] = profits[i];
        }
        return oracle.maximize(&c);
    }
    let steps = params.steps.max(1);
    for _ in 0..steps {
        let grad = marginal_gradient(f, &point.x, items, params.samples, rng);
        let v = oracle.maximize(&grad)?;
        point.add_scaled(&v, 1.0 / steps as f64);
    }
    point.clean(1e-12);
    Ok(point)
}

/// Measured continuous greedy for non-monotone objectives: `x += v ⊙ (1 - x) / T`.
pub fn measured_continuous_greedy<F, R>(
    oracle: &dyn LinearOracle,
    f: &F,
    items: &[ItemId],
    params: GreedyParams,
    rng: &mut R,
) -> Result<FractionalPoint>
where
    F: SetFunction + ?Sized,
    R: Rng + ?Sized,
{
    let n = oracle.n();
    let mut point = FractionalPoint::zero(n, &oracle.shape());
    let steps = params.steps.max(1);
    let alpha = 1.0 / steps as f64;
    for _ in 0..steps {
        let grad = marginal_gradient(f, &point.x, items, params.samples, rng);
        let v = oracle.maximize(&grad)?;
        let keep: Vec<f64> = point.x.iter().map(|&xi| (1.0 - xi).max(0.0)).collect();
        for i in 0..n {
            point.x[i] += alpha * v.x[i] * keep[i];
        }
        for (ws, vs) in point.witnesses.iter_mut().zip(&v.witnesses) {
            for (w, vw) in ws.iter_mut().zip(vs) {
                for i in 0..n {
                    w.y[i] += alpha * vw.y[i] * keep[i];
                }
                for (config, &z) in &vw.z.entries {
                    w.z.add(config.clone(), alpha * z);
                }
            }
        }
    }
    point.clean(1e-12);
    Ok(point)
}
