use crate::association::{block_associate, BlockAssociation};
use crate::error::{Error, Result};
use crate::grouping::{ffd_bin_pack, pack_with_grouping, Grouping};
use crate::instance::{Assignment, Block, ItemId};
use crate::lp::config::PolytopeModel;
use crate::lp::point::FractionalPoint;
use crate::oracles::{purge, SetFunction};
use crate::rng::stream;
use crate::rounding::{continuous_greedy, measured_continuous_greedy, sample_set};
use crate::solver::residual::RestrictedInstance;
use crate::solver::SolverConfig;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RestrictedReport {
    pub restarts: usize,
    pub packed: usize,
    /// Restarts where every block was compliant yet packing failed.
    pub claim_violations: usize,
    /// Restarts where every block was compliant.
    pub compliant: usize,
    pub fractional_value: f64,
}

#[derive(Clone, Debug, Default)]
pub struct RestrictedOutcome {
    pub selected: Vec<ItemId>,
    /// Assignments on the original bins of every constraint.
    pub assignments: Vec<Assignment>,
    /// Exact `g(selected)`.
    pub value_scaled: i128,
    pub report: RestrictedReport,
}

/// Whether `r` respects block `(t, j)`: singleton blocks by weight, multi-bin
/// blocks by at most `μ|K|` items per group and a light-weight budget.
#[allow(clippy::too_many_arguments)]
pub fn check_compliance(
    r: &[ItemId],
    weights: &[i128],
    block: &Block,
    associated: &[ItemId],
    grouping: Option<&Grouping>,
    scaled_y: &[f64],
    mu: f64,
) -> bool {
    let mine: Vec<ItemId> = r.iter().copied().filter(|i| associated.binary_search(i).is_ok()).collect();
    match grouping {
        None => mine.iter().map(|&i| weights[i]).sum::<i128>() <= block.capacity,
        Some(g) => {
            let limit = mu * block.size() as f64 + 1e-9;
            for k in 0..g.tau() {
                if mine.iter().filter(|&&i| g.group_of[i] == Some(k)).count() as f64 > limit {
                    return false;
                }
            }
            let light: i128 = mine.iter().filter(|&&i| g.group_of[i].is_none()).map(|&i| weights[i]).sum();
            let budget: f64 = g.light.iter().map(|&i| scaled_y[i] * weights[i] as f64).sum::<f64>()
                + mu / 4.0 * block.capacity as f64 * block.size() as f64;
            light as f64 <= budget * (1.0 + 1e-12) + 1e-9
        }
    }
}

fn fractional_point(r: &RestrictedInstance, model: &PolytopeModel, cfg: &SolverConfig, seed: u64) -> Result<FractionalPoint> {
    let g = r.objective();
    let mut rng = stream(seed, "continuous", 0);
    let flags = g.flags();
    let mut point = if flags.monotone || flags.modular {
        continuous_greedy(model, &g, &r.items, cfg.greedy(), &mut rng)?
    } else {
        measured_continuous_greedy(model, &g, &r.items, cfg.greedy(), &mut rng)?
    };
    point.clean(1e-9);
    Ok(point)
}

/// Packs `set ∩ I_j` into every block; `None` if some block overflows.
fn pack_all(
    r: &RestrictedInstance,
    set: &[ItemId],
    assoc: &[BlockAssociation],
    scaled: &FractionalPoint,
) -> Option<Vec<Assignment>> {
    let mut out = Vec::new();
    let mut placed = vec![0usize; r.instance.n()];
    for (t, k) in r.instance.constraints.iter().enumerate() {
        let mut a = Assignment::empty(k.num_bins());
        for (j, block) in r.partitions[t].blocks.iter().enumerate() {
            let mine: Vec<ItemId> =
                set.iter().copied().filter(|i| assoc[t].sets[j].binary_search(i).is_ok()).collect();
            if mine.is_empty() {
                continue;
            }
            let bins = if block.is_singleton() {
                (k.load(&mine) <= block.capacity).then(|| vec![mine.clone()])?
            } else {
                let ffd = ffd_bin_pack(&k.weights, &mine, block.capacity).ok()?;
                if ffd.len() <= block.size() {
                    ffd
                } else {
                    let g = assoc[t].groupings[j].as_ref()?;
                    let typed = pack_with_grouping(&mine, g, &scaled.witnesses[t][j].z, &k.weights, block.capacity).ok()?;
                    (typed.len() <= block.size()).then_some(typed)?
                }
            };
            for (b, items) in block.bins.iter().zip(bins) {
                for &i in &items {
                    placed[i] += 1;
                }
                a.bins[*b] = items;
            }
        }
        a.normalize();
        out.push(a);
    }
    let d = r.instance.d();
    set.iter().all(|&i| placed[i] == d).then_some(out)
}

/// Fractional optimization, sampling, association and per-block packing on
/// a restricted instance; the best of `cfg.restarts` samples is returned and
/// a failed run yields the empty set.
pub fn solve_restricted(r: &RestrictedInstance, cfg: &SolverConfig, seed: u64) -> Result<RestrictedOutcome> {
    let inst = r.instance;
    let g = r.objective();
    let empty = RestrictedOutcome {
        selected: Vec::new(),
        assignments: inst.constraints.iter().map(|k| Assignment::empty(k.num_bins())).collect(),
        value_scaled: g.value_scaled(&[]),
        report: RestrictedReport::default(),
    };
    let weights: Vec<Vec<i128>> = inst.constraints.iter().map(|k| k.weights.clone()).collect();
    let blocks: Vec<Vec<Block>> = r.partitions.iter().map(|p| p.blocks.clone()).collect();
    let model = PolytopeModel::new(inst.n(), weights, &blocks, Some(cfg.gamma), &r.items, &r.additional)
        .with_eps(cfg.epsilon);
    if !model.usable().iter().enumerate().any(|(i, &u)| u && r.items.contains(&i)) {
        return Ok(empty);
    }
    let point = fractional_point(r, &model, cfg, seed)?;
    let mut scaled = point.clone();
    scaled.scale(1.0 - cfg.delta);
    let mu = cfg.mu();
    let assoc: Vec<BlockAssociation> = (0..inst.d())
        .map(|t| {
            let ys: Vec<Vec<f64>> = scaled.witnesses[t].iter().map(|w| w.y.clone()).collect();
            block_associate(&inst.constraints[t].weights, &blocks[t], &ys, mu)
        })
        .collect::<Result<_>>()?;

    let mut best = empty;
    best.report.fractional_value = point.x.iter().sum();
    let mut report = RestrictedReport { fractional_value: best.report.fractional_value, ..Default::default() };
    let mut found = false;
    for restart in 0..cfg.restarts.max(1) {
        report.restarts += 1;
        let mut rng = stream(seed, "restart", restart as u64);
        let sample = sample_set(&point.x, cfg.delta, &r.additional, &mut rng);
        let associated = |i: &ItemId| assoc.iter().all(|a| a.sets.iter().any(|s| s.binary_search(i).is_ok()));
        let kept: Vec<ItemId> = purge(&g, &sample).into_iter().filter(associated).collect();
        let compliant = (0..inst.d()).all(|t| {
            blocks[t].iter().enumerate().all(|(j, b)| {
                check_compliance(
                    &sample,
                    &inst.constraints[t].weights,
                    b,
                    &assoc[t].sets[j],
                    assoc[t].groupings[j].as_ref(),
                    &scaled.witnesses[t][j].y,
                    mu,
                )
            })
        });
        report.compliant += compliant as usize;
        match pack_all(r, &kept, &assoc, &scaled) {
            Some(assignments) => {
                report.packed += 1;
                let value = g.value_scaled(&kept);
                if !found || value > best.value_scaled {
                    found = true;
                    best.selected = kept;
                    best.assignments = assignments;
                    best.value_scaled = value;
                }
            }
            None => report.claim_violations += compliant as usize,
        }
    }
    if !r.additional.is_member(&best.selected) {
        return Err(Error::Invariant("restricted solution violates the additional constraint".into()));
    }
    best.report = report;
    Ok(best)
}
