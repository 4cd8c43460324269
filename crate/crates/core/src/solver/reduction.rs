use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Instance, ItemId, Solution};
use crate::oracles::SetFunction;
use crate::rng::derive;
use crate::solver::residual::residual_instance;
use crate::solver::restricted::solve_restricted;
use crate::solver::SolverConfig;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveReport {
    pub prefixes: usize,
    pub iterations: usize,
    pub restricted_calls: usize,
    pub claim_violations: usize,
    /// Restarts whose sample was compliant for every block.
    pub compliant_samples: usize,
    /// Whether the objective and additional constraint admit the approximation guarantee.
    pub guaranteed: bool,
}

/// Subsets of `0..n` of size at most `limit`, by size then lexicographically.
fn small_subsets(n: usize, limit: usize) -> Vec<Vec<ItemId>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..limit.min(n) {
        let mut next = Vec::new();
        for s in &frontier {
            let from = s.last().map_or(0, |&l: &usize| l + 1);
            for i in from..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Assignments of `items` into bins with capacities `caps`, one per distinct
/// multiset of residual capacities (the first found in lexicographic order).
fn distinct_assignments(items: &[ItemId], weights: &[i128], caps: &[i128]) -> Vec<Assignment> {
    fn rec(
        k: usize,
        items: &[ItemId],
        weights: &[i128],
        caps: &[i128],
        loads: &mut Vec<i128>,
        current: &mut Vec<usize>,
        seen: &mut std::collections::HashSet<Vec<i128>>,
        out: &mut Vec<Assignment>,
    ) {
        if k == items.len() {
            let mut residual: Vec<i128> = caps.iter().zip(loads.iter()).map(|(c, l)| c - l).collect();
            residual.sort_unstable();
            if seen.insert(residual) {
                let mut a = Assignment::empty(caps.len());
                for (idx, &b) in current.iter().enumerate() {
                    a.bins[b].push(items[idx]);
                }
                out.push(a);
            }
            return;
        }
        let w = weights[items[k]];
        for b in 0..caps.len() {
            if loads[b] + w <= caps[b] {
                loads[b] += w;
                current.push(b);
                rec(k + 1, items, weights, caps, loads, current, seen, out);
                current.pop();
                loads[b] -= w;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, items, weights, caps, &mut vec![0; caps.len()], &mut Vec::new(), &mut Default::default(), &mut out);
    out
}

fn cartesian(lists: &[Vec<Assignment>]) -> Vec<Vec<Assignment>> {
    let mut out: Vec<Vec<Assignment>> = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |a| {
                    let mut p = prefix.clone();
                    p.push(a.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Enumerates prefixes `S` of at most `ξ` items with every feasible
/// assignment, solves each residual instance and keeps the best union.
/// Assignments leaving the same multiset of residual capacities yield
/// isomorphic residual instances and are solved once.
pub fn solve(instance: &Instance, cfg: &SolverConfig) -> Result<(Solution, SolveReport)> {
    cfg.validate()?;
    let f = &instance.objective;
    let flags = f.flags();
    let mut report = SolveReport { guaranteed: flags.monotone || !instance.additional.is_matroid(), ..Default::default() };
    let mut iterations: Vec<(Vec<ItemId>, Vec<Assignment>)> = Vec::new();
    for s in small_subsets(instance.n(), cfg.xi) {
        if !instance.additional.is_member(&s) {
            continue;
        }
        let per: Vec<Vec<Assignment>> = instance
            .constraints
            .iter()
            .map(|k| distinct_assignments(&s, &k.weights, &k.capacities))
            .collect();
        if per.iter().any(|p| p.is_empty()) {
            continue;
        }
        report.prefixes += 1;
        for combo in cartesian(&per) {
            iterations.push((s.clone(), combo));
        }
    }
    report.iterations = iterations.len();
    let results: Vec<Result<(i128, Solution, bool, usize, usize)>> = iterations
        .par_iter()
        .enumerate()
        .map(|(idx, (s, assignments))| {
            let r = residual_instance(instance, s, assignments, cfg.xi, cfg.n_level)?;
            let outcome = solve_restricted(&r, cfg, derive(cfg.seed, "iteration", idx as u64))?;
            let ran = outcome.report.restarts > 0;
            let mut selected = s.clone();
            selected.extend(outcome.selected.iter().copied());
            selected.sort_unstable();
            let merged = assignments
                .iter()
                .zip(&outcome.assignments)
                .map(|(a, b)| {
                    let mut m = a.clone();
                    for (bin, extra) in m.bins.iter_mut().zip(&b.bins) {
                        bin.extend(extra.iter().copied());
                    }
                    m.normalize();
                    m
                })
                .collect();
            let sol = Solution { selected, assignments: merged };
            Ok((f.value_scaled(&sol.selected), sol, ran, outcome.report.claim_violations, outcome.report.compliant))
        })
        .collect();
    let mut best: Option<(i128, Solution)> = None;
    for r in results {
        let (v, sol, ran, violations, compliant) = r?;
        report.restricted_calls += ran as usize;
        report.claim_violations += violations;
        report.compliant_samples += compliant;
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, sol));
        }
    }
    let solution = best.map(|b| b.1).unwrap_or_else(|| Solution::empty(instance));
    let problems = solution.violations(instance);
    if !problems.is_empty() {
        return Err(Error::Invariant(format!("solver produced an infeasible solution: {}", problems.join("; "))));
    }
    Ok((solution, report))
}
