use crate::error::{Error, Result};
use crate::grouping::{compute_grouping, ffd_bin_pack};
use crate::hull::AdditionalConstraint;
use crate::instance::{Assignment, Block, Instance, ItemId, Solution};
use crate::lp::config::PolytopeModel;
use crate::oracles::SetFunction;
use crate::rng::stream;
use crate::rounding::{continuous_greedy, measured_continuous_greedy, pipage};
use crate::solver::SolverConfig;

/// Heavy/light threshold used for `m` bins.
pub fn uniform_mu(m: usize, cfg: &SolverConfig) -> f64 {
    let log = (m as f64).ln();
    let theory = if log > 0.0 { log.powf(-0.25) } else { f64::INFINITY };
    theory.min(0.5).min(cfg.mu())
}

/// Single constraint with equal capacities: fractional optimum over the
/// block polytope of all bins, shrunk by `1 - 4μ`, pipage-rounded group by
/// group and then on the light items, and packed by first-fit decreasing.
pub fn solve_uniform(instance: &Instance, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    if instance.d() != 1 {
        return Err(Error::Precondition("uniform solver needs exactly one knapsack constraint".into()));
    }
    if !matches!(instance.additional, AdditionalConstraint::Free) {
        return Err(Error::Precondition("uniform solver needs a free additional constraint".into()));
    }
    let k = &instance.constraints[0];
    let m = k.num_bins();
    let capacity = k.capacities[0];
    if k.capacities.iter().any(|&c| c != capacity) {
        return Err(Error::Precondition("capacities are not uniform".into()));
    }
    let n = instance.n();
    let f = &instance.objective;
    let block = Block { bins: (0..m).collect(), capacity };
    let all: Vec<ItemId> = (0..n).collect();
    let model = PolytopeModel::new(n, vec![k.weights.clone()], &[vec![block.clone()]], None, &all, &AdditionalConstraint::Free)
        .with_eps(cfg.epsilon);
    let mut rng = stream(cfg.seed, "uniform", 0);
    let point = if f.flags().monotone || f.flags().modular {
        continuous_greedy(&model, f, &all, cfg.greedy(), &mut rng)?
    } else {
        measured_continuous_greedy(&model, f, &all, cfg.greedy(), &mut rng)?
    };
    let mu = uniform_mu(m, cfg);
    let shrink = (1.0 - 4.0 * mu).max(0.0);
    let y: Vec<f64> = point.witnesses[0][0].y.iter().map(|v| v * shrink).collect();
    let grouping = compute_grouping(&y, &k.weights, capacity, m, mu);
    let mut x = y.clone();
    let unit = vec![1.0; n];
    for group in &grouping.groups {
        x = pipage(&x, f, group, &unit, cfg.samples, &mut rng).0;
    }
    let costs: Vec<f64> = k.weights.iter().map(|&w| w as f64).collect();
    x = pipage(&x, f, &grouping.light, &costs, cfg.samples, &mut rng).0;
    let selected: Vec<ItemId> = (0..n).filter(|&i| x[i] >= 1.0).collect();
    let empty = Solution::empty(instance);
    let Ok(bins) = ffd_bin_pack(&k.weights, &selected, capacity) else {
        return Ok(empty);
    };
    if bins.len() > m {
        return Ok(empty);
    }
    let mut a = Assignment::empty(m);
    for (slot, items) in a.bins.iter_mut().zip(bins) {
        *slot = items;
    }
    a.normalize();
    let solution = Solution { selected, assignments: vec![a] };
    let problems = solution.violations(instance);
    if !problems.is_empty() {
        return Err(Error::Invariant(format!("uniform solver produced an infeasible solution: {}", problems.join("; "))));
    }
    Ok(solution)
}
