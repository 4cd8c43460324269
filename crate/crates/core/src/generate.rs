//! Seeded random instance families used by the test suites and `bench`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hull::AdditionalConstraint;
use crate::instance::{Instance, Knapsack};
use crate::oracles::Objective;
use crate::rng::stream;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveFamily {
    Modular,
    Coverage,
    Cut,
}

pub fn random_objective<R: Rng + ?Sized>(rng: &mut R, family: ObjectiveFamily, n: usize) -> Objective {
    match family {
        ObjectiveFamily::Modular => Objective::modular(0, (0..n).map(|_| rng.gen_range(1..=20)).collect()),
        ObjectiveFamily::Coverage => {
            let u = (2 * n).max(2);
            let universe = (0..u).map(|_| rng.gen_range(1..=10)).collect();
            let covers = (0..n)
                .map(|_| {
                    let k = rng.gen_range(1..=3.min(u));
                    let mut c: Vec<usize> = (0..u).collect::<Vec<_>>().choose_multiple(rng, k).copied().collect();
                    c.sort_unstable();
                    c
                })
                .collect();
            Objective::coverage(universe, covers)
        }
        ObjectiveFamily::Cut => {
            let vertices = n + 2;
            let mut edges = Vec::new();
            for u in 0..vertices {
                for v in u + 1..vertices {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v, rng.gen_range(1..=9)));
                    }
                }
            }
            Objective::cut(vertices, edges, (0..n).collect()).expect("distinct item vertices")
        }
    }
}

pub fn random_knapsack<R: Rng + ?Sized>(rng: &mut R, n: usize, bins: usize, max_weight: i128, uniform: bool) -> Knapsack {
    let weights = (0..n).map(|_| rng.gen_range(0..=max_weight)).collect();
    let base = rng.gen_range(max_weight / 2..=2 * max_weight).max(1);
    let capacities = (0..bins).map(|_| if uniform { base } else { rng.gen_range(1..=2 * max_weight) }).collect();
    Knapsack::new(weights, capacities)
}

pub fn random_additional<R: Rng + ?Sized>(rng: &mut R, n: usize) -> AdditionalConstraint {
    match rng.gen_range(0..3) {
        0 => AdditionalConstraint::Free,
        1 => AdditionalConstraint::Uniform { rank: rng.gen_range(1..=n.max(1)) },
        _ => {
            let k = rng.gen_range(1..=2.min(n.max(1)));
            let mut classes = vec![Vec::new(); k];
            for i in 0..n {
                classes[rng.gen_range(0..k)].push(i);
            }
            let caps = classes.iter().map(|c| rng.gen_range(0..=c.len())).collect();
            AdditionalConstraint::Partition { classes, caps }
        }
    }
}

/// At most 6 items, 1 or 2 constraints with up to 3 bins each, any objective
/// family and additional constraint.
pub fn tiny_instance(seed: u64, index: u64) -> Instance {
    let mut rng = stream(seed, "tiny", index);
    let n = rng.gen_range(1..=6);
    let d = rng.gen_range(1..=2);
    let family = [ObjectiveFamily::Modular, ObjectiveFamily::Coverage, ObjectiveFamily::Cut][rng.gen_range(0..3)];
    let constraints = (0..d)
        .map(|_| {
            let bins = rng.gen_range(1..=3);
            random_knapsack(&mut rng, n, bins, 10, false)
        })
        .collect();
    let objective = random_objective(&mut rng, family, n);
    let additional = random_additional(&mut rng, n);
    Instance::unlabeled(constraints, objective, additional).expect("generated instance is valid")
}

/// Monotone objective, one multiple-knapsack constraint and a uniform matroid
/// on at most 8 items.
pub fn greedy_instance(seed: u64, index: u64) -> Instance {
    let mut rng = stream(seed, "greedy", index);
    let n = rng.gen_range(3..=8);
    let family = if rng.gen_bool(0.5) { ObjectiveFamily::Modular } else { ObjectiveFamily::Coverage };
    let bins = rng.gen_range(1..=3);
    let k = random_knapsack(&mut rng, n, bins, 10, false);
    let objective = random_objective(&mut rng, family, n);
    let rank = rng.gen_range(1..=n);
    Instance::unlabeled(vec![k], objective, AdditionalConstraint::Uniform { rank }).expect("generated instance is valid")
}

/// One constraint with equal capacities, free additional constraint and a
/// monotone objective.
pub fn uniform_instance(seed: u64, index: u64) -> Instance {
    let mut rng = stream(seed, "uniform", index);
    let n = rng.gen_range(2..=8);
    let bins = rng.gen_range(1..=3);
    let family = if rng.gen_bool(0.5) { ObjectiveFamily::Modular } else { ObjectiveFamily::Coverage };
    let k = random_knapsack(&mut rng, n, bins, 10, true);
    let objective = random_objective(&mut rng, family, n);
    Instance::unlabeled(vec![k], objective, AdditionalConstraint::Free).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_deterministic() {
        assert_eq!(tiny_instance(3, 7), tiny_instance(3, 7));
        for i in 0..50 {
            let t = tiny_instance(1, i);
            assert!(t.n() <= 6 && t.d() <= 2);
            let g = greedy_instance(1, i);
            assert!(matches!(g.additional, AdditionalConstraint::Uniform { .. }));
            let u = uniform_instance(1, i);
            assert!(u.constraints[0].capacities.windows(2).all(|w| w[0] == w[1]));
        }
    }
}
