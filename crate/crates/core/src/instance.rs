//! Core instance model: knapsack constraints, blocks, assignments and solutions.

use crate::error::{Error, Result};
use crate::hull::AdditionalConstraint;
use crate::oracles::{Objective, SetFunction};

pub type ItemId = usize;

/// One multiple-knapsack constraint. Weights and capacities are integer
/// numerators over the shared denominator `scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Knapsack {
    pub weights: Vec<i128>,
    pub capacities: Vec<i128>,
    pub scale: i128,
    pub bin_labels: Vec<String>,
}

impl Knapsack {
    pub fn new(weights: Vec<i128>, capacities: Vec<i128>) -> Self {
        let bin_labels = (0..capacities.len()).map(|b| format!("b{b}")).collect();
        Knapsack { weights, capacities, scale: 1, bin_labels }
    }

    pub fn num_bins(&self) -> usize {
        self.capacities.len()
    }

    pub fn load(&self, items: &[ItemId]) -> i128 {
        items.iter().map(|&i| self.weights[i]).sum()
    }

    pub fn weight_f64(&self, i: ItemId) -> f64 {
        self.weights[i] as f64 / self.scale as f64
    }

    pub fn capacity_f64(&self, b: usize) -> f64 {
        self.capacities[b] as f64 / self.scale as f64
    }

    /// Copy of this constraint with different capacities on the same bins.
    pub fn with_capacities(&self, capacities: Vec<i128>) -> Self {
        Knapsack { capacities, ..self.clone() }
    }
}

/// A group of bins that all use the same capacity `capacity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub bins: Vec<usize>,
    pub capacity: i128,
}

impl Block {
    pub fn size(&self) -> usize {
        self.bins.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.bins.len() == 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub labels: Vec<String>,
    pub constraints: Vec<Knapsack>,
    pub objective: Objective,
    pub additional: AdditionalConstraint,
}

impl Instance {
    pub fn new(
        labels: Vec<String>,
        constraints: Vec<Knapsack>,
        objective: Objective,
        additional: AdditionalConstraint,
    ) -> Result<Self> {
        let n = labels.len();
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::Invalid(format!("duplicate item label {l:?}")));
            }
        }
        for (t, k) in constraints.iter().enumerate() {
            if k.weights.len() != n {
                return Err(Error::Invalid(format!(
                    "constraint {t} has {} weights for {n} items",
                    k.weights.len()
                )));
            }
            if k.weights.iter().any(|&w| w < 0) {
                return Err(Error::Invalid(format!("constraint {t} has a negative weight")));
            }
            if k.capacities.iter().any(|&c| c < 0) {
                return Err(Error::Invalid(format!("constraint {t} has a negative capacity")));
            }
            if k.bin_labels.len() != k.capacities.len() || k.scale <= 0 {
                return Err(Error::Invalid(format!("constraint {t} is malformed")));
            }
        }
        if objective.ground_size() != n {
            return Err(Error::Invalid(format!(
                "objective covers {} items, instance has {n}",
                objective.ground_size()
            )));
        }
        additional.check_ground(n)?;
        Ok(Instance { labels, constraints, objective, additional })
    }

    /// Instance with generated labels `i0, i1, ...`.
    pub fn unlabeled(
        constraints: Vec<Knapsack>,
        objective: Objective,
        additional: AdditionalConstraint,
    ) -> Result<Self> {
        let labels = (0..objective.ground_size()).map(|i| format!("i{i}")).collect();
        Instance::new(labels, constraints, objective, additional)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn d(&self) -> usize {
        self.constraints.len()
    }
}

/// Contents of every bin of one constraint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub bins: Vec<Vec<ItemId>>,
}

impl Assignment {
    pub fn empty(bins: usize) -> Self {
        Assignment { bins: vec![Vec::new(); bins] }
    }

    /// All assigned items, sorted.
    pub fn items(&self) -> Vec<ItemId> {
        let mut all: Vec<ItemId> = self.bins.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    pub fn respects(&self, knapsack: &Knapsack) -> bool {
        self.bins.len() == knapsack.num_bins()
            && self
                .bins
                .iter()
                .zip(&knapsack.capacities)
                .all(|(items, &cap)| knapsack.load(items) <= cap)
    }

    pub fn normalize(&mut self) {
        for b in &mut self.bins {
            b.sort_unstable();
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Solution {
    pub selected: Vec<ItemId>,
    pub assignments: Vec<Assignment>,
}

impl Solution {
    pub fn empty(instance: &Instance) -> Self {
        Solution {
            selected: Vec::new(),
            assignments: instance.constraints.iter().map(|k| Assignment::empty(k.num_bins())).collect(),
        }
    }

    pub fn value(&self, instance: &Instance) -> f64 {
        instance.objective.value(&self.selected)
    }

    pub fn value_scaled(&self, instance: &Instance) -> i128 {
        instance.objective.value_scaled(&self.selected)
    }

    /// Every way this solution fails to be feasible; empty when feasible.
    pub fn violations(&self, instance: &Instance) -> Vec<String> {
        let n = instance.n();
        let mut out = Vec::new();
        let mut selected = vec![false; n];
        for &i in &self.selected {
            if i >= n {
                out.push(format!("selected item {i} out of range"));
                continue;
            }
            if selected[i] {
                out.push(format!("item {} selected twice", instance.labels[i]));
            }
            selected[i] = true;
        }
        if !instance.additional.is_member(&self.selected) {
            out.push("selected set violates the additional constraint".to_string());
        }
        if self.assignments.len() != instance.d() {
            out.push(format!(
                "{} assignments for {} constraints",
                self.assignments.len(),
                instance.d()
            ));
            return out;
        }
        for (t, (a, k)) in self.assignments.iter().zip(&instance.constraints).enumerate() {
            if a.bins.len() != k.num_bins() {
                out.push(format!("constraint {t}: {} bins, expected {}", a.bins.len(), k.num_bins()));
                continue;
            }
            let mut count = vec![0usize; n];
            for (b, items) in a.bins.iter().enumerate() {
                for &i in items {
                    if i >= n {
                        out.push(format!("constraint {t}: bin {b} holds unknown item {i}"));
                        continue;
                    }
                    count[i] += 1;
                    if !selected[i] {
                        out.push(format!(
                            "constraint {t}: item {} assigned but not selected",
                            instance.labels[i]
                        ));
                    }
                }
                let items: Vec<ItemId> = items.iter().copied().filter(|&i| i < n).collect();
                if k.load(&items) > k.capacities[b] {
                    out.push(format!("constraint {t}: bin {} over capacity", k.bin_labels[b]));
                }
            }
            for i in 0..n {
                if selected[i] && count[i] != 1 {
                    out.push(format!(
                        "constraint {t}: item {} assigned {} times",
                        instance.labels[i], count[i]
                    ));
                }
            }
        }
        out
    }

    pub fn is_feasible(&self, instance: &Instance) -> bool {
        self.violations(instance).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Instance {
        Instance::unlabeled(
            vec![Knapsack::new(vec![2, 3, 4], vec![5, 4])],
            Objective::modular(0, vec![1, 1, 1]),
            AdditionalConstraint::Free,
        )
        .unwrap()
    }

    #[test]
    fn feasible_solution_has_no_violations() {
        let inst = tiny();
        let sol = Solution {
            selected: vec![0, 1, 2],
            assignments: vec![Assignment { bins: vec![vec![0, 1], vec![2]] }],
        };
        assert!(sol.is_feasible(&inst));
        assert_eq!(sol.value_scaled(&inst), 3);
    }

    #[test]
    fn detects_overload_and_missing_items() {
        let inst = tiny();
        let sol = Solution {
            selected: vec![0, 1, 2],
            assignments: vec![Assignment { bins: vec![vec![0, 2], vec![]] }],
        };
        let v = sol.violations(&inst);
        assert!(v.iter().any(|m| m.contains("over capacity")));
        assert!(v.iter().any(|m| m.contains("assigned 0 times")));
    }

    #[test]
    fn rejects_misaligned_weights() {
        let err = Instance::unlabeled(
            vec![Knapsack::new(vec![1, 2], vec![5])],
            Objective::modular(0, vec![1, 1, 1]),
            AdditionalConstraint::Free,
        );
        assert!(err.is_err());
    }
}
