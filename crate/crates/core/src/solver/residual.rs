use crate::error::{Error, Result};
use crate::hull::AdditionalConstraint;
use crate::instance::{Assignment, Instance, ItemId};
use crate::oracles::{SetFunction, Shifted};
use crate::structuring::{structure_in_blocks, LeveledPartition};

/// What remains after committing to `base` with a fixed assignment:
/// items of small marginal value, residual capacities arranged in leveled
/// blocks, and the contracted additional constraint.
#[derive(Clone, Debug)]
pub struct RestrictedInstance<'a> {
    pub instance: &'a Instance,
    pub base: Vec<ItemId>,
    pub items: Vec<ItemId>,
    pub capacities: Vec<Vec<i128>>,
    pub partitions: Vec<LeveledPartition>,
    pub additional: AdditionalConstraint,
}

impl RestrictedInstance<'_> {
    pub fn objective(&self) -> Shifted<'_, crate::oracles::Objective> {
        Shifted::new(&self.instance.objective, &self.base)
    }
}

/// Builds the residual instance of `base` under `assignments`. Items whose
/// marginal exceeds `f(base) / xi` are dropped, except when `base` is empty.
pub fn residual_instance<'a>(
    instance: &'a Instance,
    base: &[ItemId],
    assignments: &[Assignment],
    xi: usize,
    n_level: usize,
) -> Result<RestrictedInstance<'a>> {
    let f = &instance.objective;
    let mut in_base = vec![false; instance.n()];
    for &i in base {
        in_base[i] = true;
    }
    let f_base = f.value_scaled(base);
    let items: Vec<ItemId> = (0..instance.n())
        .filter(|&i| !in_base[i])
        .filter(|&i| base.is_empty() || (xi as i128) * f.marginal_scaled(base, i) <= f_base)
        .collect();
    let mut capacities = Vec::new();
    let mut partitions = Vec::new();
    for (t, (k, a)) in instance.constraints.iter().zip(assignments).enumerate() {
        let caps: Vec<i128> = k.capacities.iter().zip(&a.bins).map(|(&c, items)| c - k.load(items)).collect();
        if caps.iter().any(|&c| c < 0) {
            return Err(Error::Precondition(format!("assignment overloads constraint {t}")));
        }
        partitions.push(structure_in_blocks(&caps, n_level)?);
        capacities.push(caps);
    }
    Ok(RestrictedInstance {
        instance,
        base: base.to_vec(),
        items,
        capacities,
        partitions,
        additional: instance.additional.contract(base),
    })
}
