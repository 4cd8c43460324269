//! The additional down-closed constraint family and its convex hull.

use crate::error::{Error, Result};
use crate::instance::ItemId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdditionalConstraint {
    /// Every subset is allowed.
    Free,
    /// At most `rank` items.
    Uniform { rank: usize },
    /// At most `caps[k]` items from `classes[k]`; classes partition the items.
    Partition { classes: Vec<Vec<ItemId>>, caps: Vec<usize> },
}

impl AdditionalConstraint {
    pub fn check_ground(&self, n: usize) -> Result<()> {
        if let AdditionalConstraint::Partition { classes, caps } = self {
            if classes.len() != caps.len() {
                return Err(Error::Invalid("partition classes and caps differ in length".into()));
            }
            let mut seen = vec![false; n];
            for &i in classes.iter().flatten() {
                if i >= n || seen[i] {
                    return Err(Error::Invalid(format!("partition class item {i} out of range or repeated")));
                }
                seen[i] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::Invalid("partition classes must cover every item".into()));
            }
        }
        Ok(())
    }

    pub fn is_matroid(&self) -> bool {
        !matches!(self, AdditionalConstraint::Free)
    }

    /// Capacity rows `(items, cap)` describing the hull together with `0 <= x <= 1`.
    pub fn rows(&self, n: usize) -> Vec<(Vec<ItemId>, usize)> {
        match self {
            AdditionalConstraint::Free => Vec::new(),
            AdditionalConstraint::Uniform { rank } => vec![((0..n).collect(), *rank)],
            AdditionalConstraint::Partition { classes, caps } => {
                classes.iter().cloned().zip(caps.iter().copied()).collect()
            }
        }
    }

    pub fn is_member(&self, set: &[ItemId]) -> bool {
        match self {
            AdditionalConstraint::Free => true,
            AdditionalConstraint::Uniform { rank } => {
                let mut s = set.to_vec();
                s.sort_unstable();
                s.dedup();
                s.len() <= *rank
            }
            AdditionalConstraint::Partition { classes, caps } => {
                classes.iter().zip(caps).all(|(class, &cap)| {
                    class.iter().filter(|i| set.contains(i)).count() <= cap
                })
            }
        }
    }

    /// Fractional membership in the hull, up to `tol`.
    pub fn contains_point(&self, x: &[f64], tol: f64) -> bool {
        x.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
            && self
                .rows(x.len())
                .iter()
                .all(|(items, cap)| items.iter().map(|&i| x[i]).sum::<f64>() <= *cap as f64 + tol)
    }

    /// Greedy maximizer of `c · 1_S` over independent sets; exact for these families.
    pub fn linear_optimize(&self, c: &[f64]) -> Vec<ItemId> {
        let mut order: Vec<ItemId> = (0..c.len()).filter(|&i| c[i] > 0.0).collect();
        order.sort_by(|&a, &b| c[b].total_cmp(&c[a]).then(a.cmp(&b)));
        let mut chosen = Vec::new();
        for i in order {
            chosen.push(i);
            if !self.is_member(&chosen) {
                chosen.pop();
            }
        }
        chosen.sort_unstable();
        chosen
    }

    /// `{T : T ∪ S independent}` restricted to items outside `s`.
    pub fn contract(&self, s: &[ItemId]) -> AdditionalConstraint {
        match self {
            AdditionalConstraint::Free => AdditionalConstraint::Free,
            AdditionalConstraint::Uniform { rank } => {
                AdditionalConstraint::Uniform { rank: rank.saturating_sub(s.len()) }
            }
            AdditionalConstraint::Partition { classes, caps } => AdditionalConstraint::Partition {
                classes: classes.clone(),
                caps: classes
                    .iter()
                    .zip(caps)
                    .map(|(class, &cap)| cap.saturating_sub(class.iter().filter(|i| s.contains(i)).count()))
                    .collect(),
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AdditionalConstraint::Free => "free",
            AdditionalConstraint::Uniform { .. } => "uniform",
            AdditionalConstraint::Partition { .. } => "partition",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_greedy_takes_best_per_class() {
        let p = AdditionalConstraint::Partition { classes: vec![vec![0, 1], vec![2]], caps: vec![1, 1] };
        let c = [5.0, 4.0, 1.0];
        let s = p.linear_optimize(&c);
        assert_eq!(s, vec![0, 2]);
        assert_eq!(s.iter().map(|&i| c[i]).sum::<f64>(), 6.0);
    }

    #[test]
    fn uniform_membership_and_contraction() {
        let u = AdditionalConstraint::Uniform { rank: 2 };
        assert!(u.is_member(&[0, 3]));
        assert!(!u.is_member(&[0, 1, 2]));
        assert_eq!(u.contract(&[4]), AdditionalConstraint::Uniform { rank: 1 });
        assert_eq!(u.linear_optimize(&[1.0, 3.0, 2.0, -1.0]), vec![1, 2]);
    }

    #[test]
    fn hull_point_membership() {
        let u = AdditionalConstraint::Uniform { rank: 1 };
        assert!(u.contains_point(&[0.5, 0.5], 1e-9));
        assert!(!u.contains_point(&[0.7, 0.5], 1e-9));
    }

    #[test]
    fn partition_must_cover_items() {
        let p = AdditionalConstraint::Partition { classes: vec![vec![0]], caps: vec![1] };
        assert!(p.check_ground(2).is_err());
        assert!(p.check_ground(1).is_ok());
    }
}
