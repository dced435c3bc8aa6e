//! Polynomial-time grouped Shapley values for trees.
//!
//! One depth-first pass per tree. Along the current root-to-node path we keep
//! one [`PathEntry`] per distinct feature *group*, carrying the cover flow
//! when the group is unknown (`zero_fraction`), whether `x` follows this
//! branch when the group is known (`one_fraction`), and the permutation
//! weights of every coalition size. A split on a group already on the path
//! is merged into that group's entry by unwinding it first, so coalition
//! sizes count groups, not features. At each leaf, every entry receives
//! `unwound_weight_sum * (one - zero) * leaf_value`.
//!
//! Cost is `O(L * D^2)` per tree for `L` leaves and depth `D`.

use crate::error::{Error, Result};
use crate::expectation::{expected_value_ensemble, FeatureSet};
use crate::explanation::{Explanation, GroupContribution};
use crate::oracle::check_partition;
use crate::partition::FeaturePartition;
use crate::tree::{Comparator, Tree, TreeEnsemble};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEntry {
    /// Split feature standing in for its group. `None` only for the root
    /// placeholder that seeds the weights.
    pub feature: Option<usize>,
    pub zero_fraction: f64,
    pub one_fraction: f64,
    pub weight: f64,
}

/// Unique-group path from the root to the current node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathState {
    entries: Vec<PathEntry>,
}

impl PathState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            entries: Vec::with_capacity(capacity),
        }
    }

    pub fn entries(&self) -> &[PathEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Copy of `self` extended by one entry; see [`extend`](Self::extend).
    pub fn weight_update(
        &self,
        zero_fraction: f64,
        one_fraction: f64,
        feature: Option<usize>,
    ) -> Self {
        let mut next = Self::with_capacity(self.len() + 1);
        next.entries.extend_from_slice(&self.entries);
        next.extend(zero_fraction, one_fraction, feature);
        next
    }

    /// Appends an entry and redistributes weights: each coalition size either
    /// stays (the new group is unknown, scaled by `zero_fraction`) or grows by
    /// one (the new group is known, scaled by `one_fraction`).
    pub fn extend(&mut self, zero_fraction: f64, one_fraction: f64, feature: Option<usize>) {
        let l = self.entries.len();
        self.entries.push(PathEntry {
            feature,
            zero_fraction,
            one_fraction,
            weight: if l == 0 { 1.0 } else { 0.0 },
        });
        let denom = (l + 1) as f64;
        for i in (0..l).rev() {
            let w = self.entries[i].weight;
            self.entries[i + 1].weight += one_fraction * w * (i + 1) as f64 / denom;
            self.entries[i].weight = zero_fraction * w * (l - i) as f64 / denom;
        }
    }

    /// Copy of `self` with entry `index` removed; see
    /// [`unwind_in_place`](Self::unwind_in_place).
    pub fn unwind(&self, index: usize) -> Result<Self> {
        let mut next = self.clone();
        next.unwind_in_place(index)?;
        Ok(next)
    }

    /// Removes entry `index`, restoring the weights the path would have had if
    /// that entry had never been extended.
    pub fn unwind_in_place(&mut self, index: usize) -> Result<()> {
        let len = self.check_index(index)?;
        let depth = len - 1;
        let PathEntry {
            zero_fraction: zero,
            one_fraction: one,
            ..
        } = self.entries[index];
        let denom = (depth + 1) as f64;
        let mut next_one = self.entries[depth].weight;
        for i in (0..depth).rev() {
            if one != 0.0 {
                let kept = self.entries[i].weight;
                self.entries[i].weight = next_one * denom / ((i + 1) as f64 * one);
                next_one = kept - self.entries[i].weight * zero * (depth - i) as f64 / denom;
            } else {
                self.entries[i].weight =
                    self.entries[i].weight * denom / (zero * (depth - i) as f64);
            }
        }
        for i in index..depth {
            let next = self.entries[i + 1];
            let e = &mut self.entries[i];
            e.feature = next.feature;
            e.zero_fraction = next.zero_fraction;
            e.one_fraction = next.one_fraction;
        }
        self.entries.pop();
        Ok(())
    }

    /// Total weight left after removing entry `index`, without building the
    /// unwound path.
    pub fn unwound_weight_sum(&self, index: usize) -> Result<f64> {
        self.check_index(index)?;
        Ok(self.unwound_weight_sum_unchecked(index))
    }

    #[inline]
    fn unwound_weight_sum_unchecked(&self, index: usize) -> f64 {
        let depth = self.entries.len() - 1;
        let PathEntry {
            zero_fraction: zero,
            one_fraction: one,
            ..
        } = self.entries[index];
        let denom = (depth + 1) as f64;
        let mut next_one = self.entries[depth].weight;
        let mut total = 0.0;
        for i in (0..depth).rev() {
            if one != 0.0 {
                let w = next_one * denom / ((i + 1) as f64 * one);
                total += w;
                next_one = self.entries[i].weight - w * zero * (depth - i) as f64 / denom;
            } else {
                total += self.entries[i].weight / zero * denom / (depth - i) as f64;
            }
        }
        total
    }

    fn check_index(&self, index: usize) -> Result<usize> {
        let len = self.entries.len();
        if index >= len {
            return Err(Error::IndexOutOfRange { index, len });
        }
        Ok(len)
    }

    /// Entry whose feature shares a group with `group`.
    fn find_group(&self, group: usize, partition: &FeaturePartition) -> Option<usize> {
        self.entries.iter().position(|e| {
            e.feature
                .is_some_and(|f| partition.group_of_unchecked(f) == group)
        })
    }
}

struct Walk<'a> {
    tree: &'a Tree,
    x: &'a [f64],
    partition: &'a FeaturePartition,
    comparator: Comparator,
    phi: Vec<f64>,
}

impl Walk<'_> {
    fn expand(
        &mut self,
        node: usize,
        parent: &PathState,
        zero_fraction: f64,
        one_fraction: f64,
        feature: Option<usize>,
    ) {
        let mut path = parent.weight_update(zero_fraction, one_fraction, feature);
        let current = self.tree.node(node);
        if current.is_leaf() {
            for (i, entry) in path.entries.iter().enumerate().skip(1) {
                let w = path.unwound_weight_sum_unchecked(i);
                let group = self
                    .partition
                    .group_of_unchecked(entry.feature.expect("only the root entry is empty"));
                self.phi[group] += w * (entry.one_fraction - entry.zero_fraction) * current.value;
            }
            return;
        }

        let (hot, cold) = self.tree.route(node, self.x, self.comparator);
        let group = self.partition.group_of_unchecked(current.feature);
        let (mut incoming_zero, mut incoming_one) = (1.0, 1.0);
        if let Some(k) = path.find_group(group, self.partition) {
            incoming_zero = path.entries[k].zero_fraction;
            incoming_one = path.entries[k].one_fraction;
            path.unwind_in_place(k).expect("index from find_group");
        }
        let hot_zero = self.tree.node(hot).cover / current.cover;
        let cold_zero = self.tree.node(cold).cover / current.cover;
        self.expand(
            hot,
            &path,
            incoming_zero * hot_zero,
            incoming_one,
            Some(current.feature),
        );
        self.expand(
            cold,
            &path,
            incoming_zero * cold_zero,
            0.0,
            Some(current.feature),
        );
    }
}

/// Per-group contributions of a single tree, in partition order. Excludes the
/// tree's expected value, which goes into the explanation's base.
///
/// `x` and `partition` must already be checked against the tree's model.
pub fn tree_gsv(
    tree: &Tree,
    x: &[f64],
    partition: &FeaturePartition,
    comparator: Comparator,
) -> Vec<f64> {
    let mut walk = Walk {
        tree,
        x,
        partition,
        comparator,
        phi: vec![0.0; partition.group_count()],
    };
    walk.expand(0, &PathState::new(), 1.0, 1.0, None);
    walk.phi
}

/// Grouped Shapley explanation of `x`, summing [`tree_gsv`] over trees in
/// tree order.
pub fn ensemble_gsv(
    ensemble: &TreeEnsemble,
    x: &[f64],
    partition: &FeaturePartition,
) -> Result<Explanation> {
    ensemble.check_input(x)?;
    check_partition(ensemble, partition)?;
    let mut phi = vec![0.0; partition.group_count()];
    for tree in ensemble.trees() {
        for (acc, v) in phi
            .iter_mut()
            .zip(tree_gsv(tree, x, partition, ensemble.comparator()))
        {
            *acc += v;
        }
    }
    let base = expected_value_ensemble(ensemble, x, &FeatureSet::empty(ensemble.feature_count()))?;
    Ok(Explanation {
        base,
        prediction: ensemble.predict(x)?,
        contributions: partition
            .names()
            .zip(phi)
            .map(|(name, gsv)| GroupContribution {
                name: name.to_string(),
                gsv,
            })
            .collect(),
    })
}

/// Classic per-feature values: [`ensemble_gsv`] under the singleton partition.
pub fn ensemble_classic(ensemble: &TreeEnsemble, x: &[f64]) -> Result<Explanation> {
    ensemble_gsv(
        ensemble,
        x,
        &FeaturePartition::singleton(&ensemble.feature_names()),
    )
}
