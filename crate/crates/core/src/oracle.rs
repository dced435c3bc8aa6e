//! Exact grouped Shapley values on tree ensembles by enumerating every
//! coalition of groups. Exponential in the group count; this is the
//! correctness reference for [`crate::fast`].

use crate::error::{Error, Result};
use crate::expectation::{expected_value_ensemble, FeatureSet};
use crate::explanation::{Explanation, GroupContribution};
use crate::game::{factorial, permutation_weight_numerator};
use crate::partition::FeaturePartition;
use crate::tree::TreeEnsemble;

/// Largest group count the oracle accepts.
pub const ORACLE_MAX_GROUPS: usize = 20;

/// Weight of a coalition of `subset_size` other groups out of `k` groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetWeight {
    pub subset_size: usize,
    pub weight: f64,
}

impl SubsetWeight {
    pub fn new(subset_size: usize, k: usize) -> Self {
        let weight = permutation_weight_numerator(subset_size, k) as f64 / factorial(k) as f64;
        Self {
            subset_size,
            weight,
        }
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

pub(crate) fn check_partition(ensemble: &TreeEnsemble, partition: &FeaturePartition) -> Result<()> {
    if partition.feature_count() != ensemble.feature_count() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} features, model has {}",
            partition.feature_count(),
            ensemble.feature_count()
        )));
    }
    Ok(())
}

/// Grouped Shapley values of `x` by direct enumeration.
///
/// `v(S)` is memoized per group bitmask, so each of the `2^k` unions is
/// evaluated once and shared between all `k` groups.
pub fn brute_force_gsv(
    ensemble: &TreeEnsemble,
    x: &[f64],
    partition: &FeaturePartition,
) -> Result<Explanation> {
    ensemble.check_input(x)?;
    check_partition(ensemble, partition)?;
    let k = partition.group_count();
    if k > ORACLE_MAX_GROUPS {
        return Err(Error::GuardExceeded {
            what: "oracle partition",
            count: k,
            limit: ORACLE_MAX_GROUPS,
        });
    }

    let n = ensemble.feature_count();
    let values: Vec<f64> = (0..1usize << k)
        .map(|mask| {
            let known = FeatureSet::from_features(
                n,
                partition
                    .groups()
                    .iter()
                    .enumerate()
                    .filter(|(g, _)| mask & (1 << g) != 0)
                    .flat_map(|(_, group)| group.features.iter().copied()),
            );
            expected_value_ensemble(ensemble, x, &known)
        })
        .collect::<Result<_>>()?;

    let weights: Vec<f64> = (0..k).map(|s| SubsetWeight::new(s, k).weight).collect();
    let mut terms = Vec::with_capacity(1 << k.saturating_sub(1));
    let contributions = partition
        .groups()
        .iter()
        .enumerate()
        .map(|(g, group)| {
            let bit = 1usize << g;
            terms.clear();
            terms.extend(
                (0..1usize << k)
                    .filter(|s| s & bit == 0)
                    .map(|s| weights[s.count_ones() as usize] * (values[s | bit] - values[s])),
            );
            GroupContribution {
                name: group.name.clone(),
                gsv: pairwise_sum(&terms),
            }
        })
        .collect();

    Ok(Explanation {
        base: values[0],
        prediction: ensemble.predict(x)?,
        contributions,
    })
}

/// Classic per-feature Shapley values: the oracle under the singleton
/// partition.
pub fn brute_force_classic(ensemble: &TreeEnsemble, x: &[f64]) -> Result<Explanation> {
    let partition = FeaturePartition::singleton(&ensemble.feature_names());
    brute_force_gsv(ensemble, x, &partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use crate::tree::{Comparator, Tree, TreeNode};

    #[test]
    fn fixture_values() {
        let m = synth::fixture_ensemble();
        let p = FeaturePartition::from_indices(vec![vec![0], vec![1]], 2).unwrap();
        let e = brute_force_gsv(&m, &synth::FIXTURE_ROW, &p).unwrap();
        assert!((e.base - 3.4).abs() < 1e-12);
        assert_eq!(e.prediction, 3.0);
        assert!((e.contributions[0].gsv + 14.0 / 15.0).abs() < 1e-12);
        assert!((e.contributions[1].gsv - 8.0 / 15.0).abs() < 1e-12);
        assert!(e.efficiency_residual() < 1e-12);
        let classic = brute_force_classic(&m, &synth::FIXTURE_ROW).unwrap();
        assert_eq!(classic.gsv(), e.gsv());
    }

    #[test]
    fn one_group_gets_everything() {
        let m = synth::fixture_ensemble();
        let p = FeaturePartition::from_indices(vec![vec![0, 1]], 2).unwrap();
        let e = brute_force_gsv(&m, &synth::FIXTURE_ROW, &p).unwrap();
        assert!((e.contributions[0].gsv - (3.0 - 3.4)).abs() < 1e-12);
    }

    #[test]
    fn unused_feature_group_is_dummy() {
        let m = synth::fixture_ensemble();
        let tree = m.trees()[0].clone();
        let wide = TreeEnsemble::new(vec![tree], 0.0, 4, None, Comparator::LessEqual).unwrap();
        let p = FeaturePartition::from_indices(vec![vec![0], vec![2, 3], vec![1]], 4).unwrap();
        let e = brute_force_gsv(&wide, &[0.3, 0.8, 9.0, -9.0], &p).unwrap();
        assert_eq!(e.contributions[1].gsv, 0.0);
    }

    #[test]
    fn stump_classic() {
        // f0 <= 0.5 -> 2.0 (cover 3), else 10.0 (cover 1); v(empty) = 4.0
        let nodes = vec![
            TreeNode::split(0, 0.5, 1, 2, 4.0),
            TreeNode::leaf(2.0, 3.0),
            TreeNode::leaf(10.0, 1.0),
        ];
        let m = TreeEnsemble::new(
            vec![Tree::from_nodes(nodes)],
            0.0,
            3,
            None,
            Comparator::LessEqual,
        )
        .unwrap();
        let e = brute_force_classic(&m, &[0.2, 5.0, 5.0]).unwrap();
        assert!((e.base - 4.0).abs() < 1e-12);
        assert!((e.contributions[0].gsv - (2.0 - 4.0)).abs() < 1e-12);
        assert_eq!(e.contributions[1].gsv, 0.0);
        assert_eq!(e.contributions[2].gsv, 0.0);
    }

    #[test]
    fn guard_and_shape_errors() {
        let m = synth::fixture_ensemble();
        let p = FeaturePartition::from_indices(vec![vec![0], vec![1], vec![2]], 3).unwrap();
        assert!(matches!(
            brute_force_gsv(&m, &synth::FIXTURE_ROW, &p),
            Err(Error::InvalidPartition(_))
        ));
        assert!(brute_force_gsv(&m, &[0.1], &p).is_err());

        let names: Vec<String> = (0..21).map(|i| format!("f{i}")).collect();
        let wide =
            TreeEnsemble::new(m.trees().to_vec(), 0.0, 21, None, Comparator::LessEqual).unwrap();
        let err =
            brute_force_gsv(&wide, &[0.0; 21], &FeaturePartition::singleton(&names)).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { count: 21, .. }));
    }

    #[test]
    fn subset_weights_sum_to_one() {
        for k in 1..=ORACLE_MAX_GROUPS {
            let total: f64 = (0..1u64 << (k - 1))
                .map(|s| SubsetWeight::new(s.count_ones() as usize, k).weight)
                .sum();
            assert!((total - 1.0).abs() < 1e-9, "k={k}: {total}");
        }
    }

    #[test]
    fn efficiency_on_random_trees() {
        for i in 0..100 {
            let mut rng = synth::sample_rng(77, i);
            let m = synth::random_ensemble(&mut rng, 6, 1, 6);
            let x = synth::random_row(&mut rng, 6);
            let e = brute_force_classic(&m, &x).unwrap();
            assert!(
                e.efficiency_residual() <= 1e-9 * e.prediction.abs() + 1e-12,
                "sample {i}"
            );
        }
    }

    #[test]
    fn group_order_only_permutes_values() {
        let mut rng = synth::sample_rng(11, 0);
        let m = synth::random_ensemble(&mut rng, 6, 3, 5);
        let x = synth::random_row(&mut rng, 6);
        let p = synth::random_partition(&mut rng, 6, 4);
        let order = [2, 0, 3, 1];
        let q = p.permuted(&order).unwrap();
        let a = brute_force_gsv(&m, &x, &p).unwrap();
        let b = brute_force_gsv(&m, &x, &q).unwrap();
        for (new, &old) in order.iter().enumerate() {
            assert!((b.contributions[new].gsv - a.contributions[old].gsv).abs() < 1e-12);
            assert_eq!(b.contributions[new].name, a.contributions[old].name);
        }
    }

    #[test]
    fn symmetric_tree_symmetric_contributions() {
        // f0 and f1 play mirrored roles with identical covers and x values.
        let nodes = vec![
            TreeNode::split(0, 0.5, 1, 2, 8.0),
            TreeNode::split(1, 0.5, 3, 4, 4.0),
            TreeNode::split(1, 0.5, 5, 6, 4.0),
            TreeNode::leaf(1.0, 2.0),
            TreeNode::leaf(0.0, 2.0),
            TreeNode::leaf(0.0, 2.0),
            TreeNode::leaf(-1.0, 2.0),
        ];
        let m = TreeEnsemble::new(
            vec![Tree::from_nodes(nodes)],
            0.0,
            2,
            None,
            Comparator::LessEqual,
        )
        .unwrap();
        let e = brute_force_classic(&m, &[0.2, 0.2]).unwrap();
        assert!((e.contributions[0].gsv - e.contributions[1].gsv).abs() < 1e-12);
    }
}
