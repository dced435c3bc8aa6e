//! Path-cover estimate of `E[M(x) | S]`: splits on known features follow
//! `x`, splits on unknown features average both children by cover fraction.

use crate::error::Result;
use crate::tree::{Comparator, Tree, TreeEnsemble};

/// Set of known feature indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureSet {
    words: Vec<u64>,
    len: usize,
}

impl FeatureSet {
    pub fn empty(feature_count: usize) -> Self {
        Self {
            words: vec![0; feature_count.div_ceil(64)],
            len: feature_count,
        }
    }

    pub fn full(feature_count: usize) -> Self {
        let mut s = Self::empty(feature_count);
        for f in 0..feature_count {
            s.insert(f);
        }
        s
    }

    pub fn from_features(feature_count: usize, features: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(feature_count);
        for f in features {
            s.insert(f);
        }
        s
    }

    /// Panics if `feature` is outside the universe.
    pub fn insert(&mut self, feature: usize) {
        assert!(
            feature < self.len,
            "feature {feature} outside set of {}",
            self.len
        );
        self.words[feature / 64] |= 1 << (feature % 64);
    }

    #[inline]
    pub fn contains(&self, feature: usize) -> bool {
        feature < self.len && self.words[feature / 64] & (1 << (feature % 64)) != 0
    }

    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// `E[tree(x) | S]` by the cover rule.
///
/// Iterative over an explicit stack of `(node, weight)`: each leaf reached
/// contributes its value times the product of cover fractions taken at
/// unknown splits along the way.
pub fn expected_value(tree: &Tree, x: &[f64], known: &FeatureSet, comparator: Comparator) -> f64 {
    let mut total = 0.0;
    let mut stack = vec![(0usize, 1.0f64)];
    while let Some((j, weight)) = stack.pop() {
        let node = tree.node(j);
        if node.is_leaf() {
            total += weight * node.value;
            continue;
        }
        if known.contains(node.feature) {
            stack.push((tree.route(j, x, comparator).0, weight));
        } else {
            let (l, r) = (node.left.unwrap(), node.right.unwrap());
            stack.push((r, weight * tree.node(r).cover / node.cover));
            stack.push((l, weight * tree.node(l).cover / node.cover));
        }
    }
    total
}

/// `base_value + sum over trees of expected_value`.
pub fn expected_value_ensemble(
    ensemble: &TreeEnsemble,
    x: &[f64],
    known: &FeatureSet,
) -> Result<f64> {
    ensemble.check_input(x)?;
    Ok(ensemble.base_value()
        + ensemble
            .trees()
            .iter()
            .map(|t| expected_value(t, x, known, ensemble.comparator()))
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use crate::tree::TreeNode;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Test-local recursive evaluation, kept separate from the iterative one.
    fn recursive(tree: &Tree, j: usize, x: &[f64], known: &FeatureSet) -> f64 {
        let n = tree.node(j);
        if n.is_leaf() {
            return n.value;
        }
        let (l, r) = (n.left.unwrap(), n.right.unwrap());
        if known.contains(n.feature) {
            if x[n.feature] <= n.threshold {
                recursive(tree, l, x, known)
            } else {
                recursive(tree, r, x, known)
            }
        } else {
            tree.node(l).cover / n.cover * recursive(tree, l, x, known)
                + tree.node(r).cover / n.cover * recursive(tree, r, x, known)
        }
    }

    #[test]
    fn fixture_tree_values() {
        let m = synth::fixture_ensemble();
        let tree = &m.trees()[0];
        let x = [0.3, 0.8];
        let le = Comparator::LessEqual;
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(
            expected_value(tree, &x, &FeatureSet::full(2), le),
            3.0
        ));
        assert!(close(
            expected_value(tree, &x, &FeatureSet::empty(2), le),
            3.4
        ));
        assert!(close(
            expected_value(tree, &x, &FeatureSet::from_features(2, [1]), le),
            3.8
        ));
        assert!(close(
            expected_value(tree, &x, &FeatureSet::from_features(2, [0]), le),
            7.0 / 3.0
        ));
    }

    #[test]
    fn ensemble_wraps_base_and_duplicates() {
        let m = synth::fixture_ensemble();
        let x = [0.3, 0.8];
        let tree = m.trees()[0].clone();
        let doubled = TreeEnsemble::new(
            vec![tree.clone(), tree],
            0.25,
            2,
            None,
            Comparator::LessEqual,
        )
        .unwrap();
        for s in [
            FeatureSet::empty(2),
            FeatureSet::from_features(2, [0]),
            FeatureSet::full(2),
        ] {
            let single = expected_value(&m.trees()[0], &x, &s, Comparator::LessEqual);
            let e = expected_value_ensemble(&doubled, &x, &s).unwrap();
            assert!((e - (0.25 + 2.0 * single)).abs() < 1e-12);
        }
        let full = expected_value_ensemble(&m, &x, &FeatureSet::full(2)).unwrap();
        assert_eq!(full, m.predict(&x).unwrap());
        assert!(expected_value_ensemble(&m, &[0.0], &FeatureSet::empty(2)).is_err());
    }

    #[test]
    fn feature_set_beyond_one_word() {
        let mut s = FeatureSet::empty(200);
        s.insert(0);
        s.insert(63);
        s.insert(64);
        s.insert(199);
        assert_eq!(s.count(), 4);
        assert!(s.contains(64) && s.contains(199) && !s.contains(65) && !s.contains(500));
    }

    #[test]
    fn leaf_only_tree() {
        let tree = Tree::from_nodes(vec![TreeNode::leaf(-2.5, 3.0)]);
        assert_eq!(
            expected_value(&tree, &[1.0], &FeatureSet::empty(1), Comparator::LessEqual),
            -2.5
        );
    }

    proptest! {
        #[test]
        fn endpoints_bounds_and_independence(seed in 0u64..5000, mask in 0u32..256) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let features = 8;
            let tree = synth::random_tree(&mut rng, features, 5);
            let x = synth::random_row(&mut rng, features);
            let known = FeatureSet::from_features(features, (0..features).filter(|f| mask & (1 << f) != 0));
            let le = Comparator::LessEqual;
            let v = expected_value(&tree, &x, &known, le);
            prop_assert!((v - recursive(&tree, 0, &x, &known)).abs() < 1e-12);
            prop_assert!(v >= tree.min_leaf_value() - 1e-12 && v <= tree.max_leaf_value() + 1e-12);
            prop_assert_eq!(expected_value(&tree, &x, &FeatureSet::full(features), le), tree.predict(&x, le));

            let root = tree.node(0).cover;
            let mean: f64 = tree.nodes().iter().filter(|n| n.is_leaf()).map(|n| n.cover / root * n.value).sum();
            prop_assert!((expected_value(&tree, &x, &FeatureSet::empty(features), le) - mean).abs() < 1e-12);

            // coordinates outside S do not matter
            let mut y = synth::random_row(&mut rng, features);
            for f in 0..features {
                if known.contains(f) {
                    y[f] = x[f];
                }
            }
            prop_assert_eq!(v, expected_value(&tree, &y, &known, le));
        }
    }
}
