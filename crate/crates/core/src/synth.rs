//! Synthetic models, partitions and datasets for tests, validation sweeps and
//! benchmarks. Everything is driven by a caller-supplied RNG so runs replay
//! from a seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::aggregate::Dataset;
use crate::partition::{FeatureGroup, FeaturePartition};
use crate::tree::{Comparator, Tree, TreeEnsemble, TreeNode};

/// Feature count of the remote-sensing shaped configuration.
pub const SOYBEAN_FEATURES: usize = 1131;
/// Features per band group in that configuration.
pub const SOYBEAN_BAND_SIZE: usize = 102;
pub const SOYBEAN_BANDS: usize = 11;

/// Two-feature tree used throughout the docs and tests:
///
/// ```text
///            f0 <= 0.5 (10)
///           /             \
///     f1 <= 0.5 (6)      5.0 (4)
///      /       \
///   1.0 (2)   3.0 (4)
/// ```
pub fn fixture_ensemble() -> TreeEnsemble {
    let nodes = vec![
        TreeNode::split(0, 0.5, 1, 2, 10.0),
        TreeNode::split(1, 0.5, 3, 4, 6.0),
        TreeNode::leaf(5.0, 4.0),
        TreeNode::leaf(1.0, 2.0),
        TreeNode::leaf(3.0, 4.0),
    ];
    TreeEnsemble::new(
        vec![Tree::from_nodes(nodes)],
        0.0,
        2,
        Some(vec!["f0".into(), "f1".into()]),
        Comparator::LessEqual,
    )
    .expect("fixture is valid")
}

/// The row explained in the fixture examples.
pub const FIXTURE_ROW: [f64; 2] = [0.3, 0.8];

/// Per-sample RNG: sample `index` of a sweep seeded with `seed` always sees
/// the same stream, independent of the other samples.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Thresholds and inputs share a coarse grid part of the time so that ties
/// `x == t` are exercised.
fn grid_or_uniform(rng: &mut impl Rng) -> f64 {
    if rng.gen_bool(0.3) {
        f64::from(rng.gen_range(0..=10)) / 10.0
    } else {
        rng.gen()
    }
}

/// Random tree of depth at most `max_depth` with consistent covers. The root
/// always splits when `max_depth > 0`.
pub fn random_tree(rng: &mut impl Rng, features: usize, max_depth: usize) -> Tree {
    let mut nodes = Vec::new();
    let cover = rng.gen_range(10.0..1000.0);
    grow(rng, &mut nodes, features, max_depth, 0, cover, 0.8);
    Tree::from_nodes(nodes)
}

/// Full binary tree: every leaf at depth `depth`.
pub fn perfect_tree(rng: &mut impl Rng, features: usize, depth: usize) -> Tree {
    let mut nodes = Vec::new();
    let cover = rng.gen_range(10.0..1000.0);
    grow(rng, &mut nodes, features, depth, 0, cover, 1.0);
    Tree::from_nodes(nodes)
}

fn grow(
    rng: &mut impl Rng,
    nodes: &mut Vec<TreeNode>,
    features: usize,
    max_depth: usize,
    depth: usize,
    cover: f64,
    split_prob: f64,
) -> usize {
    let index = nodes.len();
    let split = depth < max_depth && (depth == 0 || rng.gen_bool(split_prob));
    if !split {
        nodes.push(TreeNode::leaf(rng.gen_range(-5.0..5.0), cover));
        return index;
    }
    let feature = rng.gen_range(0..features);
    let threshold = grid_or_uniform(rng);
    let fraction = rng.gen_range(0.05..0.95);
    let left_cover = cover * fraction;
    nodes.push(TreeNode::split(feature, threshold, 0, 0, cover));
    let left = grow(
        rng,
        nodes,
        features,
        max_depth,
        depth + 1,
        left_cover,
        split_prob,
    );
    let right = grow(
        rng,
        nodes,
        features,
        max_depth,
        depth + 1,
        cover - left_cover,
        split_prob,
    );
    nodes[index].left = Some(left);
    nodes[index].right = Some(right);
    index
}

pub fn random_row(rng: &mut impl Rng, features: usize) -> Vec<f64> {
    (0..features).map(|_| grid_or_uniform(rng)).collect()
}

pub fn random_ensemble(
    rng: &mut impl Rng,
    features: usize,
    trees: usize,
    max_depth: usize,
) -> TreeEnsemble {
    let trees = (0..trees)
        .map(|_| random_tree(rng, features, max_depth))
        .collect();
    let comparator = if rng.gen_bool(0.5) {
        Comparator::LessEqual
    } else {
        Comparator::LessThan
    };
    TreeEnsemble::new(trees, rng.gen_range(-1.0..1.0), features, None, comparator)
        .expect("generated trees are valid")
}

/// Random exact partition of `features` into exactly `groups` nonempty groups.
pub fn random_partition(rng: &mut impl Rng, features: usize, groups: usize) -> FeaturePartition {
    assert!((1..=features).contains(&groups));
    let mut order: Vec<usize> = (0..features).collect();
    order.shuffle(rng);
    let mut members = vec![Vec::new(); groups];
    for (i, &f) in order.iter().enumerate() {
        let g = if i < groups {
            i
        } else {
            rng.gen_range(0..groups)
        };
        members[g].push(f);
    }
    for m in &mut members {
        m.sort_unstable();
    }
    FeaturePartition::from_indices(members, features).expect("construction is an exact partition")
}

pub fn random_dataset(rng: &mut impl Rng, rows: usize, feature_names: Vec<String>) -> Dataset {
    let data = (0..rows)
        .map(|_| random_row(rng, feature_names.len()))
        .collect();
    Dataset::new(data, feature_names, None).expect("rows match feature names")
}

/// Remote-sensing shaped configuration: 11 band groups of 102 features each
/// plus one handcrafted group of `handcrafted` features.
pub fn soybean_partition(handcrafted: usize) -> FeaturePartition {
    let mut groups = Vec::with_capacity(SOYBEAN_BANDS + 1);
    for band in 0..SOYBEAN_BANDS {
        let start = band * SOYBEAN_BAND_SIZE;
        groups.push(FeatureGroup {
            name: format!("band_{band:02}"),
            features: (start..start + SOYBEAN_BAND_SIZE).collect(),
        });
    }
    let start = SOYBEAN_BANDS * SOYBEAN_BAND_SIZE;
    groups.push(FeatureGroup {
        name: "handcrafted".into(),
        features: (start..start + handcrafted).collect(),
    });
    FeaturePartition::new(groups, start + handcrafted).expect("construction is an exact partition")
}

pub fn soybean_feature_names(handcrafted: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(SOYBEAN_BANDS * SOYBEAN_BAND_SIZE + handcrafted);
    for band in 0..SOYBEAN_BANDS {
        for i in 0..SOYBEAN_BAND_SIZE {
            names.push(format!("band_{band:02}_{i:03}"));
        }
    }
    names.extend((0..handcrafted).map(|i| format!("handcrafted_{i}")));
    names
}

/// Ensemble of `trees` perfect trees of depth `depth` over the remote-sensing
/// shaped feature space (1131 features with the default residual of 9).
pub fn soybean_ensemble(
    rng: &mut impl Rng,
    trees: usize,
    depth: usize,
    handcrafted: usize,
) -> TreeEnsemble {
    let names = soybean_feature_names(handcrafted);
    let features = names.len();
    let trees = (0..trees)
        .map(|_| perfect_tree(rng, features, depth))
        .collect();
    TreeEnsemble::new(trees, 40.0, features, Some(names), Comparator::LessThan)
        .expect("generated trees are valid")
}

/// Phenology shaped configuration: `timestamps` groups of `per_timestamp`
/// features each, grouped by acquisition date.
pub fn timestamp_partition(timestamps: usize, per_timestamp: usize) -> FeaturePartition {
    let groups = (0..timestamps)
        .map(|t| FeatureGroup {
            name: format!("t{t}"),
            features: (t * per_timestamp..(t + 1) * per_timestamp).collect(),
        })
        .collect();
    FeaturePartition::new(groups, timestamps * per_timestamp)
        .expect("construction is an exact partition")
}
