//! Shared fixtures for the criterion benches.

use gsv_core::{synth, FeaturePartition, TreeEnsemble};

/// `trees` perfect trees of depth `depth` over `features` features, one row,
/// and a random partition into `groups` groups.
pub fn forest(
    seed: u64,
    trees: usize,
    depth: usize,
    features: usize,
    groups: usize,
) -> (TreeEnsemble, Vec<f64>, FeaturePartition) {
    let mut rng = synth::sample_rng(seed, 0);
    let tree = synth::perfect_tree(&mut rng, features, depth);
    let ensemble = TreeEnsemble::new(
        vec![tree; trees],
        0.0,
        features,
        None,
        gsv_core::Comparator::LessEqual,
    )
    .expect("generated trees are valid");
    let x = synth::random_row(&mut rng, features);
    let partition = synth::random_partition(&mut rng, features, groups);
    (ensemble, x, partition)
}

/// Remote-sensing shaped model (1131 features, 12 groups) and one row.
pub fn soybean(
    seed: u64,
    trees: usize,
    depth: usize,
) -> (TreeEnsemble, Vec<f64>, FeaturePartition) {
    let mut rng = synth::sample_rng(seed, 0);
    let ensemble = synth::soybean_ensemble(&mut rng, trees, depth, 9);
    let x = synth::random_row(&mut rng, ensemble.feature_count());
    (ensemble, x, synth::soybean_partition(9))
}
