//! Grouped Shapley values (GSV) for decision-tree ensembles.
//!
//! Features are partitioned into named groups that are always valued
//! together. For a row `x`, each group receives the Shapley value of the game
//! whose players are the groups and whose value function is the model's
//! path-cover expected output given the features of a coalition. The values
//! add up exactly: `base + sum(gsv) == prediction`.
//!
//! Two engines compute the same quantity:
//!
//! * [`oracle::brute_force_gsv`] enumerates every coalition of groups
//!   (exponential in the number of groups);
//! * [`fast::ensemble_gsv`] walks each tree once, `O(T * L * D^2)`.
//!
//! [`game`] holds the exact solver for small explicit games, and
//! [`aggregate`]/[`svg`] turn many local explanations into swarm plots.

pub mod aggregate;
pub mod error;
pub mod expectation;
pub mod explanation;
pub mod fast;
pub mod game;
pub mod oracle;
pub mod partition;
pub mod svg;
pub mod synth;
pub mod tree;
pub mod validation;

pub use aggregate::{Aggregator, Dataset, Engine, SwarmPoint};
pub use error::{Error, Result};
pub use expectation::{expected_value, expected_value_ensemble, FeatureSet};
pub use explanation::{Explanation, GroupContribution};
pub use fast::{ensemble_gsv, tree_gsv, PathEntry, PathState};
pub use game::{CooperativeGame, Rational};
pub use oracle::{brute_force_classic, brute_force_gsv};
pub use partition::{parse_partition, FeatureGroup, FeaturePartition};
pub use svg::{render_swarm_svg, SwarmOptions};
pub use tree::{
    import_xgboost_dump, parse_native, tree_metrics, Comparator, Tree, TreeEnsemble, TreeMetrics,
    TreeNode, XgboostImport,
};
