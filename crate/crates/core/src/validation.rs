//! Randomized equivalence sweep between the fast algorithm and the oracle.
//! Sample `i` of a sweep is generated from its own RNG stream, so any
//! failure replays from `(seed, i)` alone.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::explanation::Explanation;
use crate::oracle::ORACLE_MAX_GROUPS;
use crate::partition::FeaturePartition;
use crate::tree::TreeEnsemble;
use crate::{fast, oracle, synth};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationConfig {
    pub samples: usize,
    pub seed: u64,
    pub max_trees: usize,
    pub max_depth: usize,
    pub max_features: usize,
    pub max_groups: usize,
    pub tolerance: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 42,
            max_trees: 5,
            max_depth: 6,
            max_features: 10,
            max_groups: 5,
            tolerance: 1e-9,
        }
    }
}

/// One generated `(model, x, partition)` triple.
#[derive(Debug, Clone)]
pub struct Instance {
    pub ensemble: TreeEnsemble,
    pub x: Vec<f64>,
    pub partition: FeaturePartition,
}

impl ValidationConfig {
    fn check(&self) -> Result<()> {
        if self.max_groups == 0 || self.max_features == 0 || self.max_trees == 0 {
            return Err(Error::InvalidDataset(
                "max-trees, max-features and max-groups must be positive".into(),
            ));
        }
        if self.max_groups > ORACLE_MAX_GROUPS {
            return Err(Error::GuardExceeded {
                what: "max-groups",
                count: self.max_groups,
                limit: ORACLE_MAX_GROUPS,
            });
        }
        // the classic check runs the oracle with one group per feature
        if self.max_features > ORACLE_MAX_GROUPS {
            return Err(Error::GuardExceeded {
                what: "max-features",
                count: self.max_features,
                limit: ORACLE_MAX_GROUPS,
            });
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::InvalidDataset(
                "tolerance must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Regenerates sample `index`.
    pub fn instance(&self, index: usize) -> Instance {
        let mut rng = synth::sample_rng(self.seed, index as u64);
        let features = rng.gen_range(1..=self.max_features);
        let trees = rng.gen_range(1..=self.max_trees);
        let groups = rng.gen_range(1..=self.max_groups.min(features));
        let ensemble = synth::random_ensemble(&mut rng, features, trees, self.max_depth);
        let x = synth::random_row(&mut rng, features);
        let partition = synth::random_partition(&mut rng, features, groups);
        Instance {
            ensemble,
            x,
            partition,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    /// Largest fast-vs-oracle deviation under the random partitions.
    pub max_deviation: f64,
    /// Same under singleton partitions (classic Shapley values).
    pub max_classic_deviation: f64,
    /// Largest raw `|base + sum - prediction|` over both explanation kinds.
    pub max_efficiency_residual: f64,
    pub worst_sample: Option<usize>,
    /// Samples that broke a bound, in order.
    pub failures: Vec<usize>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Deviation of `fast` from `exact`, relative to the explanation's magnitude
/// (largest of |base|, |prediction| and the largest exact contribution).
pub fn relative_deviation(fast: &Explanation, exact: &Explanation) -> f64 {
    let scale = exact
        .contributions
        .iter()
        .map(|c| c.gsv.abs())
        .fold(exact.base.abs().max(exact.prediction.abs()), f64::max)
        .max(f64::MIN_POSITIVE);
    let mut worst = (fast.base - exact.base).abs();
    for (a, b) in fast.contributions.iter().zip(&exact.contributions) {
        worst = worst.max((a.gsv - b.gsv).abs());
    }
    worst / scale
}

/// Whether `base + sum(gsv)` reproduces the prediction within
/// `tolerance * |prediction| + 1e-12`.
pub fn efficiency_holds(e: &Explanation, tolerance: f64) -> bool {
    e.efficiency_residual() <= tolerance * e.prediction.abs() + 1e-12
}

pub fn run(config: &ValidationConfig) -> Result<ValidationReport> {
    config.check()?;
    let mut report = ValidationReport {
        samples: config.samples,
        max_deviation: 0.0,
        max_classic_deviation: 0.0,
        max_efficiency_residual: 0.0,
        worst_sample: None,
        failures: Vec::new(),
    };
    for i in 0..config.samples {
        let Instance {
            ensemble,
            x,
            partition,
        } = config.instance(i);
        let grouped = fast::ensemble_gsv(&ensemble, &x, &partition)?;
        let grouped_exact = oracle::brute_force_gsv(&ensemble, &x, &partition)?;
        let classic = fast::ensemble_classic(&ensemble, &x)?;
        let classic_exact = oracle::brute_force_classic(&ensemble, &x)?;

        let deviation = relative_deviation(&grouped, &grouped_exact);
        let classic_deviation = relative_deviation(&classic, &classic_exact);
        if deviation > report.max_deviation || report.worst_sample.is_none() {
            report.worst_sample = Some(i);
        }
        report.max_deviation = report.max_deviation.max(deviation);
        report.max_classic_deviation = report.max_classic_deviation.max(classic_deviation);
        report.max_efficiency_residual = report
            .max_efficiency_residual
            .max(grouped.efficiency_residual())
            .max(classic.efficiency_residual());

        let ok = deviation <= config.tolerance
            && classic_deviation <= config.tolerance
            && efficiency_holds(&grouped, config.tolerance)
            && efficiency_holds(&classic, config.tolerance);
        if !ok {
            report.failures.push(i);
        }
    }
    Ok(report)
}
