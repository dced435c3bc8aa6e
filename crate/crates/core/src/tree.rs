//! Decision-tree ensembles stored as flat node arrays, with native JSON and
//! XGBoost dump ingestion.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Relative tolerance for `cover(left) + cover(right) == cover(parent)`.
pub const COVER_TOLERANCE: f64 = 1e-6;

/// XGBoost prints covers with limited precision, so dumps get more slack.
pub const XGBOOST_COVER_TOLERANCE: f64 = 1e-3;

/// How a split compares `x[feature]` against its threshold to select the
/// left child.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Comparator {
    /// `x <= t` goes left.
    #[default]
    #[serde(rename = "le")]
    LessEqual,
    /// `x < t` goes left (XGBoost).
    #[serde(rename = "lt")]
    LessThan,
}

impl Comparator {
    #[inline]
    pub fn goes_left(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::LessEqual => value <= threshold,
            Comparator::LessThan => value < threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    /// Leaf prediction; ignored on internal nodes.
    pub value: f64,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub threshold: f64,
    /// Training weight reaching this node. Always positive.
    pub cover: f64,
    pub feature: usize,
    /// XGBoost's routing for missing values. Recorded only; inputs are dense.
    pub default_left: Option<bool>,
}

impl TreeNode {
    pub fn leaf(value: f64, cover: f64) -> Self {
        Self {
            value,
            left: None,
            right: None,
            threshold: 0.0,
            cover,
            feature: 0,
            default_left: None,
        }
    }

    pub fn split(feature: usize, threshold: f64, left: usize, right: usize, cover: f64) -> Self {
        Self {
            value: 0.0,
            left: Some(left),
            right: Some(right),
            threshold,
            cover,
            feature,
            default_left: None,
        }
    }

    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.left.is_none()
    }
}

/// One tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    /// Wraps nodes without validation. [`TreeEnsemble::new`] validates.
    pub fn from_nodes(nodes: Vec<TreeNode>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, index: usize) -> &TreeNode {
        &self.nodes[index]
    }

    /// `(hot, cold)` children of internal node `index`: the child `x` selects
    /// and the other one.
    #[inline]
    pub fn route(&self, index: usize, x: &[f64], comparator: Comparator) -> (usize, usize) {
        let node = &self.nodes[index];
        let (left, right) = (node.left.unwrap(), node.right.unwrap());
        if comparator.goes_left(x[node.feature], node.threshold) {
            (left, right)
        } else {
            (right, left)
        }
    }

    /// Leaf value reached by `x`.
    pub fn predict(&self, x: &[f64], comparator: Comparator) -> f64 {
        let mut j = 0;
        while !self.nodes[j].is_leaf() {
            j = self.route(j, x, comparator).0;
        }
        self.nodes[j].value
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut max = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((j, d)) = stack.pop() {
            let node = &self.nodes[j];
            match (node.left, node.right) {
                (Some(l), Some(r)) => {
                    stack.push((l, d + 1));
                    stack.push((r, d + 1));
                }
                _ => max = max.max(d),
            }
        }
        max
    }

    pub fn min_leaf_value(&self) -> f64 {
        self.leaf_values().fold(f64::INFINITY, f64::min)
    }

    pub fn max_leaf_value(&self) -> f64 {
        self.leaf_values().fold(f64::NEG_INFINITY, f64::max)
    }

    fn leaf_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().filter(|n| n.is_leaf()).map(|n| n.value)
    }

    fn validate(&self, tree: usize, feature_count: usize, tolerance: f64) -> Result<()> {
        let len = self.nodes.len();
        if len == 0 {
            return Err(Error::InvalidModel(format!("tree {tree} has no nodes")));
        }
        let mut parents = vec![0usize; len];
        for (j, node) in self.nodes.iter().enumerate() {
            if !(node.cover.is_finite() && node.cover > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "tree {tree} node {j} has non-positive cover {}",
                    node.cover
                )));
            }
            match (node.left, node.right) {
                (None, None) => {
                    if !node.value.is_finite() {
                        return Err(Error::InvalidModel(format!(
                            "tree {tree} leaf {j} has non-finite value"
                        )));
                    }
                }
                (Some(l), Some(r)) => {
                    for child in [l, r] {
                        if child >= len {
                            return Err(Error::DanglingChild {
                                tree,
                                node: j,
                                child,
                                len,
                            });
                        }
                        if child == 0 || child == j {
                            return Err(Error::InvalidModel(format!(
                                "tree {tree} node {j} points back at node {child}"
                            )));
                        }
                        parents[child] += 1;
                    }
                    if node.feature >= feature_count {
                        return Err(Error::FeatureOutOfRange {
                            feature: node.feature,
                            feature_count,
                        });
                    }
                    if node.threshold.is_nan() {
                        return Err(Error::InvalidModel(format!(
                            "tree {tree} node {j} has NaN threshold"
                        )));
                    }
                    let children = self.nodes[l].cover + self.nodes[r].cover;
                    if (children - node.cover).abs() > tolerance * node.cover {
                        return Err(Error::CoverMismatch {
                            tree,
                            node: j,
                            parent: node.cover,
                            children,
                        });
                    }
                }
                _ => {
                    return Err(Error::InvalidModel(format!(
                        "tree {tree} node {j} has exactly one child"
                    )))
                }
            }
        }
        if let Some(j) = (1..len).find(|&j| parents[j] != 1) {
            return Err(Error::InvalidModel(format!(
                "tree {tree} node {j} has {} parents; nodes must form a single tree",
                parents[j]
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeMetrics {
    pub tree_count: usize,
    pub max_leaves: usize,
    pub max_depth: usize,
}

/// An additive ensemble: `prediction(x) = base_value + sum of reached leaves`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeEnsemble {
    trees: Vec<Tree>,
    base_value: f64,
    feature_count: usize,
    feature_names: Option<Vec<String>>,
    comparator: Comparator,
}

impl TreeEnsemble {
    pub fn new(
        trees: Vec<Tree>,
        base_value: f64,
        feature_count: usize,
        feature_names: Option<Vec<String>>,
        comparator: Comparator,
    ) -> Result<Self> {
        Self::with_tolerance(
            trees,
            base_value,
            feature_count,
            feature_names,
            comparator,
            COVER_TOLERANCE,
        )
    }

    fn with_tolerance(
        trees: Vec<Tree>,
        base_value: f64,
        feature_count: usize,
        feature_names: Option<Vec<String>>,
        comparator: Comparator,
        tolerance: f64,
    ) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::NoTrees);
        }
        if feature_count == 0 {
            return Err(Error::InvalidModel("feature_count must be positive".into()));
        }
        if !base_value.is_finite() {
            return Err(Error::InvalidModel("base_value must be finite".into()));
        }
        if let Some(names) = &feature_names {
            if names.len() != feature_count {
                return Err(Error::InvalidModel(format!(
                    "{} feature names for {feature_count} features",
                    names.len()
                )));
            }
            let unique: std::collections::HashSet<_> = names.iter().collect();
            if unique.len() != names.len() {
                return Err(Error::InvalidModel("duplicate feature names".into()));
            }
        }
        for (t, tree) in trees.iter().enumerate() {
            tree.validate(t, feature_count, tolerance)?;
        }
        Ok(Self {
            trees,
            base_value,
            feature_count,
            feature_names,
            comparator,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn base_value(&self) -> f64 {
        self.base_value
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn comparator(&self) -> Comparator {
        self.comparator
    }

    /// Declared feature names, or `f0, f1, ...` when the model has none.
    pub fn feature_names(&self) -> Vec<String> {
        match &self.feature_names {
            Some(names) => names.clone(),
            None => (0..self.feature_count).map(|i| format!("f{i}")).collect(),
        }
    }

    pub fn has_feature_names(&self) -> bool {
        self.feature_names.is_some()
    }

    pub fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.feature_count {
            return Err(Error::DimensionMismatch {
                expected: self.feature_count,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.base_value
            + self
                .trees
                .iter()
                .map(|t| t.predict(x, self.comparator))
                .sum::<f64>())
    }

    pub fn metrics(&self) -> TreeMetrics {
        TreeMetrics {
            tree_count: self.trees.len(),
            max_leaves: self.trees.iter().map(Tree::leaf_count).max().unwrap_or(0),
            max_depth: self.trees.iter().map(Tree::depth).max().unwrap_or(0),
        }
    }

    /// Serializes to the native JSON schema.
    pub fn to_native_json(&self) -> String {
        let model = NativeModel {
            base_value: self.base_value,
            feature_count: Some(self.feature_count),
            feature_names: self.feature_names.clone(),
            comparator: Some(self.comparator),
            trees: self
                .trees
                .iter()
                .map(|t| NativeTree {
                    nodes: t
                        .nodes
                        .iter()
                        .map(|n| NativeNode {
                            feature: (!n.is_leaf()).then_some(n.feature),
                            threshold: (!n.is_leaf()).then_some(n.threshold),
                            left: n.left,
                            right: n.right,
                            value: n.value,
                            cover: n.cover,
                            default_left: n.default_left,
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&model).expect("model serializes")
    }
}

pub fn tree_metrics(ensemble: &TreeEnsemble) -> TreeMetrics {
    ensemble.metrics()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeNode {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feature: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[serde(default)]
    left: Option<usize>,
    #[serde(default)]
    right: Option<usize>,
    #[serde(default)]
    value: f64,
    cover: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default_left: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeTree {
    nodes: Vec<NativeNode>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeModel {
    #[serde(default)]
    base_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feature_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feature_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comparator: Option<Comparator>,
    trees: Vec<NativeTree>,
}

/// Parses the native schema:
///
/// ```json
/// { "base_value": 0.0, "feature_names": ["a", "b"], "trees": [ { "nodes": [
///   {"feature": 0, "threshold": 0.5, "left": 1, "right": 2, "value": 0, "cover": 4},
///   {"left": null, "right": null, "value": 2.0, "cover": 3},
///   {"left": null, "right": null, "value": 10.0, "cover": 1} ] } ] }
/// ```
///
/// Optional `feature_count` and `comparator` (`"le"` default, or `"lt"`).
/// Without names or an explicit count, the feature count is one past the
/// largest split feature.
pub fn parse_native(json_text: &str) -> Result<TreeEnsemble> {
    let model: NativeModel = serde_json::from_str(json_text)?;
    let mut trees = Vec::with_capacity(model.trees.len());
    let mut max_feature = None::<usize>;
    for (t, raw) in model.trees.into_iter().enumerate() {
        let mut nodes = Vec::with_capacity(raw.nodes.len());
        for (j, n) in raw.nodes.into_iter().enumerate() {
            let node = match (n.left, n.right) {
                (Some(_), Some(_)) => {
                    let feature = n.feature.ok_or_else(|| {
                        Error::InvalidModel(format!(
                            "tree {t} node {j} is a split without a feature"
                        ))
                    })?;
                    let threshold = n.threshold.ok_or_else(|| {
                        Error::InvalidModel(format!(
                            "tree {t} node {j} is a split without a threshold"
                        ))
                    })?;
                    max_feature = max_feature.max(Some(feature));
                    TreeNode {
                        value: n.value,
                        left: n.left,
                        right: n.right,
                        threshold,
                        cover: n.cover,
                        feature,
                        default_left: n.default_left,
                    }
                }
                _ => TreeNode {
                    value: n.value,
                    left: n.left,
                    right: n.right,
                    threshold: n.threshold.unwrap_or(0.0),
                    cover: n.cover,
                    feature: n.feature.unwrap_or(0),
                    default_left: n.default_left,
                },
            };
            nodes.push(node);
        }
        trees.push(Tree { nodes });
    }
    let feature_count = model
        .feature_count
        .or(model.feature_names.as_ref().map(Vec::len))
        .unwrap_or_else(|| max_feature.map_or(1, |f| f + 1));
    TreeEnsemble::new(
        trees,
        model.base_value,
        feature_count,
        model.feature_names,
        model.comparator.unwrap_or_default(),
    )
}

/// Options for [`import_xgboost_dump`].
#[derive(Debug, Clone, Default)]
pub struct XgboostImport {
    /// XGBoost keeps `base_score` outside the dump.
    pub base_value: f64,
    /// Inferred from the largest referenced feature when absent.
    pub feature_count: Option<usize>,
    /// Resolves named splits; `fN` names resolve to index `N` otherwise.
    pub feature_names: Option<Vec<String>>,
}

const XGB_FIELDS: &[&str] = &[
    "nodeid",
    "depth",
    "split",
    "split_condition",
    "yes",
    "no",
    "missing",
    "gain",
    "cover",
    "leaf",
    "children",
];

/// Converts `Booster.dump_model(..., dump_format="json")` output: a JSON
/// array with one recursive node object per tree. Splits use `x < t` for the
/// `yes` branch, which becomes the left child.
pub fn import_xgboost_dump(json_text: &str, options: &XgboostImport) -> Result<TreeEnsemble> {
    let value: Value = serde_json::from_str(json_text)?;
    let roots = value
        .as_array()
        .ok_or_else(|| Error::UnsupportedDump("top level must be an array of trees".into()))?;
    if roots.is_empty() {
        return Err(Error::NoTrees);
    }
    let mut trees = Vec::with_capacity(roots.len());
    let mut max_feature = None::<usize>;
    for (t, root) in roots.iter().enumerate() {
        let mut nodes = Vec::new();
        convert_xgb_node(root, t, options, &mut nodes, &mut max_feature)?;
        trees.push(Tree { nodes });
    }
    let feature_count = options
        .feature_count
        .or(options.feature_names.as_ref().map(Vec::len))
        .unwrap_or_else(|| max_feature.map_or(1, |f| f + 1));
    TreeEnsemble::with_tolerance(
        trees,
        options.base_value,
        feature_count,
        options.feature_names.clone(),
        Comparator::LessThan,
        XGBOOST_COVER_TOLERANCE,
    )
}

fn xgb_number(obj: &Map<String, Value>, key: &str, tree: usize) -> Result<f64> {
    match obj.get(key) {
        Some(Value::Number(n)) => n
            .as_f64()
            .ok_or_else(|| Error::UnsupportedDump(format!("tree {tree}: {key} is not a float"))),
        Some(other) => Err(Error::UnsupportedDump(format!(
            "tree {tree}: {key} must be numeric, got {other}"
        ))),
        None => Err(Error::UnsupportedDump(format!(
            "tree {tree}: missing {key}"
        ))),
    }
}

fn xgb_feature(split: &Value, tree: usize, options: &XgboostImport) -> Result<usize> {
    match split {
        Value::Number(n) => n
            .as_u64()
            .map(|f| f as usize)
            .ok_or_else(|| Error::UnsupportedDump(format!("tree {tree}: bad split index {n}"))),
        Value::String(name) => {
            if let Some(i) = options
                .feature_names
                .as_ref()
                .and_then(|names| names.iter().position(|n| n == name))
            {
                return Ok(i);
            }
            name.strip_prefix('f')
                .and_then(|rest| rest.parse::<usize>().ok())
                .ok_or_else(|| {
                    Error::UnsupportedDump(format!("tree {tree}: unknown feature {name:?}"))
                })
        }
        other => Err(Error::UnsupportedDump(format!(
            "tree {tree}: bad split {other}"
        ))),
    }
}

/// Appends `value` and its subtree in preorder; returns the new node index.
fn convert_xgb_node(
    value: &Value,
    tree: usize,
    options: &XgboostImport,
    nodes: &mut Vec<TreeNode>,
    max_feature: &mut Option<usize>,
) -> Result<usize> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::UnsupportedDump(format!("tree {tree}: node is not an object")))?;
    if let Some(key) = obj.keys().find(|k| !XGB_FIELDS.contains(&k.as_str())) {
        return Err(Error::UnsupportedDump(format!(
            "tree {tree}: unsupported field {key:?}"
        )));
    }
    let cover = xgb_number(obj, "cover", tree)?;
    let index = nodes.len();
    if obj.contains_key("leaf") {
        nodes.push(TreeNode::leaf(xgb_number(obj, "leaf", tree)?, cover));
        return Ok(index);
    }
    let feature = xgb_feature(
        obj.get("split").ok_or_else(|| {
            Error::UnsupportedDump(format!("tree {tree}: split node without split"))
        })?,
        tree,
        options,
    )?;
    *max_feature = (*max_feature).max(Some(feature));
    let threshold = xgb_number(obj, "split_condition", tree)?;
    let id = |key: &str| -> Result<u64> {
        obj.get(key)
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::UnsupportedDump(format!("tree {tree}: missing {key}")))
    };
    let (yes, no) = (id("yes")?, id("no")?);
    let missing = obj.get("missing").and_then(Value::as_u64);
    let children = obj
        .get("children")
        .and_then(Value::as_array)
        .ok_or_else(|| {
            Error::UnsupportedDump(format!("tree {tree}: split node without children"))
        })?;
    let find = |want: u64| -> Result<&Value> {
        children
            .iter()
            .find(|c| c.get("nodeid").and_then(Value::as_u64) == Some(want))
            .ok_or_else(|| Error::UnsupportedDump(format!("tree {tree}: child {want} not found")))
    };
    nodes.push(TreeNode::split(feature, threshold, 0, 0, cover));
    nodes[index].default_left = missing.map(|m| m == yes);
    let left = convert_xgb_node(find(yes)?, tree, options, nodes, max_feature)?;
    let right = convert_xgb_node(find(no)?, tree, options, nodes, max_feature)?;
    nodes[index].left = Some(left);
    nodes[index].right = Some(right);
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    const STUMP: &str = r#"{"base_value": 0.0, "trees": [{"nodes": [
        {"feature": 0, "threshold": 0.5, "left": 1, "right": 2, "value": 0, "cover": 4},
        {"left": null, "right": null, "value": 2.0, "cover": 3},
        {"left": null, "right": null, "value": 10.0, "cover": 1}]}]}"#;

    #[test]
    fn single_leaf_predicts_constant() {
        let m = parse_native(
            r#"{"base_value": 0.0, "trees": [{"nodes": [{"value": 7.0, "cover": 1}]}]}"#,
        )
        .unwrap();
        assert_eq!(m.predict(&[123.0]).unwrap(), 7.0);
        assert_eq!(m.predict(&[-1.0]).unwrap(), 7.0);
        assert_eq!(
            m.metrics(),
            TreeMetrics {
                tree_count: 1,
                max_leaves: 1,
                max_depth: 0
            }
        );
    }

    #[test]
    fn stump_parses_and_routes_with_le() {
        let m = parse_native(STUMP).unwrap();
        assert_eq!(m.comparator(), Comparator::LessEqual);
        assert_eq!(m.feature_count(), 1);
        assert_eq!(m.predict(&[0.5]).unwrap(), 2.0);
        assert_eq!(m.predict(&[0.51]).unwrap(), 10.0);
    }

    #[test]
    fn cover_mismatch_rejected() {
        let bad = STUMP.replace(r#""cover": 4"#, r#""cover": 5"#);
        assert!(matches!(
            parse_native(&bad),
            Err(Error::CoverMismatch { .. })
        ));
    }

    #[test]
    fn structural_errors() {
        let dangling = STUMP.replace(r#""right": 2"#, r#""right": 9"#);
        assert!(matches!(
            parse_native(&dangling),
            Err(Error::DanglingChild { .. })
        ));
        let overflow = STUMP.replace(r#""base_value": 0.0,"#, r#""feature_count": 0,"#);
        assert!(parse_native(&overflow).is_err());
        let names = STUMP.replace(r#""feature": 0"#, r#""feature": 3"#).replace(
            r#""base_value": 0.0,"#,
            r#""base_value": 0.0, "feature_names": ["a", "b"],"#,
        );
        assert!(matches!(
            parse_native(&names),
            Err(Error::FeatureOutOfRange { .. })
        ));
        let one_child = STUMP.replace(r#""right": 2"#, r#""right": null"#);
        assert!(parse_native(&one_child).is_err());
        assert!(matches!(parse_native("{"), Err(Error::Json(_))));
        assert!(matches!(
            parse_native(r#"{"trees": []}"#),
            Err(Error::NoTrees)
        ));
        let zero_cover = r#"{"trees": [{"nodes": [{"value": 1.0, "cover": 0}]}]}"#;
        assert!(parse_native(zero_cover).is_err());
        let shared = r#"{"trees": [{"nodes": [
            {"feature": 0, "threshold": 0.5, "left": 1, "right": 1, "cover": 2},
            {"value": 1.0, "cover": 1}]}]}"#;
        assert!(parse_native(shared).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let m = parse_native(STUMP).unwrap();
        assert!(matches!(
            m.predict(&[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn native_round_trip() {
        let m = parse_native(STUMP).unwrap();
        assert_eq!(parse_native(&m.to_native_json()).unwrap(), m);
    }

    #[test]
    fn duplicated_trees_double_the_contribution() {
        let one = parse_native(STUMP).unwrap();
        let tree = one.trees()[0].clone();
        let two = TreeEnsemble::new(
            vec![tree.clone(), tree],
            1.5,
            1,
            None,
            Comparator::LessEqual,
        )
        .unwrap();
        for x in [0.0, 0.5, 1.0] {
            assert_eq!(
                two.predict(&[x]).unwrap(),
                1.5 + 2.0 * one.predict(&[x]).unwrap()
            );
        }
    }

    #[test]
    fn perfect_depth_two_metrics() {
        let nodes = vec![
            TreeNode::split(0, 0.0, 1, 2, 4.0),
            TreeNode::split(1, 0.0, 3, 4, 2.0),
            TreeNode::split(1, 0.0, 5, 6, 2.0),
            TreeNode::leaf(1.0, 1.0),
            TreeNode::leaf(2.0, 1.0),
            TreeNode::leaf(3.0, 1.0),
            TreeNode::leaf(4.0, 1.0),
        ];
        let m = TreeEnsemble::new(
            vec![Tree::from_nodes(nodes)],
            0.0,
            2,
            None,
            Comparator::LessEqual,
        )
        .unwrap();
        assert_eq!(
            m.metrics(),
            TreeMetrics {
                tree_count: 1,
                max_leaves: 4,
                max_depth: 2
            }
        );
    }

    const XGB_STUMP: &str = r#"[
      { "nodeid": 0, "depth": 0, "split": "f0", "split_condition": 0.5, "yes": 1, "no": 2, "missing": 1,
        "gain": 3.2, "cover": 10, "children": [
          { "nodeid": 1, "leaf": -1.0, "cover": 6 },
          { "nodeid": 2, "leaf": 1.0, "cover": 4 }
      ]}
    ]"#;

    #[test]
    fn xgboost_stump_converts() {
        let opts = XgboostImport {
            base_value: 0.5,
            ..Default::default()
        };
        let m = import_xgboost_dump(XGB_STUMP, &opts).unwrap();
        assert_eq!(m.comparator(), Comparator::LessThan);
        assert_eq!(m.base_value(), 0.5);
        assert_eq!(m.predict(&[0.3]).unwrap(), -0.5);
        // strict comparison: the threshold itself goes right
        assert_eq!(m.predict(&[0.5]).unwrap(), 1.5);
        assert_eq!(m.trees()[0].node(0).default_left, Some(true));
    }

    #[test]
    fn xgboost_children_order_follows_yes_no_ids() {
        let swapped = XGB_STUMP.replace(r#""yes": 1, "no": 2"#, r#""yes": 2, "no": 1"#);
        let m = import_xgboost_dump(&swapped, &XgboostImport::default()).unwrap();
        assert_eq!(m.predict(&[0.3]).unwrap(), 1.0);
        assert_eq!(m.trees()[0].node(0).default_left, Some(false));
    }

    #[test]
    fn xgboost_errors() {
        let opts = XgboostImport::default();
        assert!(matches!(
            import_xgboost_dump("[]", &opts),
            Err(Error::NoTrees)
        ));
        let overflow = XGB_STUMP.replace(r#""f0""#, r#""f3""#);
        let three = XgboostImport {
            feature_count: Some(3),
            ..Default::default()
        };
        assert!(matches!(
            import_xgboost_dump(&overflow, &three),
            Err(Error::FeatureOutOfRange {
                feature: 3,
                feature_count: 3
            })
        ));
        let text_threshold = XGB_STUMP.replace("0.5", r#""0.5""#);
        assert!(matches!(
            import_xgboost_dump(&text_threshold, &opts),
            Err(Error::UnsupportedDump(_))
        ));
        let extra = XGB_STUMP.replace(r#""gain": 3.2"#, r#""categories": [1]"#);
        assert!(matches!(
            import_xgboost_dump(&extra, &opts),
            Err(Error::UnsupportedDump(_))
        ));
    }

    #[test]
    fn xgboost_named_features() {
        let named = XGB_STUMP.replace(r#""f0""#, r#""rain""#);
        let opts = XgboostImport {
            feature_names: Some(vec!["temp".into(), "rain".into()]),
            ..Default::default()
        };
        let m = import_xgboost_dump(&named, &opts).unwrap();
        assert_eq!(m.predict(&[0.0, 0.3]).unwrap(), -1.0);
        assert_eq!(m.predict(&[0.0, 0.9]).unwrap(), 1.0);
    }
}
