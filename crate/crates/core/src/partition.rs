//! Feature groups: an exact partition of the model's features into named,
//! ordered groups with an O(1) feature-to-group lookup.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureGroup {
    pub name: String,
    pub features: Vec<usize>,
}

/// A partition of `0..feature_count` into nonempty, disjoint groups.
///
/// Group order is significant: it fixes group indices and the order of
/// contributions in every explanation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeaturePartition {
    groups: Vec<FeatureGroup>,
    lookup: Vec<usize>,
}

impl FeaturePartition {
    /// Builds and validates a partition over `feature_count` features.
    pub fn new(groups: Vec<FeatureGroup>, feature_count: usize) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidPartition("no groups".into()));
        }
        let mut lookup = vec![usize::MAX; feature_count];
        let mut names = std::collections::HashSet::new();
        for (g, group) in groups.iter().enumerate() {
            if group.name.is_empty() {
                return Err(Error::InvalidPartition(format!(
                    "group {g} has an empty name"
                )));
            }
            if !names.insert(group.name.as_str()) {
                return Err(Error::InvalidPartition(format!(
                    "duplicate group name {:?}",
                    group.name
                )));
            }
            if group.features.is_empty() {
                return Err(Error::InvalidPartition(format!(
                    "group {:?} is empty",
                    group.name
                )));
            }
            for &f in &group.features {
                if f >= feature_count {
                    return Err(Error::FeatureOutOfRange {
                        feature: f,
                        feature_count,
                    });
                }
                if lookup[f] != usize::MAX {
                    let other = &groups[lookup[f]].name;
                    return Err(Error::InvalidPartition(format!(
                        "feature {f} assigned to both {other:?} and {:?}",
                        group.name
                    )));
                }
                lookup[f] = g;
            }
        }
        if let Some(f) = lookup.iter().position(|&g| g == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "feature {f} is not assigned to any group"
            )));
        }
        Ok(Self { groups, lookup })
    }

    /// Groups named `G0, G1, ...` in the given order.
    pub fn from_indices(groups: Vec<Vec<usize>>, feature_count: usize) -> Result<Self> {
        let groups = groups
            .into_iter()
            .enumerate()
            .map(|(i, features)| FeatureGroup {
                name: format!("G{i}"),
                features,
            })
            .collect();
        Self::new(groups, feature_count)
    }

    /// One group per feature, named after the feature.
    pub fn singleton(feature_names: &[String]) -> Self {
        let groups = feature_names
            .iter()
            .enumerate()
            .map(|(i, name)| FeatureGroup {
                name: name.clone(),
                features: vec![i],
            })
            .collect();
        Self {
            groups,
            lookup: (0..feature_names.len()).collect(),
        }
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn feature_count(&self) -> usize {
        self.lookup.len()
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.groups
    }

    pub fn group(&self, index: usize) -> Option<&FeatureGroup> {
        self.groups.get(index)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().map(|g| g.name.as_str())
    }

    /// Owning group of `feature`.
    pub fn group_of(&self, feature: usize) -> Result<usize> {
        self.lookup
            .get(feature)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: feature,
                len: self.lookup.len(),
            })
    }

    /// Unchecked variant of [`group_of`](Self::group_of) for hot loops over
    /// features already validated against the model.
    #[inline]
    pub(crate) fn group_of_unchecked(&self, feature: usize) -> usize {
        self.lookup[feature]
    }

    pub fn lookup(&self) -> &[usize] {
        &self.lookup
    }

    /// Same groups in a different order: `order[i]` is the old index of the
    /// group placed at position `i`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let groups = order
            .iter()
            .map(|&i| {
                self.groups.get(i).cloned().ok_or(Error::IndexOutOfRange {
                    index: i,
                    len: self.groups.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if groups.len() != self.groups.len() {
            return Err(Error::InvalidPartition(
                "permutation has wrong length".into(),
            ));
        }
        Self::new(groups, self.feature_count())
    }

    pub fn to_json(&self) -> String {
        let file = PartitionFile {
            groups: self
                .groups
                .iter()
                .map(|g| RawGroup {
                    name: g.name.clone(),
                    features: g.features.iter().map(|&f| FeatureRef::Index(f)).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("partition serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum FeatureRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct RawGroup {
    name: String,
    features: Vec<FeatureRef>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionFile {
    groups: Vec<RawGroup>,
}

/// Parses a partition file `{ "groups": [ { "name", "features": [int|string] } ] }`.
///
/// Feature names are resolved against `feature_names`. When `rest_group` is
/// set, features not mentioned in the file are collected into an extra group
/// of that name, appended last; otherwise unassigned features are an error.
pub fn parse_partition(
    json_text: &str,
    feature_count: usize,
    feature_names: Option<&[String]>,
    rest_group: Option<&str>,
) -> Result<FeaturePartition> {
    let file: PartitionFile = serde_json::from_str(json_text)?;
    let mut groups = Vec::with_capacity(file.groups.len() + 1);
    for raw in file.groups {
        let features = raw
            .features
            .into_iter()
            .map(|r| match r {
                FeatureRef::Index(i) => Ok(i),
                FeatureRef::Name(name) => feature_names
                    .and_then(|names| names.iter().position(|n| *n == name))
                    .ok_or_else(|| {
                        Error::InvalidPartition(format!(
                            "unknown feature name {name:?} in group {:?}",
                            raw.name
                        ))
                    }),
            })
            .collect::<Result<Vec<_>>>()?;
        groups.push(FeatureGroup {
            name: raw.name,
            features,
        });
    }
    if let Some(rest) = rest_group {
        let mut seen = vec![false; feature_count];
        for f in groups.iter().flat_map(|g| &g.features) {
            if let Some(s) = seen.get_mut(*f) {
                *s = true;
            }
        }
        let missing: Vec<usize> = (0..feature_count).filter(|&f| !seen[f]).collect();
        if !missing.is_empty() {
            groups.push(FeatureGroup {
                name: rest.to_string(),
                features: missing,
            });
        }
    }
    FeaturePartition::new(groups, feature_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_partition_builds_lookup() {
        let p = parse_partition(
            r#"{"groups":[{"name":"A","features":[0,1]},{"name":"B","features":[2]}]}"#,
            3,
            None,
            None,
        )
        .unwrap();
        assert_eq!(p.lookup(), &[0, 0, 1]);
        assert_eq!(p.group_of(1).unwrap(), 0);
        assert_eq!(p.group_count(), 2);
    }

    #[test]
    fn duplicate_assignment_rejected() {
        let err = parse_partition(
            r#"{"groups":[{"name":"A","features":[0]},{"name":"B","features":[0,1]}]}"#,
            2,
            None,
            None,
        )
        .unwrap_err();
        assert!(err.to_string().contains("both"), "{err}");
    }

    #[test]
    fn unassigned_feature_rejected_unless_rest_group() {
        let text = r#"{"groups":[{"name":"A","features":[0]}]}"#;
        assert!(parse_partition(text, 3, None, None).is_err());
        let p = parse_partition(text, 3, None, Some("rest")).unwrap();
        assert_eq!(p.group_count(), 2);
        assert_eq!(p.groups()[1].name, "rest");
        assert_eq!(p.groups()[1].features, vec![1, 2]);
    }

    #[test]
    fn names_resolve_against_model() {
        let names: Vec<String> = ["rain", "temp", "ndvi"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let p = parse_partition(
            r#"{"groups":[{"name":"weather","features":["rain","temp"]},{"name":"sat","features":[2]}]}"#,
            3,
            Some(&names),
            None,
        )
        .unwrap();
        assert_eq!(p.lookup(), &[0, 0, 1]);
        let err = parse_partition(
            r#"{"groups":[{"name":"w","features":["wind"]}]}"#,
            1,
            Some(&names[..1]),
            None,
        )
        .unwrap_err();
        assert!(err.to_string().contains("wind"));
    }

    #[test]
    fn empty_and_duplicate_names_rejected() {
        assert!(FeaturePartition::from_indices(vec![vec![0], vec![]], 1).is_err());
        let dup = vec![
            FeatureGroup {
                name: "A".into(),
                features: vec![0],
            },
            FeatureGroup {
                name: "A".into(),
                features: vec![1],
            },
        ];
        assert!(FeaturePartition::new(dup, 2).is_err());
        assert!(FeaturePartition::from_indices(vec![vec![3]], 2).is_err());
    }

    #[test]
    fn group_of_out_of_range() {
        let p = FeaturePartition::from_indices(vec![vec![0, 1]], 2).unwrap();
        assert!(matches!(p.group_of(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn singleton_is_bijective() {
        let names: Vec<String> = (0..7).map(|i| format!("f{i}")).collect();
        let p = FeaturePartition::singleton(&names);
        assert_eq!(p.group_count(), 7);
        for f in 0..7 {
            assert_eq!(p.group_of(f).unwrap(), f);
            assert_eq!(p.groups()[f].features, vec![f]);
        }
    }

    #[test]
    fn soybean_shaped_partition_validates() {
        let mut groups = Vec::new();
        let mut next = 0;
        for band in 0..11 {
            groups.push(FeatureGroup {
                name: format!("band{band}"),
                features: (next..next + 102).collect(),
            });
            next += 102;
        }
        groups.push(FeatureGroup {
            name: "handcrafted".into(),
            features: (next..1131).collect(),
        });
        let p = FeaturePartition::new(groups, 1131).unwrap();
        assert_eq!(p.group_count(), 12);
        assert_eq!(p.groups()[11].features.len(), 9);
    }

    #[test]
    fn json_round_trip() {
        let p = FeaturePartition::from_indices(vec![vec![2, 0], vec![1]], 3).unwrap();
        let q = parse_partition(&p.to_json(), 3, None, None).unwrap();
        assert_eq!(p, q);
    }

    fn random_partition() -> impl Strategy<Value = (Vec<usize>, usize)> {
        (1usize..40).prop_flat_map(|n| (proptest::collection::vec(0usize..8, n), Just(n)))
    }

    proptest! {
        #[test]
        fn group_of_matches_membership_scan((labels, n) in random_partition()) {
            let mut groups: Vec<Vec<usize>> = Vec::new();
            let mut remap = std::collections::BTreeMap::new();
            for (f, &label) in labels.iter().enumerate() {
                let g = *remap.entry(label).or_insert_with(|| { groups.push(Vec::new()); groups.len() - 1 });
                groups[g].push(f);
            }
            let p = FeaturePartition::from_indices(groups, n).unwrap();
            let total: usize = p.groups().iter().map(|g| g.features.len()).sum();
            prop_assert_eq!(total, n);
            for f in 0..n {
                let scanned = p.groups().iter().position(|g| g.features.contains(&f)).unwrap();
                prop_assert_eq!(p.group_of(f).unwrap(), scanned);
            }
        }
    }
}
