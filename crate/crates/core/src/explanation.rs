use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupContribution {
    pub name: String,
    pub gsv: f64,
}

/// Local explanation of one prediction: `base + sum(gsv) == prediction`.
///
/// `base` is the model's expected output with no feature known. Contributions
/// follow the partition's group order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub base: f64,
    pub prediction: f64,
    #[serde(rename = "groups")]
    pub contributions: Vec<GroupContribution>,
}

impl Explanation {
    pub fn gsv(&self) -> Vec<f64> {
        self.contributions.iter().map(|c| c.gsv).collect()
    }

    pub fn total(&self) -> f64 {
        self.contributions.iter().map(|c| c.gsv).sum()
    }

    /// `|base + sum(gsv) - prediction|`
    pub fn efficiency_residual(&self) -> f64 {
        (self.base + self.total() - self.prediction).abs()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("explanation serializes")
    }
}

/// JSON array of explanations, one per row in row order.
pub fn explanations_to_json(explanations: &[Explanation]) -> String {
    serde_json::to_string_pretty(explanations).expect("explanations serialize")
}
