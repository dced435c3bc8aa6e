//! Dataset sweeps and the data behind swarm plots: per-row explanations,
//! per-group aggregated feature values, their normalization to `[0, 1]`, and
//! CSV export.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explanation::Explanation;
use crate::partition::FeaturePartition;
use crate::tree::TreeEnsemble;
use crate::{fast, oracle};

/// Header accepted alongside feature columns to label rows.
pub const ROW_ID_COLUMN: &str = "row_id";

/// Dense rows in model feature order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<Vec<f64>>,
    feature_names: Vec<String>,
    row_ids: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(
        rows: Vec<Vec<f64>>,
        feature_names: Vec<String>,
        row_ids: Option<Vec<String>>,
    ) -> Result<Self> {
        if let Some((i, row)) = rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != feature_names.len())
        {
            return Err(Error::InvalidDataset(format!(
                "row {i} has {} values, expected {}",
                row.len(),
                feature_names.len()
            )));
        }
        if let Some(ids) = &row_ids {
            if ids.len() != rows.len() {
                return Err(Error::InvalidDataset(format!(
                    "{} row ids for {} rows",
                    ids.len(),
                    rows.len()
                )));
            }
        }
        Ok(Self {
            rows,
            feature_names,
            row_ids,
        })
    }

    /// Reads CSV with a header row. Columns are matched to `feature_names` by
    /// name, in any order; an optional `row_id` column labels rows. Any other
    /// column, a missing feature, or an unparsable cell is an error.
    pub fn from_csv(text: &str, feature_names: &[String]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header = reader.headers()?.clone();
        let position: HashMap<&str, usize> = feature_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut columns = Vec::with_capacity(header.len());
        let mut id_column = None;
        let mut seen = vec![false; feature_names.len()];
        for (c, name) in header.iter().enumerate() {
            let name = name.trim();
            if name == ROW_ID_COLUMN && !position.contains_key(name) {
                id_column = Some(c);
                columns.push(None);
                continue;
            }
            let f = *position.get(name).ok_or_else(|| {
                Error::InvalidDataset(format!("column {name:?} is not a model feature"))
            })?;
            if std::mem::replace(&mut seen[f], true) {
                return Err(Error::InvalidDataset(format!(
                    "column {name:?} appears twice"
                )));
            }
            columns.push(Some(f));
        }
        if let Some(f) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidDataset(format!(
                "missing column for feature {:?}",
                feature_names[f]
            )));
        }

        let mut rows = Vec::new();
        let mut ids = id_column.map(|_| Vec::new());
        for (r, record) in reader.records().enumerate() {
            let record = record?;
            let mut row = vec![0.0; feature_names.len()];
            for (c, cell) in record.iter().enumerate() {
                match columns.get(c).copied().flatten() {
                    Some(f) => {
                        let v: f64 = cell.trim().parse().map_err(|_| {
                            Error::InvalidDataset(format!(
                                "row {r}, column {:?}: bad number {cell:?}",
                                &header[c]
                            ))
                        })?;
                        if !v.is_finite() {
                            return Err(Error::InvalidDataset(format!(
                                "row {r}, column {:?}: values must be finite",
                                &header[c]
                            )));
                        }
                        row[f] = v;
                    }
                    None => {
                        if let Some(ids) = &mut ids {
                            ids.push(cell.to_string());
                        }
                    }
                }
            }
            rows.push(row);
        }
        Self::new(rows, feature_names.to_vec(), ids)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, index: usize) -> Option<&[f64]> {
        self.rows.get(index).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Explicit id, or the zero-based row index.
    pub fn row_id(&self, index: usize) -> String {
        match &self.row_ids {
            Some(ids) => ids[index].clone(),
            None => index.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Fast,
    Oracle,
}

impl Engine {
    pub fn explain(
        self,
        ensemble: &TreeEnsemble,
        x: &[f64],
        partition: &FeaturePartition,
    ) -> Result<Explanation> {
        match self {
            Engine::Fast => fast::ensemble_gsv(ensemble, x, partition),
            Engine::Oracle => oracle::brute_force_gsv(ensemble, x, partition),
        }
    }
}

/// One explanation per row, in row order. `threads > 1` fans rows out over a
/// dedicated pool; results do not depend on the thread count.
pub fn explain_dataset(
    ensemble: &TreeEnsemble,
    dataset: &Dataset,
    partition: &FeaturePartition,
    engine: Engine,
    threads: usize,
) -> Result<Vec<Explanation>> {
    let explain = |row: &Vec<f64>| engine.explain(ensemble, row, partition);
    if threads <= 1 {
        return dataset.rows.iter().map(explain).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidDataset(format!("cannot start {threads} threads: {e}")))?;
    pool.install(|| dataset.rows.par_iter().map(explain).collect())
}

/// How a group's feature values collapse to one representative number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregator {
    #[default]
    Mean,
}

impl Aggregator {
    fn apply(self, values: impl ExactSizeIterator<Item = f64>) -> f64 {
        match self {
            Aggregator::Mean => {
                let n = values.len() as f64;
                values.sum::<f64>() / n
            }
        }
    }
}

/// `rows x groups` matrix of aggregated raw feature values.
pub fn aggregate_group_values(
    dataset: &Dataset,
    partition: &FeaturePartition,
    aggregator: Aggregator,
) -> Vec<Vec<f64>> {
    dataset
        .rows
        .iter()
        .map(|row| {
            partition
                .groups()
                .iter()
                .map(|g| aggregator.apply(g.features.iter().map(|&f| row[f])))
                .collect()
        })
        .collect()
}

/// Per-column min-max scaling to `[0, 1]` over all rows. Constant columns map
/// to 0.5.
pub fn normalize_colors(values: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let first = values.first().ok_or(Error::EmptyInput)?;
    let columns = first.len();
    let mut lo = vec![f64::INFINITY; columns];
    let mut hi = vec![f64::NEG_INFINITY; columns];
    for row in values {
        for (c, &v) in row.iter().enumerate() {
            lo[c] = lo[c].min(v);
            hi[c] = hi[c].max(v);
        }
    }
    Ok(values
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, &v)| {
                    let range = hi[c] - lo[c];
                    if range > 0.0 {
                        ((v - lo[c]) / range).clamp(0.0, 1.0)
                    } else {
                        0.5
                    }
                })
                .collect()
        })
        .collect())
}

/// One plotted dot: a row's contribution for one group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwarmPoint {
    pub row: usize,
    pub row_id: String,
    pub group: usize,
    pub gsv: f64,
    pub color_value: f64,
    pub raw_aggregate: f64,
}

/// Joins explanations with aggregated and normalized group values, row-major.
pub fn swarm_points(
    dataset: &Dataset,
    explanations: &[Explanation],
    aggregates: &[Vec<f64>],
    colors: &[Vec<f64>],
) -> Vec<SwarmPoint> {
    explanations
        .iter()
        .enumerate()
        .flat_map(|(row, e)| {
            e.contributions
                .iter()
                .enumerate()
                .map(move |(group, c)| SwarmPoint {
                    row,
                    row_id: dataset.row_id(row),
                    group,
                    gsv: c.gsv,
                    color_value: colors[row][group],
                    raw_aggregate: aggregates[row][group],
                })
        })
        .collect()
}

/// Full pipeline from model and data to swarm points.
pub fn build_swarm(
    ensemble: &TreeEnsemble,
    dataset: &Dataset,
    partition: &FeaturePartition,
    engine: Engine,
    threads: usize,
) -> Result<(Vec<Explanation>, Vec<SwarmPoint>)> {
    let explanations = explain_dataset(ensemble, dataset, partition, engine, threads)?;
    let aggregates = aggregate_group_values(dataset, partition, Aggregator::Mean);
    let colors = normalize_colors(&aggregates)?;
    let points = swarm_points(dataset, &explanations, &aggregates, &colors);
    Ok((explanations, points))
}

/// Full-precision decimal (17 significant digits).
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with header `row_id,group,gsv,color_value,raw_aggregate`, one line per
/// point. Group names come from the point's explanation.
pub fn export_csv(explanations: &[Explanation], points: &[SwarmPoint]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["row_id", "group", "gsv", "color_value", "raw_aggregate"])?;
    for p in points {
        let group = &explanations[p.row].contributions[p.group].name;
        writer.write_record([
            p.row_id.as_str(),
            group.as_str(),
            &format_float(p.gsv),
            &format_float(p.color_value),
            &format_float(p.raw_aggregate),
        ])?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::InvalidDataset(format!("csv flush failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
