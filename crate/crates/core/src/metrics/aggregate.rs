use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EntropyResult, MetricsError};
use crate::model::GenerationRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateField {
    Model,
    Dataset,
    Setting,
    TargetLang,
    EvalStep,
    Granularity,
}

impl AggregateField {
    pub const ALL: [AggregateField; 6] = [
        AggregateField::Model,
        AggregateField::Dataset,
        AggregateField::Setting,
        AggregateField::TargetLang,
        AggregateField::EvalStep,
        AggregateField::Granularity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AggregateField::Model => "model",
            AggregateField::Dataset => "dataset",
            AggregateField::Setting => "setting",
            AggregateField::TargetLang => "target_lang",
            AggregateField::EvalStep => "eval_step",
            AggregateField::Granularity => "granularity",
        }
    }

    /// Value of this field for one record. A missing eval step reads `-`.
    pub fn value(self, record: &GenerationRecord, result: &EntropyResult) -> String {
        match self {
            AggregateField::Model => record.model.clone(),
            AggregateField::Dataset => record.dataset.clone(),
            AggregateField::Setting => record.setting.to_string(),
            AggregateField::TargetLang => record.target_lang.to_string(),
            AggregateField::EvalStep => record.eval_step.clone().unwrap_or_else(|| "-".to_string()),
            AggregateField::Granularity => result.granularity.to_string(),
        }
    }
}

impl fmt::Display for AggregateField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AggregateField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        AggregateField::ALL
            .into_iter()
            .find(|f| f.name() == s || (s == "target" && *f == AggregateField::TargetLang))
            .ok_or_else(|| format!("unknown aggregation field {s:?}"))
    }
}

/// Ordered, duplicate-free list of grouping fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AggregateField>", into = "Vec<AggregateField>")]
pub struct AggregateKey(Vec<AggregateField>);

impl AggregateKey {
    pub fn new(fields: impl IntoIterator<Item = AggregateField>) -> Result<Self, MetricsError> {
        let mut out = Vec::new();
        for f in fields {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        if out.is_empty() {
            return Err(MetricsError::EmptyKey);
        }
        Ok(Self(out))
    }

    pub fn fields(&self) -> &[AggregateField] {
        &self.0
    }
}

impl TryFrom<Vec<AggregateField>> for AggregateKey {
    type Error = MetricsError;

    fn try_from(fields: Vec<AggregateField>) -> Result<Self, Self::Error> {
        Self::new(fields)
    }
}

impl From<AggregateKey> for Vec<AggregateField> {
    fn from(key: AggregateKey) -> Self {
        key.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    /// One value per key field, in key order.
    pub key: Vec<String>,
    pub mean: f64,
    pub count: usize,
    /// Sample standard deviation; 0 for singleton groups.
    pub stddev: f64,
}

/// Mean, count and standard deviation of entropy per group, sorted by the
/// group's key values.
pub fn aggregate_entropy(
    records: &[(&GenerationRecord, &EntropyResult)],
    key: &AggregateKey,
) -> Result<Vec<AggregateRow>, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut groups: BTreeMap<Vec<String>, Vec<f64>> = BTreeMap::new();
    for (record, result) in records {
        let values = key
            .fields()
            .iter()
            .map(|f| f.value(record, result))
            .collect();
        groups.entry(values).or_default().push(result.value);
    }
    Ok(groups
        .into_iter()
        .map(|(key, values)| {
            let (mean, stddev) = mean_and_stddev(&values);
            AggregateRow {
                key,
                mean,
                count: values.len(),
                stddev,
            }
        })
        .collect())
}

pub(crate) fn mean_and_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
