use std::collections::{BTreeMap, BTreeSet};

use super::{EntropyResult, MetricsError};
use crate::model::{GenerationRecord, LabeledMatrix, LanguageTag};

/// Language-to-language confusion matrix.
///
/// Columns are target languages, rows every language that contributed an
/// entropy term. Entry `(i, j)` is the mean contribution of language `i`
/// over the records targeting `j`, so each column sums to that target's mean
/// entropy.
pub fn build_confusion_matrix(
    records: &[(&GenerationRecord, &EntropyResult)],
) -> Result<LabeledMatrix, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut per_target: BTreeMap<LanguageTag, (usize, BTreeMap<LanguageTag, f64>)> =
        BTreeMap::new();
    let mut rows = BTreeSet::new();
    for (record, result) in records {
        let (count, sums) = per_target.entry(record.target_lang).or_default();
        *count += 1;
        for (&lang, &c) in &result.contributions {
            *sums.entry(lang).or_default() += c;
            rows.insert(lang);
        }
    }
    let rows: Vec<_> = rows.into_iter().collect();
    let cols: Vec<_> = per_target.keys().copied().collect();
    let mut values = vec![0.0; rows.len() * cols.len()];
    for (j, (count, sums)) in per_target.values().enumerate() {
        for (i, row) in rows.iter().enumerate() {
            if let Some(s) = sums.get(row) {
                values[i * cols.len() + j] = s / *count as f64;
            }
        }
    }
    Ok(LabeledMatrix::new(rows, cols, values)?)
}
