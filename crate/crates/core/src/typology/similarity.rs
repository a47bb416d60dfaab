use serde::Serialize;

use super::{LanguageGraph, Representation, TypologyError};
use crate::model::{LabeledMatrix, LanguageTag};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityMatrix {
    /// Kernel values clipped at 0.
    pub matrix: LabeledMatrix,
    /// Kernel values as computed.
    pub raw: LabeledMatrix,
    pub dropped_rows: Vec<LanguageTag>,
    pub dropped_cols: Vec<LanguageTag>,
}

impl SimilarityMatrix {
    pub fn is_complete(&self) -> bool {
        self.dropped_rows.is_empty() && self.dropped_cols.is_empty()
    }
}

fn present<'g>(
    graph: &'g LanguageGraph,
    requested: &[LanguageTag],
) -> (Vec<(LanguageTag, &'g Representation)>, Vec<LanguageTag>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for lang in requested {
        match graph.get(lang) {
            Some(rep) => kept.push((*lang, rep)),
            None => dropped.push(*lang),
        }
    }
    (kept, dropped)
}

/// Pairwise kernel matrix over the requested axes, in request order.
///
/// Languages missing from the graph are dropped and listed in the result.
pub fn build_similarity_matrix(
    graph: &LanguageGraph,
    rows: &[LanguageTag],
    cols: &[LanguageTag],
    execution: Execution,
) -> Result<SimilarityMatrix, TypologyError> {
    let (kept_rows, dropped_rows) = present(graph, rows);
    let (kept_cols, dropped_cols) = present(graph, cols);
    if kept_rows.is_empty() || kept_cols.is_empty() {
        return Err(TypologyError::NoCoverage(graph.name().to_string()));
    }
    for (axis, dropped) in [("rows", &dropped_rows), ("columns", &dropped_cols)] {
        if !dropped.is_empty() {
            log::warn!(
                "{}: {axis} absent from graph, dropped: {dropped:?}",
                graph.name()
            );
        }
    }
    let ncols = kept_cols.len();
    let raw = execution
        .map_range(kept_rows.len() * ncols, |k| {
            graph.similarity(kept_rows[k / ncols].1, kept_cols[k % ncols].1)
        })
        .into_iter()
        .collect::<Result<Vec<f64>, _>>()?;
    let clipped = raw.iter().map(|&v| v.max(0.0)).collect();
    let row_labels: Vec<_> = kept_rows.iter().map(|(l, _)| *l).collect();
    let col_labels: Vec<_> = kept_cols.iter().map(|(l, _)| *l).collect();
    Ok(SimilarityMatrix {
        matrix: LabeledMatrix::new(row_labels.clone(), col_labels.clone(), clipped)?,
        raw: LabeledMatrix::new(row_labels, col_labels, raw)?,
        dropped_rows,
        dropped_cols,
    })
}
