use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{fmt::sig6, LanguageTag, ModelError};

/// Dense real matrix with language labels on both axes.
///
/// Values are stored row-major. Labels are unique per axis and every value
/// is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledMatrix {
    row_labels: Vec<LanguageTag>,
    col_labels: Vec<LanguageTag>,
    values: Vec<f64>,
}

impl LabeledMatrix {
    pub fn new(
        row_labels: Vec<LanguageTag>,
        col_labels: Vec<LanguageTag>,
        values: Vec<f64>,
    ) -> Result<Self, ModelError> {
        check_unique(&row_labels)?;
        check_unique(&col_labels)?;
        if values.len() != row_labels.len() * col_labels.len() {
            return Err(ModelError::MatrixShape {
                rows: row_labels.len(),
                cols: col_labels.len(),
                values: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteValue {
                row: pos / col_labels.len().max(1),
                col: pos % col_labels.len().max(1),
            });
        }
        Ok(Self {
            row_labels,
            col_labels,
            values,
        })
    }

    /// Builds a matrix by evaluating `f` on every (row, column) label pair.
    pub fn from_fn(
        row_labels: Vec<LanguageTag>,
        col_labels: Vec<LanguageTag>,
        mut f: impl FnMut(&LanguageTag, &LanguageTag) -> f64,
    ) -> Result<Self, ModelError> {
        let mut values = Vec::with_capacity(row_labels.len() * col_labels.len());
        for r in &row_labels {
            for c in &col_labels {
                values.push(f(r, c));
            }
        }
        Self::new(row_labels, col_labels, values)
    }

    pub fn nrows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[LanguageTag] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[LanguageTag] {
        &self.col_labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.ncols() + col]
    }

    /// Value at the given labels, if both exist.
    pub fn get_labeled(&self, row: &LanguageTag, col: &LanguageTag) -> Option<f64> {
        let i = self.row_index(row)?;
        let j = self.col_index(col)?;
        Some(self.get(i, j))
    }

    pub fn row_index(&self, lang: &LanguageTag) -> Option<usize> {
        self.row_labels.iter().position(|l| l == lang)
    }

    pub fn col_index(&self, lang: &LanguageTag) -> Option<usize> {
        self.col_labels.iter().position(|l| l == lang)
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.nrows()).map(|r| self.get(r, col)).collect()
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let n = self.ncols();
        &self.values[row * n..(row + 1) * n]
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.ncols())
            .map(|c| (0..self.nrows()).map(|r| self.get(r, c)).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for c in 0..self.ncols() {
            for r in 0..self.nrows() {
                values.push(self.get(r, c));
            }
        }
        Self {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            values,
        }
    }

    /// Selects and orders rows and columns by label. Every requested label
    /// must exist.
    pub fn reindex(&self, rows: &[LanguageTag], cols: &[LanguageTag]) -> Result<Self, ModelError> {
        let ri = rows
            .iter()
            .map(|l| self.row_index(l).ok_or(ModelError::UnknownLabel(*l)))
            .collect::<Result<Vec<_>, _>>()?;
        let ci = cols
            .iter()
            .map(|l| self.col_index(l).ok_or(ModelError::UnknownLabel(*l)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut values = Vec::with_capacity(ri.len() * ci.len());
        for &r in &ri {
            for &c in &ci {
                values.push(self.get(r, c));
            }
        }
        Self::new(rows.to_vec(), cols.to_vec(), values)
    }

    /// Same matrix with rows and columns in label order.
    pub fn sorted(&self) -> Self {
        let mut rows = self.row_labels.clone();
        let mut cols = self.col_labels.clone();
        rows.sort();
        cols.sort();
        self.reindex(&rows, &cols).expect("labels taken from self")
    }

    /// CSV with a `lang` corner cell, column labels in the header and row
    /// labels in the first column. Values use six significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lang");
        for c in &self.col_labels {
            write!(out, ",{c}").unwrap();
        }
        out.push('\n');
        for (r, label) in self.row_labels.iter().enumerate() {
            out.push_str(&label.to_string());
            for v in self.row(r) {
                out.push(',');
                out.push_str(&sig6(*v));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the layout written by [`to_csv`](Self::to_csv).
    pub fn from_csv(text: &str) -> Result<Self, ModelError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(ModelError::CsvParse {
            line: 1,
            message: "empty input".into(),
        })?;
        let col_labels = header
            .split(',')
            .skip(1)
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e: ModelError| ModelError::CsvParse {
                        line: 1,
                        message: e.to_string(),
                    })
            })
            .collect::<Result<Vec<LanguageTag>, _>>()?;
        let mut row_labels = Vec::new();
        let mut values = Vec::new();
        for (idx, line) in lines {
            let err = |message: String| ModelError::CsvParse {
                line: idx + 1,
                message,
            };
            let mut cells = line.split(',');
            let label = cells.next().unwrap_or_default();
            row_labels.push(
                label
                    .trim()
                    .parse()
                    .map_err(|e: ModelError| err(e.to_string()))?,
            );
            let row: Vec<f64> = cells
                .map(|c| c.trim().parse::<f64>().map_err(|e| err(e.to_string())))
                .collect::<Result<_, _>>()?;
            if row.len() != col_labels.len() {
                return Err(err(format!(
                    "expected {} values, found {}",
                    col_labels.len(),
                    row.len()
                )));
            }
            values.extend(row);
        }
        Self::new(row_labels, col_labels, values)
    }

    /// Row-label → (column-label → value) view, convenient for JSON export.
    pub fn to_nested_map(&self) -> BTreeMap<LanguageTag, BTreeMap<LanguageTag, f64>> {
        self.row_labels
            .iter()
            .enumerate()
            .map(|(r, rl)| {
                let row = self
                    .col_labels
                    .iter()
                    .zip(self.row(r))
                    .map(|(cl, v)| (*cl, *v))
                    .collect();
                (*rl, row)
            })
            .collect()
    }
}

fn check_unique(labels: &[LanguageTag]) -> Result<(), ModelError> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l) {
            return Err(ModelError::DuplicateLabel(*l));
        }
    }
    Ok(())
}
