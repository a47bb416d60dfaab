//! Column-wise KL divergence between a confusion matrix `M1` and a
//! similarity matrix `M2`.
//!
//! For each column, rows where `M1` is zero are excluded, both columns are
//! normalized to sum 1, `EPSILON` is added to every entry, and
//! `sum P ln(P / Q)` is taken. The result is the mean over columns. Columns
//! of `M1` that are entirely zero are skipped and reported.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{LabeledMatrix, LanguageTag, ModelError};
use crate::par::Execution;

pub const EPSILON: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DivergenceError {
    #[error("matrices share no {0} labels")]
    NoOverlap(&'static str),
    #[error("columns of length {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("confusion column has no nonzero entry")]
    AllZeroColumn,
    #[error("every confusion column is zero")]
    AllColumnsSkipped,
    #[error("matrices are not aligned")]
    NotAligned,
    #[error("negative entry {0}; divergence needs non-negative weights")]
    NegativeEntry(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Labels each input lost when aligning.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentCoverage {
    pub m1_dropped_rows: Vec<LanguageTag>,
    pub m1_dropped_cols: Vec<LanguageTag>,
    pub m2_dropped_rows: Vec<LanguageTag>,
    pub m2_dropped_cols: Vec<LanguageTag>,
}

impl AlignmentCoverage {
    pub fn is_complete(&self) -> bool {
        self.m1_dropped_rows.is_empty()
            && self.m1_dropped_cols.is_empty()
            && self.m2_dropped_rows.is_empty()
            && self.m2_dropped_cols.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aligned {
    pub m1: LabeledMatrix,
    pub m2: LabeledMatrix,
    pub coverage: AlignmentCoverage,
}

fn split(labels: &[LanguageTag], keep: &BTreeSet<LanguageTag>) -> Vec<LanguageTag> {
    labels
        .iter()
        .filter(|l| !keep.contains(l))
        .copied()
        .collect()
}

/// Reindexes both matrices to the sorted intersection of their row labels
/// and of their column labels.
pub fn align_matrices(m1: &LabeledMatrix, m2: &LabeledMatrix) -> Result<Aligned, DivergenceError> {
    let inter = |a: &[LanguageTag], b: &[LanguageTag]| -> BTreeSet<LanguageTag> {
        let b: BTreeSet<_> = b.iter().collect();
        a.iter().filter(|l| b.contains(l)).copied().collect()
    };
    let rows = inter(m1.row_labels(), m2.row_labels());
    let cols = inter(m1.col_labels(), m2.col_labels());
    if rows.is_empty() {
        return Err(DivergenceError::NoOverlap("row"));
    }
    if cols.is_empty() {
        return Err(DivergenceError::NoOverlap("column"));
    }
    let coverage = AlignmentCoverage {
        m1_dropped_rows: split(m1.row_labels(), &rows),
        m1_dropped_cols: split(m1.col_labels(), &cols),
        m2_dropped_rows: split(m2.row_labels(), &rows),
        m2_dropped_cols: split(m2.col_labels(), &cols),
    };
    if !(coverage.m1_dropped_rows.is_empty() && coverage.m1_dropped_cols.is_empty()) {
        log::warn!("aligning matrices dropped labels: {coverage:?}");
    } else if !coverage.is_complete() {
        log::debug!("aligning matrices dropped labels: {coverage:?}");
    }
    let rows: Vec<_> = rows.into_iter().collect();
    let cols: Vec<_> = cols.into_iter().collect();
    Ok(Aligned {
        m1: m1.reindex(&rows, &cols)?,
        m2: m2.reindex(&rows, &cols)?,
        coverage,
    })
}

fn normalize(xs: &mut [f64]) {
    let total: f64 = xs.iter().sum();
    // An all-zero similarity selection stays zero and is carried by epsilon.
    if total > 0.0 {
        xs.iter_mut().for_each(|x| *x /= total);
    }
}

/// KL divergence of one confusion column `p` against a similarity column `q`.
pub fn kl_column(p: &[f64], q: &[f64]) -> Result<f64, DivergenceError> {
    if p.len() != q.len() {
        return Err(DivergenceError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if let Some(&v) = p.iter().chain(q).find(|v| **v < 0.0 || !v.is_finite()) {
        return Err(DivergenceError::NegativeEntry(v));
    }
    let (mut ps, mut qs): (Vec<f64>, Vec<f64>) = p
        .iter()
        .zip(q)
        .filter(|(a, _)| **a != 0.0)
        .map(|(a, b)| (*a, *b))
        .unzip();
    if ps.is_empty() {
        return Err(DivergenceError::AllZeroColumn);
    }
    normalize(&mut ps);
    normalize(&mut qs);
    Ok(ps
        .iter()
        .zip(&qs)
        .map(|(a, b)| {
            let (a, b) = (a + EPSILON, b + EPSILON);
            a * (a / b).ln()
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KLReport {
    pub mean_kl: f64,
    pub per_column: BTreeMap<LanguageTag, f64>,
    /// Columns whose confusion entries are all zero.
    pub skipped_columns: BTreeSet<LanguageTag>,
}

impl KLReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Header and one data row: `mean_kl`, then one column per language.
    /// Skipped columns are left empty.
    pub fn to_csv_row(&self, label: &str) -> String {
        let langs: BTreeSet<_> = self
            .per_column
            .keys()
            .chain(&self.skipped_columns)
            .collect();
        let mut header = vec!["name".to_string(), "mean_kl".to_string()];
        let mut row = vec![label.to_string(), crate::model::fmt::sig6(self.mean_kl)];
        for l in langs {
            header.push(l.to_string());
            row.push(
                self.per_column
                    .get(l)
                    .map(|v| crate::model::fmt::sig6(*v))
                    .unwrap_or_default(),
            );
        }
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

/// Mean column-wise divergence of aligned matrices.
pub fn kl_matrix_divergence(
    m1: &LabeledMatrix,
    m2: &LabeledMatrix,
    execution: Execution,
) -> Result<KLReport, DivergenceError> {
    if m1.row_labels() != m2.row_labels() || m1.col_labels() != m2.col_labels() {
        return Err(DivergenceError::NotAligned);
    }
    let cols: Vec<usize> = (0..m1.ncols()).collect();
    let results = execution.map(&cols, |&j| kl_column(&m1.column(j), &m2.column(j)));
    let mut per_column = BTreeMap::new();
    let mut skipped_columns = BTreeSet::new();
    for (j, r) in results.into_iter().enumerate() {
        let lang = m1.col_labels()[j];
        match r {
            Ok(v) => {
                per_column.insert(lang, v);
            }
            Err(DivergenceError::AllZeroColumn) => {
                skipped_columns.insert(lang);
            }
            Err(e) => return Err(e),
        }
    }
    if per_column.is_empty() {
        return Err(DivergenceError::AllColumnsSkipped);
    }
    if !skipped_columns.is_empty() {
        log::warn!("skipped all-zero confusion columns: {skipped_columns:?}");
    }
    let mean_kl = per_column.values().sum::<f64>() / per_column.len() as f64;
    Ok(KLReport {
        mean_kl,
        per_column,
        skipped_columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tags(s: &[&str]) -> Vec<LanguageTag> {
        s.iter().map(|c| LanguageTag::code(c)).collect()
    }

    fn matrix(rows: &[&str], cols: &[&str], values: &[f64]) -> LabeledMatrix {
        LabeledMatrix::new(tags(rows), tags(cols), values.to_vec()).unwrap()
    }

    #[test]
    fn column_examples() {
        let v = kl_column(&[0.5, 0.5], &[0.9, 0.1]).unwrap();
        let hand = 0.5 * (0.5f64 / 0.9).ln() + 0.5 * (0.5f64 / 0.1).ln();
        assert!((v - hand).abs() < 1e-9);
        assert!((v - 0.510826).abs() < 5e-7);
        assert!(kl_column(&[0.3, 0.7], &[0.3, 0.7]).unwrap().abs() < 1e-9);
        assert!(kl_column(&[0.2, 0.0, 0.8], &[0.1, 0.5, 0.4]).unwrap().abs() < 1e-9);
    }

    #[test]
    fn column_errors() {
        assert_eq!(
            kl_column(&[0.0, 0.0], &[0.5, 0.5]),
            Err(DivergenceError::AllZeroColumn)
        );
        assert_eq!(
            kl_column(&[1.0], &[0.5, 0.5]),
            Err(DivergenceError::LengthMismatch { left: 1, right: 2 })
        );
        assert_eq!(
            kl_column(&[1.0, 0.5], &[-0.5, 0.5]),
            Err(DivergenceError::NegativeEntry(-0.5))
        );
    }

    #[test]
    fn zero_similarity_selection_is_finite() {
        // Q keeps only epsilon: 2 * (0.5 + e) * ln((0.5 + e) / e).
        let v = kl_column(&[0.5, 0.5, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        let e = EPSILON;
        assert!(
            (v - (1.0 + 2.0 * e) * ((0.5 + e) / e).ln()).abs() < 1e-9,
            "{v}"
        );
    }

    #[test]
    fn matrix_mean_of_two_columns() {
        let m1 = matrix(&["aaa", "bbb"], &["aaa", "bbb"], &[0.5, 0.3, 0.5, 0.7]);
        let m2 = matrix(&["aaa", "bbb"], &["aaa", "bbb"], &[0.9, 0.3, 0.1, 0.7]);
        let r = kl_matrix_divergence(&m1, &m2, Execution::Sequential).unwrap();
        assert!((r.mean_kl - 0.255413).abs() < 5e-7);
        assert!(r.skipped_columns.is_empty());
    }

    #[test]
    fn identical_stochastic_matrices() {
        let v = [0.2, 0.5, 0.1, 0.3, 0.25, 0.6, 0.5, 0.25, 0.3];
        let m = matrix(&["aaa", "bbb", "ccc"], &["aaa", "bbb", "ccc"], &v);
        assert!(
            kl_matrix_divergence(&m, &m, Execution::Parallel)
                .unwrap()
                .mean_kl
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn zero_column_skipped() {
        let m1 = matrix(
            &["aaa", "bbb"],
            &["aaa", "bbb", "ccc"],
            &[0.5, 0.0, 0.3, 0.5, 0.0, 0.7],
        );
        let m2 = matrix(
            &["aaa", "bbb"],
            &["aaa", "bbb", "ccc"],
            &[0.9, 0.5, 0.3, 0.1, 0.5, 0.7],
        );
        let r = kl_matrix_divergence(&m1, &m2, Execution::Sequential).unwrap();
        assert_eq!(r.per_column.len(), 2);
        assert_eq!(r.skipped_columns, tags(&["bbb"]).into_iter().collect());
        assert!((r.mean_kl - 0.255413).abs() < 5e-7);
        let zero = matrix(&["aaa"], &["aaa"], &[0.0]);
        assert_eq!(
            kl_matrix_divergence(&zero, &zero, Execution::Sequential),
            Err(DivergenceError::AllColumnsSkipped)
        );
    }

    #[test]
    fn unaligned_rejected() {
        let a = matrix(&["aaa"], &["aaa"], &[1.0]);
        let b = matrix(&["bbb"], &["aaa"], &[1.0]);
        assert_eq!(
            kl_matrix_divergence(&a, &b, Execution::Sequential),
            Err(DivergenceError::NotAligned)
        );
    }

    #[test]
    fn alignment() {
        let m1 = matrix(&["ccc", "aaa", "bbb"], &["aaa"], &[3.0, 1.0, 2.0]);
        let m2 = matrix(&["bbb", "ccc", "ddd"], &["aaa"], &[20.0, 30.0, 40.0]);
        let a = align_matrices(&m1, &m2).unwrap();
        assert_eq!(a.m1.row_labels(), tags(&["bbb", "ccc"]));
        assert_eq!(a.m1.values(), &[2.0, 3.0]);
        assert_eq!(a.m2.values(), &[20.0, 30.0]);
        assert_eq!(a.coverage.m1_dropped_rows, tags(&["aaa"]));
        assert_eq!(a.coverage.m2_dropped_rows, tags(&["ddd"]));

        let same = align_matrices(&m1, &m1).unwrap();
        assert_eq!(same.m1, m1.sorted());
        assert!(same.coverage.is_complete());

        let other = matrix(&["xxx"], &["aaa"], &[1.0]);
        assert_eq!(
            align_matrices(&m1, &other),
            Err(DivergenceError::NoOverlap("row"))
        );
    }

    #[test]
    fn csv_row_layout() {
        let r = KLReport {
            mean_kl: 0.25,
            per_column: [
                (LanguageTag::code("deu"), 0.5),
                (LanguageTag::code("fra"), 0.0),
            ]
            .into(),
            skipped_columns: [LanguageTag::code("eng")].into(),
        };
        assert_eq!(
            r.to_csv_row("wals"),
            "name,mean_kl,deu,eng,fra\nwals,0.25,0.5,,0\n"
        );
        let back: KLReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    fn column_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..12).prop_flat_map(|n| {
            (
                proptest::collection::vec(prop_oneof![Just(0.0), 0.001f64..5.0], n),
                proptest::collection::vec(0.001f64..5.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn non_negative((p, q) in column_pair()) {
            if let Ok(v) = kl_column(&p, &q) {
                prop_assert!(v >= -1e-9);
            }
        }

        #[test]
        fn scale_invariant((p, q) in column_pair(), a in 0.01f64..100.0, b in 0.01f64..100.0) {
            if let Ok(v) = kl_column(&p, &q) {
                let ps: Vec<f64> = p.iter().map(|x| x * a).collect();
                let qs: Vec<f64> = q.iter().map(|x| x * b).collect();
                let w = kl_column(&ps, &qs).unwrap();
                prop_assert!((v - w).abs() < 1e-9 * (1.0 + v.abs()));
            }
        }
    }
}
