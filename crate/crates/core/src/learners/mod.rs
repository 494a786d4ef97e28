//! Classifier-in-the-loop machinery: feature tables, min-max scaling, a
//! linear SVM and stratified cross-validation.

mod cv;
mod normalize;
mod svm;

pub use cv::{cv_accuracy, stratified_kfold};
pub use normalize::{apply_normalizer, fit_normalizer, Normalizer};
pub use svm::{accuracy, train_linear, train_linear_with, LinearModel, SvmParams};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("feature table is empty")]
    Empty,
    #[error("row {row} has {got} features, expected {expected}")]
    RaggedRow { row: usize, expected: usize, got: usize },
    #[error("label {label} at row {row} is outside 0..{classes}")]
    LabelOutOfRange { row: usize, label: usize, classes: usize },
    #[error("non-finite feature at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("{rows} rows but {labels} labels")]
    LabelCount { rows: usize, labels: usize },
    #[error("class {class} has {count} instances, fewer than the {k} folds")]
    ClassTooSmall { class: usize, count: usize, k: usize },
    #[error("need at least 2 folds, got {0}")]
    FoldCount(usize),
    #[error("tables have different row counts ({0} vs {1})")]
    RowMismatch(usize, usize),
}

/// Dense row-major `n x d` matrix with one class label per row.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    data: Vec<f64>,
    n: usize,
    d: usize,
    labels: Vec<usize>,
    classes: usize,
}

impl FeatureTable {
    pub fn from_flat(
        data: Vec<f64>,
        d: usize,
        labels: Vec<usize>,
        classes: usize,
    ) -> Result<Self, LearnError> {
        let n = labels.len();
        if n == 0 {
            return Err(LearnError::Empty);
        }
        if data.len() != n * d {
            return Err(LearnError::LabelCount {
                rows: data.len().checked_div(d).unwrap_or(0),
                labels: n,
            });
        }
        for (row, &label) in labels.iter().enumerate() {
            if label >= classes {
                return Err(LearnError::LabelOutOfRange {
                    row,
                    label,
                    classes,
                });
            }
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(LearnError::NonFinite {
                row: i / d,
                col: i % d,
            });
        }
        Ok(Self {
            data,
            n,
            d,
            labels,
            classes,
        })
    }

    pub fn from_rows(
        rows: &[Vec<f64>],
        labels: Vec<usize>,
        classes: usize,
    ) -> Result<Self, LearnError> {
        if rows.len() != labels.len() {
            return Err(LearnError::LabelCount {
                rows: rows.len(),
                labels: labels.len(),
            });
        }
        let d = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * d);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(LearnError::RaggedRow {
                    row,
                    expected: d,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::from_flat(data, d, labels, classes)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> FeatureTable {
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureTable {
            data,
            n: indices.len(),
            d: self.d,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes,
        }
    }

    /// Column-wise concatenation `[self | other]`; labels come from `self`.
    pub fn hconcat(&self, other: &FeatureTable) -> Result<FeatureTable, LearnError> {
        if self.n != other.n {
            return Err(LearnError::RowMismatch(self.n, other.n));
        }
        let d = self.d + other.d;
        let mut data = Vec::with_capacity(self.n * d);
        for i in 0..self.n {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(FeatureTable {
            data,
            n: self.n,
            d,
            labels: self.labels.clone(),
            classes: self.classes,
        })
    }

    pub(crate) fn map_values(&self, f: impl Fn(usize, f64) -> f64) -> FeatureTable {
        let d = self.d.max(1);
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(i, &x)| f(i % d, x))
            .collect();
        FeatureTable {
            data,
            n: self.n,
            d: self.d,
            labels: self.labels.clone(),
            classes: self.classes,
        }
    }
}
