//! Compressed sparse binary input.
//!
//! A sample is stored as the sorted list of feature indices whose value is 1.
//! Negated literals are never materialised: a feature missing from the row
//! means its negation holds. [`SparseRow::densify`] expands a row back into
//! the full `2o` literal vector for the dense reference model.

mod io;
mod vocab;

pub use io::{load_sparse_file, read_sparse, save_sparse_file, write_sparse};
pub use vocab::{Tokenizer, Vocabulary};

use serde::{Deserialize, Serialize};

use crate::error::{Result, StmError};

/// Sorted, duplicate-free active feature indices of one sample.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseRow(Vec<u32>);

impl SparseRow {
    /// Wraps `indices`, which must already be strictly increasing.
    pub fn new(indices: Vec<u32>) -> Result<Self> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(StmError::UnsortedIndices { prev: w[0], next: w[1] });
            }
        }
        Ok(Self(indices))
    }

    /// Builds a row from indices in any order, dropping duplicates.
    pub fn from_unsorted<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        let mut v: Vec<u32> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    #[inline]
    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn contains(&self, feature: u32) -> bool {
        self.0.binary_search(&feature).is_ok()
    }

    /// Checks that every index is below `features`.
    pub fn check_bounds(&self, features: u32) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= features => {
                Err(StmError::FeatureOutOfRange { index: last, features })
            }
            _ => Ok(()),
        }
    }

    /// Expands to the literal vector `[x_1..x_o, !x_1..!x_o]`.
    pub fn densify(&self, features: u32) -> Result<Vec<bool>> {
        self.check_bounds(features)?;
        let o = features as usize;
        let mut dense = vec![false; 2 * o];
        dense[o..].fill(true);
        for &k in &self.0 {
            dense[k as usize] = true;
            dense[o + k as usize] = false;
        }
        Ok(dense)
    }
}

impl AsRef<[u32]> for SparseRow {
    fn as_ref(&self) -> &[u32] {
        &self.0
    }
}

/// Labelled collection of sparse rows over a fixed feature space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseDataset {
    rows: Vec<SparseRow>,
    labels: Vec<u32>,
    feature_count: u32,
    class_count: u32,
}

impl SparseDataset {
    pub fn new(
        rows: Vec<SparseRow>,
        labels: Vec<u32>,
        feature_count: u32,
        class_count: u32,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(StmError::DimensionMismatch { expected: rows.len(), actual: labels.len() });
        }
        for row in &rows {
            row.check_bounds(feature_count)?;
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= class_count) {
            return Err(StmError::ClassOutOfRange { class: bad, classes: class_count });
        }
        Ok(Self { rows, labels, feature_count, class_count })
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn feature_count(&self) -> u32 {
        self.feature_count
    }

    pub fn class_count(&self) -> u32 {
        self.class_count
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SparseRow, u32)> + '_ {
        self.rows.iter().zip(self.labels.iter().copied())
    }

    /// Total number of stored (non-zero) indices.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseRow::len).sum()
    }

    /// Fraction of non-zero entries over `rows x o`.
    pub fn density(&self) -> Result<f64> {
        if self.rows.is_empty() || self.feature_count == 0 {
            return Err(StmError::EmptyDataset);
        }
        Ok(self.nnz() as f64 / (self.rows.len() as f64 * self.feature_count as f64))
    }

    /// Copies the samples at `indices` into a new dataset with the same shape.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_count: self.feature_count,
            class_count: self.class_count,
        }
    }
}
