//! Tabular datasets: a dense attribute matrix with dense integer class labels.
//!
//! Rows are instances and columns are attributes. Labels are factorized to
//! `0..class_count` when loading, so a class id doubles as an index into
//! `class_names`.

mod folds;
mod io;
mod normalize;

pub use folds::{make_folds, FoldPlan};
pub use io::{
    load_csv, load_csv_from_reader, read_unlabeled_csv, write_csv, ColumnRef, LoadOptions,
};
pub use normalize::{normalize, NormalizationPolicy, Normalizer};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    labels: Vec<usize>,
    attribute_names: Vec<String>,
    class_names: Vec<String>,
    /// Instance index in the dataset this one was cut from (identity for loaded data).
    origin: Vec<usize>,
}

impl Dataset {
    /// Builds a dataset from row vectors.
    ///
    /// Checks the structural invariants: rectangular finite matrix, one label
    /// per row, every label below `class_names.len()`. The loader adds the
    /// stricter "two instances, two classes" requirement.
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        attribute_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let n_cols = attribute_names.len();
        if n_cols == 0 {
            return Err(Error::InvalidDataset("no attribute columns".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if class_names.is_empty() {
            return Err(Error::InvalidDataset("no classes".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            if let Some(col) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "non-finite value at row {i}, column {col}"
                )));
            }
            values.extend_from_slice(row);
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidDataset(format!(
                "label {bad} outside [0, {})",
                class_names.len()
            )));
        }
        let n_rows = rows.len();
        Ok(Self {
            values,
            n_rows,
            n_cols,
            labels,
            attribute_names,
            class_names,
            origin: (0..n_rows).collect(),
        })
    }

    pub fn n_instances(&self) -> usize {
        self.n_rows
    }

    pub fn n_attributes(&self) -> usize {
        self.n_cols
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn value(&self, i: usize, a: usize) -> f64 {
        self.values[i * self.n_cols + a]
    }

    pub fn column(&self, a: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[a])
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn origin(&self, i: usize) -> usize {
        self.origin[i]
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows `indices` in the given order. Class ids and names are kept so ids
    /// stay comparable with the parent; `origin` records parent indices.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Dataset {
            values,
            n_rows: indices.len(),
            n_cols: self.n_cols,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            attribute_names: self.attribute_names.clone(),
            class_names: self.class_names.clone(),
            origin: indices.iter().map(|&i| self.origin[i]).collect(),
        }
    }

    /// Replaces column `a` through `f`, leaving everything else unchanged.
    pub fn map_column(&self, a: usize, f: impl Fn(f64) -> f64) -> Dataset {
        let mut out = self.clone();
        for i in 0..self.n_rows {
            out.values[i * self.n_cols + a] = f(self.value(i, a));
        }
        out
    }

    /// SHA-256 over names, labels and the bit patterns of every value.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n_rows as u64).to_le_bytes());
        h.update((self.n_cols as u64).to_le_bytes());
        for name in self.attribute_names.iter().chain(&self.class_names) {
            h.update((name.len() as u64).to_le_bytes());
            h.update(name.as_bytes());
        }
        for v in &self.values {
            h.update(v.to_bits().to_le_bytes());
        }
        for &l in &self.labels {
            h.update((l as u64).to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Distance between two instances, or between a free point and an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Euclidean distance over every attribute.
    Euclidean,
    /// Absolute difference on one attribute column.
    Attribute(usize),
}

impl Metric {
    pub fn between(self, d: &Dataset, i: usize, j: usize) -> f64 {
        match self {
            Metric::Euclidean => euclidean_distance(d, i, j),
            Metric::Attribute(a) => attribute_distance(d, a, i, j),
        }
    }

    pub fn to_point(self, d: &Dataset, x: &[f64], j: usize) -> f64 {
        match self {
            Metric::Euclidean => euclidean(x, d.row(j)),
            Metric::Attribute(a) => (x[a] - d.value(j, a)).abs(),
        }
    }
}

pub fn euclidean_distance(d: &Dataset, i: usize, j: usize) -> f64 {
    euclidean(d.row(i), d.row(j))
}

pub fn attribute_distance(d: &Dataset, a: usize, i: usize, j: usize) -> f64 {
    (d.value(i, a) - d.value(j, a)).abs()
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
pub(crate) fn toy(rows: &[&[f64]], labels: &[usize]) -> Dataset {
    let n_cols = rows[0].len();
    let n_classes = labels.iter().max().unwrap() + 1;
    Dataset::new(
        rows.iter().map(|r| r.to_vec()).collect(),
        labels.to_vec(),
        (0..n_cols).map(|a| format!("a{a}")).collect(),
        (0..n_classes).map(|c| format!("c{c}")).collect(),
    )
    .unwrap()
}
