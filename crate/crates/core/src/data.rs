//! Shared data carriers: dense sample-by-feature matrices, dense class labels
//! and per-feature bounds.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix, one row per sample and one column per feature.
///
/// Missing cells are carried as NaN until imputation; see [`validate_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    data: Vec<T>,
    n_rows: usize,
    n_cols: usize,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::Shape {
                rows: n_rows,
                cols: n_cols,
                len: data.len(),
            });
        }
        Ok(Self {
            data,
            n_rows,
            n_cols,
        })
    }

    /// Builds a matrix from row vectors. All rows must have the same length.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), n_cols, data)
    }

    /// An empty batch with a fixed feature count.
    pub fn empty(n_cols: usize) -> Self {
        Self {
            data: Vec::new(),
            n_rows: 0,
            n_cols,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.n_cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.n_cols + col] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        // chunks_exact panics on a zero chunk size
        let width = self.n_cols.max(1);
        let take = if self.n_cols == 0 { 0 } else { self.n_rows };
        self.data.chunks_exact(width).take(take)
    }

    pub fn column(&self, k: usize) -> Vec<T> {
        (0..self.n_rows).map(|i| self.get(i, k)).collect()
    }

    /// Applies `f` to every cell, keeping the shape.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            data: self.data.iter().map(|&v| f(v)).collect(),
            n_rows: self.n_rows,
            n_cols: self.n_cols,
        }
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            data,
            n_rows: indices.len(),
            n_cols: self.n_cols,
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if other.n_cols != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: other.n_cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            data,
            n_rows: self.n_rows + other.n_rows,
            n_cols: self.n_cols,
        })
    }

    /// Converts the element type, e.g. `f64` to `f32`.
    pub fn cast<U: Scalar>(&self) -> FeatureMatrix<U> {
        FeatureMatrix {
            data: self.data.iter().map(|v| U::of(v.as_f64())).collect(),
            n_rows: self.n_rows,
            n_cols: self.n_cols,
        }
    }
}

/// Dense class ids `0..C` plus the original label text of each class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl LabelVector {
    /// Wraps already-dense ids. Ids are not checked here; see [`validate_dataset`].
    pub fn new(labels: Vec<usize>, class_names: Vec<String>) -> Self {
        Self {
            labels,
            class_names,
        }
    }

    /// Dense ids with class names `"0"`, `"1"`, ... covering the largest id.
    pub fn from_ids(labels: Vec<usize>) -> Self {
        let n = labels.iter().max().map_or(0, |m| m + 1);
        let class_names = (0..n).map(|c| c.to_string()).collect();
        Self {
            labels,
            class_names,
        }
    }

    /// Re-encodes raw label strings to dense ids.
    ///
    /// Classes are ordered numerically when every label parses as a number,
    /// lexicographically otherwise.
    pub fn encode<S: AsRef<str>>(raw: &[S]) -> Self {
        let names: Vec<&str> = raw.iter().map(|s| s.as_ref()).collect();
        let mut unique: Vec<&str> = names.clone();
        unique.sort_unstable();
        unique.dedup();
        let numeric: Option<Vec<f64>> = unique.iter().map(|s| s.trim().parse().ok()).collect();
        if let Some(values) = numeric {
            let mut order: Vec<usize> = (0..unique.len()).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(unique[a].cmp(unique[b])));
            unique = order.into_iter().map(|i| unique[i]).collect();
        }
        let index: BTreeMap<&str, usize> = unique.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Self {
            labels: names.iter().map(|s| index[s]).collect(),
            class_names: unique.into_iter().map(str::to_owned).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn ids(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn name_of(&self, class: usize) -> &str {
        &self.class_names[class]
    }

    /// Per-class sample counts, indexed by class id.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &c in &self.labels {
            if c < counts.len() {
                counts[c] += 1;
            }
        }
        counts
    }

    /// Same class table, different ids.
    pub fn with_ids(&self, labels: Vec<usize>) -> Self {
        Self {
            labels,
            class_names: self.class_names.clone(),
        }
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        self.with_ids(indices.iter().map(|&i| self.labels[i]).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        self.with_ids(labels)
    }
}

/// Features plus aligned labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T> {
    pub features: FeatureMatrix<T>,
    pub labels: LabelVector,
}

impl<T: Scalar> LabeledDataset<T> {
    pub fn new(features: FeatureMatrix<T>, labels: LabelVector) -> Result<Self> {
        if features.n_samples() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.n_samples(),
                right: labels.len(),
            });
        }
        Ok(Self { features, labels })
    }

    pub fn n_samples(&self) -> usize {
        self.features.n_samples()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_features()
    }

    pub fn n_classes(&self) -> usize {
        self.labels.n_classes()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(indices),
            labels: self.labels.select(indices),
        }
    }

    /// Appends `other` below `self`, keeping rows and labels aligned.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            features: self.features.vstack(&other.features)?,
            labels: self.labels.concat(&other.labels),
        })
    }

    /// Row indices of each class, indexed by class id.
    pub fn class_rows(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n_classes()];
        for (i, &c) in self.labels.ids().iter().enumerate() {
            groups[c].push(i);
        }
        groups
    }
}

/// Per-feature `[lower, upper]` box.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBounds<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> FeatureBounds<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch {
                left: lower.len(),
                right: upper.len(),
            });
        }
        if let Some(k) = (0..lower.len()).find(|&k| lower[k].partial_cmp(&upper[k]).is_none_or(|o| o.is_gt())) {
            return Err(Error::InvalidParameter(format!(
                "lower bound exceeds upper bound at feature {k}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn n_features(&self) -> usize {
        self.lower.len()
    }

    /// Tightest box around the given rows of `x`. `rows` must be non-empty.
    pub(crate) fn of_rows(x: &FeatureMatrix<T>, rows: impl IntoIterator<Item = usize>) -> Self {
        let mut rows = rows.into_iter();
        let first = rows.next().expect("bounds over an empty row set");
        let mut lower = x.row(first).to_vec();
        let mut upper = lower.clone();
        for i in rows {
            for (k, &v) in x.row(i).iter().enumerate() {
                if v < lower[k] {
                    lower[k] = v;
                }
                if v > upper[k] {
                    upper[k] = v;
                }
            }
        }
        Self { lower, upper }
    }

    pub fn contains(&self, row: &[T]) -> bool {
        row.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }
}

/// Seed for every stochastic step: fold shuffles and random opposition draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream `stream` of the same seed.
    pub fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(stream);
        rng
    }
}

impl fmt::Display for RngSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A broken dataset invariant, with the offending location when there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoSamples,
    NoFeatures,
    NonFinite { row: usize, col: usize },
    Alignment { rows: usize, labels: usize },
    ClassOutOfRange { row: usize, class: usize, n_classes: usize },
    MissingClass { class: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSamples => write!(f, "dataset has no samples"),
            Violation::NoFeatures => write!(f, "dataset has no features"),
            Violation::NonFinite { row, col } => {
                write!(f, "non-finite value at row {row}, column {col}")
            }
            Violation::Alignment { rows, labels } => {
                write!(f, "{rows} feature rows but {labels} labels")
            }
            Violation::ClassOutOfRange {
                row,
                class,
                n_classes,
            } => write!(f, "row {row} has class id {class} but only {n_classes} classes exist"),
            Violation::MissingClass { class } => write!(f, "class {class} has no samples"),
        }
    }
}

/// Lists every broken invariant of `ds`; empty means the dataset is well formed.
pub fn validate_dataset<T: Scalar>(ds: &LabeledDataset<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let x = &ds.features;
    if x.n_samples() == 0 {
        out.push(Violation::NoSamples);
    }
    if x.n_features() == 0 {
        out.push(Violation::NoFeatures);
    }
    for (i, row) in x.rows().enumerate() {
        for (k, v) in row.iter().enumerate() {
            if !v.is_finite() {
                out.push(Violation::NonFinite { row: i, col: k });
            }
        }
    }
    if ds.labels.len() != x.n_samples() {
        out.push(Violation::Alignment {
            rows: x.n_samples(),
            labels: ds.labels.len(),
        });
    }
    let n_classes = ds.labels.n_classes();
    let mut seen = vec![false; n_classes];
    for (i, &c) in ds.labels.ids().iter().enumerate() {
        if c >= n_classes {
            out.push(Violation::ClassOutOfRange {
                row: i,
                class: c,
                n_classes,
            });
        } else {
            seen[c] = true;
        }
    }
    for (class, present) in seen.into_iter().enumerate() {
        if !present {
            out.push(Violation::MissingClass { class });
        }
    }
    out
}
