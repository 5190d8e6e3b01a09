//! Brute-force k-nearest-neighbour classification, plain majority vote or
//! inverse-distance weighted.
//!
//! Tie rules, in order:
//!
//! 1. candidates at equal distance from the query are ordered by training row
//!    index, so the k-th slot goes to the lower index;
//! 2. unweighted: equal vote counts are settled by the smaller summed
//!    neighbour distance, then by the lower class id;
//! 3. weighted: each neighbour adds `1 / (d + 1e-10)`; if any neighbour sits
//!    at distance zero only the zero-distance neighbours vote, by majority;
//!    equal scores fall back to rule 2.

use std::cmp::Ordering;

use crate::data::{FeatureMatrix, LabelVector, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const WEIGHT_EPSILON: f64 = 1e-10;

/// Fitted (lazy) classifier: the training set plus `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel<T> {
    train: LabeledDataset<T>,
    k: usize,
    weighted: bool,
}

pub fn fit<T: Scalar>(train: &LabeledDataset<T>, k: usize, weighted: bool) -> Result<KnnModel<T>> {
    KnnModel::fit(train.clone(), k, weighted)
}

impl<T: Scalar> KnnModel<T> {
    pub fn fit(train: LabeledDataset<T>, k: usize, weighted: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if k > train.n_samples() {
            return Err(Error::KTooLarge {
                k,
                n: train.n_samples(),
            });
        }
        Ok(Self { train, k, weighted })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weighted(&self) -> bool {
        self.weighted
    }

    pub fn training_set(&self) -> &LabeledDataset<T> {
        &self.train
    }

    pub fn n_train(&self) -> usize {
        self.train.n_samples()
    }

    /// The `k` nearest training rows as `(distance, row)`, nearest first.
    pub fn neighbors(&self, q: &[T]) -> Result<Vec<(T, usize)>> {
        let d = self.train.n_features();
        if q.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: q.len(),
            });
        }
        let mut all: Vec<(T, usize)> = self
            .train
            .features
            .rows()
            .enumerate()
            .map(|(i, row)| {
                let ss: T = row.iter().zip(q).map(|(&a, &b)| (a - b) * (a - b)).sum();
                (ss, i)
            })
            .collect();
        let order = |a: &(T, usize), b: &(T, usize)| {
            a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
        };
        if self.k < all.len() {
            all.select_nth_unstable_by(self.k - 1, order);
            all.truncate(self.k);
        }
        all.sort_by(order);
        Ok(all.into_iter().map(|(ss, i)| (ss.sqrt(), i)).collect())
    }

    pub fn predict_one(&self, q: &[T]) -> Result<usize> {
        let neighbors = self.neighbors(q)?;
        let labels = self.train.labels.ids();
        let n_classes = self.train.n_classes();
        let mut votes = vec![0usize; n_classes];
        let mut dist_sum = vec![T::zero(); n_classes];
        let zero_dist = neighbors.iter().any(|&(d, _)| d == T::zero());

        if self.weighted && !zero_dist {
            let eps = T::of(WEIGHT_EPSILON);
            let mut score = vec![T::zero(); n_classes];
            for &(d, i) in &neighbors {
                let c = labels[i];
                score[c] += T::one() / (d + eps);
                votes[c] += 1;
                dist_sum[c] += d;
            }
            return Ok(best_class(&votes, |a, b| {
                score[a]
                    .partial_cmp(&score[b])
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| dist_sum[b].partial_cmp(&dist_sum[a]).unwrap_or(Ordering::Equal))
            }));
        }

        for &(d, i) in &neighbors {
            if self.weighted && d != T::zero() {
                continue;
            }
            votes[labels[i]] += 1;
            dist_sum[labels[i]] += d;
        }
        Ok(best_class(&votes, |a, b| {
            votes[a]
                .cmp(&votes[b])
                .then_with(|| dist_sum[b].partial_cmp(&dist_sum[a]).unwrap_or(Ordering::Equal))
        }))
    }

    pub fn predict(&self, x: &FeatureMatrix<T>) -> Result<LabelVector> {
        if x.n_features() != self.train.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.train.n_features(),
                found: x.n_features(),
            });
        }
        let ids = x.rows().map(|q| self.predict_one(q)).collect::<Result<Vec<_>>>()?;
        Ok(self.train.labels.with_ids(ids))
    }
}

/// Class with at least one vote that is greatest under `better`; exact ties go
/// to the lower class id.
fn best_class(votes: &[usize], better: impl Fn(usize, usize) -> Ordering) -> usize {
    let mut best: Option<usize> = None;
    for c in (0..votes.len()).filter(|&c| votes[c] > 0) {
        best = match best {
            Some(b) if better(c, b) != Ordering::Greater => Some(b),
            _ => Some(c),
        };
    }
    best.expect("at least one neighbour votes")
}

pub fn predict_one<T: Scalar>(m: &KnnModel<T>, q: &[T]) -> Result<usize> {
    m.predict_one(q)
}

pub fn predict<T: Scalar>(m: &KnnModel<T>, x: &FeatureMatrix<T>) -> Result<LabelVector> {
    m.predict(x)
}
