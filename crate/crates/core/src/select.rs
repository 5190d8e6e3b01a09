//! Filter feature selection ranked by histogram mutual information with the
//! class label.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::data::{FeatureMatrix, LabelVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiConfig {
    /// Equal-width bins spanning the feature's observed range.
    pub n_bins: usize,
}

impl Default for MiConfig {
    fn default() -> Self {
        Self { n_bins: 10 }
    }
}

/// Selected feature indices (best first) and the score of every feature.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub selected: Vec<usize>,
    /// Mutual information in nats, indexed by original feature.
    pub scores: Vec<f64>,
}

impl SelectionResult {
    /// Writes `feature_index,mi_score` rows in selection order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "feature_index,mi_score")?;
        for &k in &self.selected {
            writeln!(out, "{},{}", k, self.scores[k])?;
        }
        Ok(())
    }
}

/// Equal-width bin of every value. A constant feature maps to a single bin.
fn bin_indices<T: Scalar>(feature: &[T], n_bins: usize) -> Vec<usize> {
    let lo = feature.iter().copied().fold(T::infinity(), T::min);
    let hi = feature.iter().copied().fold(T::neg_infinity(), T::max);
    let width = hi - lo;
    if !width.is_finite() || width <= T::zero() {
        return vec![0; feature.len()];
    }
    let bins = T::of(n_bins as f64);
    feature
        .iter()
        .map(|&v| {
            let b = ((v - lo) / width * bins).floor().to_usize().unwrap_or(0);
            b.min(n_bins - 1)
        })
        .collect()
}

/// Mutual information (nats) between the binned feature and the labels.
pub fn mutual_information<T: Scalar>(
    feature: &[T],
    labels: &LabelVector,
    cfg: &MiConfig,
) -> Result<f64> {
    if feature.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: feature.len(),
            right: labels.len(),
        });
    }
    if cfg.n_bins < 2 {
        return Err(Error::InvalidParameter("n_bins must be at least 2".into()));
    }
    let n = feature.len();
    if n == 0 {
        return Ok(0.0);
    }
    let n_classes = labels.n_classes();
    let bins = bin_indices(feature, cfg.n_bins);
    let mut joint = vec![0usize; cfg.n_bins * n_classes];
    let mut bin_count = vec![0usize; cfg.n_bins];
    let mut class_count = vec![0usize; n_classes];
    for (&b, &c) in bins.iter().zip(labels.ids()) {
        joint[b * n_classes + c] += 1;
        bin_count[b] += 1;
        class_count[c] += 1;
    }
    let n = n as f64;
    let mut mi = 0.0;
    for b in 0..cfg.n_bins {
        for c in 0..n_classes {
            let nbc = joint[b * n_classes + c];
            if nbc == 0 {
                continue;
            }
            let nbc = nbc as f64;
            // p(b,c) ln(p(b,c) / (p(b) p(c))) with counts
            mi += nbc / n * (nbc * n / (bin_count[b] as f64 * class_count[c] as f64)).ln();
        }
    }
    Ok(mi)
}

/// Keeps the `k` features with the highest mutual information. Ties go to the
/// lower feature index.
pub fn select_top_k<T: Scalar>(
    x: &FeatureMatrix<T>,
    labels: &LabelVector,
    k: usize,
    cfg: &MiConfig,
) -> Result<SelectionResult> {
    if k == 0 || k > x.n_features() {
        return Err(Error::KOutOfRange {
            k,
            max: x.n_features(),
        });
    }
    let scores = (0..x.n_features())
        .into_par_iter()
        .map(|j| mutual_information(&x.column(j), labels, cfg))
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    Ok(SelectionResult {
        selected: order,
        scores,
    })
}

/// Column subset of `x` in the order of `sel.selected`.
pub fn project<T: Scalar>(x: &FeatureMatrix<T>, sel: &SelectionResult) -> Result<FeatureMatrix<T>> {
    if let Some(&bad) = sel.selected.iter().find(|&&j| j >= x.n_features()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: x.n_features(),
        });
    }
    let mut data = Vec::with_capacity(x.n_samples() * sel.selected.len());
    for row in x.rows() {
        data.extend(sel.selected.iter().map(|&j| row[j]));
    }
    FeatureMatrix::new(x.n_samples(), sel.selected.len(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Contingency-table MI computed from probabilities, independent of the
    /// count-based accumulation above.
    fn oracle_mi(bins: &[usize], labels: &[usize]) -> f64 {
        let n = bins.len() as f64;
        let nb = bins.iter().max().unwrap() + 1;
        let nc = labels.iter().max().unwrap() + 1;
        let mut p = vec![vec![0.0; nc]; nb];
        for (&b, &c) in bins.iter().zip(labels) {
            p[b][c] += 1.0 / n;
        }
        let pb: Vec<f64> = p.iter().map(|r| r.iter().sum()).collect();
        let pc: Vec<f64> = (0..nc).map(|c| p.iter().map(|r| r[c]).sum()).collect();
        let mut mi = 0.0;
        for b in 0..nb {
            for c in 0..nc {
                if p[b][c] > 0.0 {
                    mi += p[b][c] * (p[b][c] / (pb[b] * pc[c])).ln();
                }
            }
        }
        mi
    }

    #[test]
    fn label_copy_feature_carries_the_label_entropy() {
        let ids: Vec<usize> = (0..100).map(|i| i % 2).collect();
        let feature: Vec<f64> = ids.iter().map(|&c| c as f64).collect();
        let labels = LabelVector::from_ids(ids);
        let mi = mutual_information(&feature, &labels, &MiConfig::default()).unwrap();
        assert!((mi - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn constant_feature_has_zero_information() {
        let labels = LabelVector::from_ids(vec![0, 1, 0, 1, 1]);
        let mi = mutual_information(&[3.0; 5], &labels, &MiConfig::default()).unwrap();
        assert_eq!(mi, 0.0);
    }

    #[test]
    fn independent_uniform_feature_has_small_information() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let feature: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let labels = LabelVector::from_ids((0..n).map(|_| rng.random_range(0..2)).collect());
        let mi = mutual_information(&feature, &labels, &MiConfig::default()).unwrap();
        let bins = bin_indices(&feature, 10);
        let oracle = oracle_mi(&bins, labels.ids());
        assert!((mi - oracle).abs() < 1e-12);
        // small-sample bias is about (bins-1)(classes-1)/(2n) = 4.5e-4
        assert!(mi < 0.02, "mi = {mi}");
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let labels = LabelVector::from_ids(vec![0, 1]);
        assert!(matches!(
            mutual_information(&[1.0], &labels, &MiConfig::default()),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn selects_the_label_copy_among_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200;
        let ids: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let mut data = Vec::new();
        for &c in &ids {
            for j in 0..10 {
                data.push(if j == 6 { c as f64 } else { rng.random::<f64>() });
            }
        }
        let x = FeatureMatrix::new(n, 10, data).unwrap();
        let labels = LabelVector::from_ids(ids);
        let sel = select_top_k(&x, &labels, 1, &MiConfig::default()).unwrap();
        assert_eq!(sel.selected, vec![6]);
        assert_eq!(sel.scores.len(), 10);

        let all = select_top_k(&x, &labels, 10, &MiConfig::default()).unwrap();
        let mut sorted = all.selected.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
        assert!(all.selected.windows(2).all(|w| all.scores[w[0]] >= all.scores[w[1]]));
    }

    #[test]
    fn ties_go_to_the_lower_index() {
        let x = FeatureMatrix::from_rows(&[[0.0, 0.0, 5.0], [1.0, 1.0, 5.0], [0.0, 0.0, 5.0]]).unwrap();
        let labels = LabelVector::from_ids(vec![0, 1, 0]);
        let sel = select_top_k(&x, &labels, 1, &MiConfig::default()).unwrap();
        assert_eq!(sel.selected, vec![0]);
    }

    #[test]
    fn k_must_be_in_range() {
        let x = FeatureMatrix::from_rows(&[[0.0, 1.0]]).unwrap();
        let labels = LabelVector::from_ids(vec![0]);
        for k in [0, 3] {
            assert!(matches!(
                select_top_k(&x, &labels, k, &MiConfig::default()),
                Err(Error::KOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn project_picks_columns_in_order() {
        let x = FeatureMatrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let sel = |s: Vec<usize>| SelectionResult {
            selected: s,
            scores: vec![0.0; 3],
        };
        assert_eq!(
            project(&x, &sel(vec![2, 0])).unwrap(),
            FeatureMatrix::from_rows(&[[3.0, 1.0], [6.0, 4.0]]).unwrap()
        );
        assert_eq!(project(&x, &sel(vec![0, 1, 2])).unwrap(), x);
        assert_eq!(
            project(&x, &sel(vec![5])),
            Err(Error::IndexOutOfRange { index: 5, len: 3 })
        );
    }

    #[test]
    fn csv_export_lists_selected_features() {
        let sel = SelectionResult {
            selected: vec![1, 0],
            scores: vec![0.25, 0.5],
        };
        let mut buf = Vec::new();
        sel.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "feature_index,mi_score\n1,0.5\n0,0.25\n");
    }

    proptest! {
        #[test]
        fn relabeling_classes_keeps_scores(
            data in proptest::collection::vec((-50i32..50, 0usize..4), 5..120),
            perm in Just([2usize, 0, 3, 1]).prop_shuffle(),
        ) {
            let feature: Vec<f64> = data.iter().map(|d| d.0 as f64).collect();
            let a = LabelVector::new(data.iter().map(|d| d.1).collect(), vec!["x".into(); 4]);
            let b = a.with_ids(data.iter().map(|d| perm[d.1]).collect());
            let cfg = MiConfig::default();
            let ma = mutual_information(&feature, &a, &cfg).unwrap();
            let mb = mutual_information(&feature, &b, &cfg).unwrap();
            prop_assert!((ma - mb).abs() < 1e-12);
            prop_assert!(ma >= -1e-12);
        }

        #[test]
        fn increasing_affine_maps_keep_scores(
            data in proptest::collection::vec((-50i32..50, 0usize..3), 5..120),
            alpha in prop_oneof![Just(0.5f64), Just(1.0), Just(2.0), Just(4.0)],
            beta in -20i32..20,
        ) {
            // dyadic scale and integer shift keep every operation exact
            let x: Vec<f64> = data.iter().map(|d| d.0 as f64).collect();
            let y: Vec<f64> = x.iter().map(|v| alpha * v + beta as f64).collect();
            let labels = LabelVector::from_ids(data.iter().map(|d| d.1).collect());
            let cfg = MiConfig::default();
            prop_assert_eq!(bin_indices(&x, 10), bin_indices(&y, 10));
            prop_assert_eq!(
                mutual_information(&x, &labels, &cfg).unwrap(),
                mutual_information(&y, &labels, &cfg).unwrap()
            );
        }
    }
}
