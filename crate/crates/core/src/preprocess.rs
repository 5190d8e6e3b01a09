//! Missing-value imputation and per-feature scaling with separate fit and
//! apply steps, so held-out rows are always transformed with statistics
//! learned from training rows only.

use std::fmt;
use std::str::FromStr;

use crate::data::{FeatureMatrix, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How missing (non-finite) cells are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImputePolicy {
    #[default]
    FeatureMean,
    FeatureMedian,
    /// Drop incomplete training rows. Held-out rows cannot be dropped and are
    /// filled with the training mean instead.
    DropRow,
}

impl FromStr for ImputePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" | "feature_mean" => Ok(Self::FeatureMean),
            "median" | "feature_median" => Ok(Self::FeatureMedian),
            "drop" | "drop_row" => Ok(Self::DropRow),
            other => Err(Error::Parse(format!("unknown impute policy `{other}`"))),
        }
    }
}

/// Per-feature fill values learned from a reference matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Imputer<T> {
    pub fill: Vec<T>,
}

impl<T: Scalar> Imputer<T> {
    pub fn fit(policy: ImputePolicy, stats_from: &FeatureMatrix<T>) -> Result<Self> {
        let fill = (0..stats_from.n_features())
            .map(|k| {
                let finite: Vec<T> = stats_from
                    .column(k)
                    .into_iter()
                    .filter(|v| v.is_finite())
                    .collect();
                if finite.is_empty() {
                    return Err(Error::AllMissingFeature(k));
                }
                Ok(match policy {
                    ImputePolicy::FeatureMedian => quantile(&finite, 0.5),
                    ImputePolicy::FeatureMean | ImputePolicy::DropRow => mean(&finite),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { fill })
    }

    pub fn apply(&self, x: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        check_width(self.fill.len(), x)?;
        let mut out = x.clone();
        for i in 0..out.n_samples() {
            for (v, &f) in out.row_mut(i).iter_mut().zip(&self.fill) {
                if !v.is_finite() {
                    *v = f;
                }
            }
        }
        Ok(out)
    }
}

/// Fills every non-finite cell of `x`. Statistics come from `stats_from` when
/// given, otherwise from `x` itself. `DropRow` fills like `FeatureMean` here;
/// use [`drop_incomplete_rows`] to remove rows from a labelled dataset.
pub fn impute<T: Scalar>(
    x: &FeatureMatrix<T>,
    policy: ImputePolicy,
    stats_from: Option<&FeatureMatrix<T>>,
) -> Result<FeatureMatrix<T>> {
    Imputer::fit(policy, stats_from.unwrap_or(x))?.apply(x)
}

/// Removes rows holding any non-finite cell, keeping labels aligned.
pub fn drop_incomplete_rows<T: Scalar>(ds: &LabeledDataset<T>) -> LabeledDataset<T> {
    let keep: Vec<usize> = (0..ds.n_samples())
        .filter(|&i| ds.features.row(i).iter().all(|v| v.is_finite()))
        .collect();
    ds.select_rows(&keep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalerKind {
    /// Mean and population standard deviation.
    #[default]
    ZScore,
    /// Minimum and range.
    MinMax,
    /// Median and interquartile range.
    Robust,
}

impl ScalerKind {
    pub fn name(self) -> &'static str {
        match self {
            ScalerKind::ZScore => "zscore",
            ScalerKind::MinMax => "minmax",
            ScalerKind::Robust => "robust",
        }
    }
}

impl fmt::Display for ScalerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScalerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zscore" | "z-score" | "standard" => Ok(Self::ZScore),
            "minmax" | "min-max" => Ok(Self::MinMax),
            "robust" => Ok(Self::Robust),
            other => Err(Error::Parse(format!("unknown scaler `{other}`"))),
        }
    }
}

/// Fitted per-feature affine map `x -> (x - center) / scale`.
///
/// `scale` is always positive: features with zero spread get scale 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerModel<T> {
    pub kind: ScalerKind,
    pub center: Vec<T>,
    pub scale: Vec<T>,
}

pub fn fit_scaler<T: Scalar>(kind: ScalerKind, x: &FeatureMatrix<T>) -> ScalerModel<T> {
    let mut center = Vec::with_capacity(x.n_features());
    let mut scale = Vec::with_capacity(x.n_features());
    for k in 0..x.n_features() {
        let col = x.column(k);
        let (c, s) = match kind {
            ScalerKind::ZScore => {
                let m = mean(&col);
                (m, population_std(&col, m))
            }
            ScalerKind::MinMax => {
                let lo = col.iter().copied().fold(T::infinity(), T::min);
                let hi = col.iter().copied().fold(T::neg_infinity(), T::max);
                (lo, hi - lo)
            }
            ScalerKind::Robust => {
                let q1 = quantile(&col, 0.25);
                let q3 = quantile(&col, 0.75);
                (quantile(&col, 0.5), q3 - q1)
            }
        };
        center.push(c);
        scale.push(if s > T::zero() && s.is_finite() { s } else { T::one() });
    }
    ScalerModel {
        kind,
        center,
        scale,
    }
}

pub fn apply_scaler<T: Scalar>(m: &ScalerModel<T>, x: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
    check_width(m.center.len(), x)?;
    let mut out = x.clone();
    for i in 0..out.n_samples() {
        for ((v, &c), &s) in out.row_mut(i).iter_mut().zip(&m.center).zip(&m.scale) {
            *v = (*v - c) / s;
        }
    }
    Ok(out)
}

impl<T: Scalar> ScalerModel<T> {
    pub fn n_features(&self) -> usize {
        self.center.len()
    }

    pub fn apply(&self, x: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        apply_scaler(self, x)
    }

    /// Key-value text form:
    ///
    /// ```text
    /// kind = zscore
    /// center = 2,0.5
    /// scale = 0.816496580927726,1
    /// ```
    pub fn to_kv(&self) -> String {
        format!(
            "kind = {}\ncenter = {}\nscale = {}\n",
            self.kind,
            join(&self.center),
            join(&self.scale)
        )
    }
}

impl<T: Scalar> FromStr for ScalerModel<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kind = None;
        let mut center = None;
        let mut scale = None;
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `key = value`, got `{line}`")))?;
            let value = value.trim();
            match key.trim() {
                "kind" => kind = Some(value.parse::<ScalerKind>()?),
                "center" => center = Some(parse_list(value)?),
                "scale" => scale = Some(parse_list(value)?),
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("missing key `{k}`"));
        let center: Vec<T> = center.ok_or_else(|| missing("center"))?;
        let scale: Vec<T> = scale.ok_or_else(|| missing("scale"))?;
        if center.len() != scale.len() {
            return Err(Error::LengthMismatch {
                left: center.len(),
                right: scale.len(),
            });
        }
        Ok(Self {
            kind: kind.ok_or_else(|| missing("kind"))?,
            center,
            scale,
        })
    }
}

fn join<T: Scalar>(values: &[T]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_list<T: Scalar>(s: &str) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| Error::Parse(format!("not a number: `{}`", v.trim())))
        })
        .collect()
}

fn check_width<T: Scalar>(expected: usize, x: &FeatureMatrix<T>) -> Result<()> {
    if x.n_features() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.n_features(),
        });
    }
    Ok(())
}

pub(crate) fn mean<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::of(values.len() as f64)
}

fn population_std<T: Scalar>(values: &[T], mean: T) -> T {
    let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
    (ss / T::of(values.len() as f64)).sqrt()
}

/// Quantile with linear interpolation between order statistics: position
/// `q * (n - 1)` in the sorted sample.
pub fn quantile<T: Scalar>(values: &[T], q: f64) -> T {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("quantile of NaN"));
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = T::of(pos - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}
