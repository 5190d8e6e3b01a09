//! Opposition transforms.
//!
//! The reflection `x* = a + b - x` maps a point to its mirror image inside the
//! per-feature box `[a, b]`. Three ways of choosing the box are provided for
//! labelled data:
//!
//! * [`oppose_global`]: one box spanning the whole training set,
//! * [`oppose_classwise`]: one box per class,
//! * [`oppose_localized`]: one box per sample, spanning the sample and its
//!   `p` nearest neighbours of the same class.
//!
//! [`oppose_variant`] holds the generic population kernels (generalized,
//! quasi, centroid, current-optimum, dynamic, beta and reflection opposition)
//! that operate on unlabelled point sets.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta, Distribution, Normal};

use crate::data::{FeatureBounds, FeatureMatrix, LabeledDataset, RngSeed};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which box each opposite is reflected in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OblScheme {
    Global,
    ClassWise,
    /// Box over the sample and its `p` nearest same-class neighbours.
    Localized { p: usize },
}

impl OblScheme {
    pub fn name(self) -> &'static str {
        match self {
            OblScheme::Global => "global",
            OblScheme::ClassWise => "classwise",
            OblScheme::Localized { .. } => "localized",
        }
    }

    pub fn neighbors(self) -> Option<usize> {
        match self {
            OblScheme::Localized { p } => Some(p),
            _ => None,
        }
    }

    /// Parses `global`, `classwise` or `localized`; `p` is required for the latter.
    pub fn parse(name: &str, p: Option<usize>) -> Result<Self> {
        match name.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "global" => Ok(Self::Global),
            "classwise" | "cw" => Ok(Self::ClassWise),
            "localized" | "localizedclasswise" | "local" => match p {
                Some(p) if p >= 1 => Ok(Self::Localized { p }),
                _ => Err(Error::InvalidParameter(
                    "localized opposition needs p >= 1".into(),
                )),
            },
            other => Err(Error::Parse(format!("unknown opposition scheme `{other}`"))),
        }
    }
}

impl fmt::Display for OblScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OblScheme::Localized { p } => write!(f, "localized(p={p})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Whether opposites are added to the originals or used instead of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AugmentMode {
    #[default]
    Augment,
    Replace,
}

impl AugmentMode {
    pub fn name(self) -> &'static str {
        match self {
            AugmentMode::Augment => "augment",
            AugmentMode::Replace => "replace",
        }
    }
}

impl fmt::Display for AugmentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AugmentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "augment" | "enrich" => Ok(Self::Augment),
            "replace" => Ok(Self::Replace),
            other => Err(Error::Parse(format!("unknown augment mode `{other}`"))),
        }
    }
}

/// Per-feature minimum and maximum over all rows.
pub fn compute_bounds<T: Scalar>(x: &FeatureMatrix<T>) -> Result<FeatureBounds<T>> {
    if x.n_samples() == 0 {
        return Err(Error::Empty);
    }
    Ok(FeatureBounds::of_rows(x, 0..x.n_samples()))
}

#[inline]
fn reflect_row<T: Scalar>(row: &[T], lower: &[T], upper: &[T], out: &mut [T]) {
    for k in 0..row.len() {
        out[k] = lower[k] + upper[k] - row[k];
    }
}

/// Reflects every row in one shared box.
pub fn oppose_global<T: Scalar>(
    x: &FeatureMatrix<T>,
    bounds: &FeatureBounds<T>,
) -> Result<FeatureMatrix<T>> {
    if bounds.n_features() != x.n_features() {
        return Err(Error::DimensionMismatch {
            expected: x.n_features(),
            found: bounds.n_features(),
        });
    }
    let mut out = x.clone();
    for i in 0..x.n_samples() {
        reflect_row(x.row(i), &bounds.lower, &bounds.upper, out.row_mut(i));
    }
    Ok(out)
}

/// Reflects each row in the bounding box of its own class. Row order and
/// labels are unchanged.
pub fn oppose_classwise<T: Scalar>(ds: &LabeledDataset<T>) -> LabeledDataset<T> {
    let x = &ds.features;
    let mut out = x.clone();
    for rows in ds.class_rows().into_iter().filter(|r| !r.is_empty()) {
        let b = FeatureBounds::of_rows(x, rows.iter().copied());
        for &i in &rows {
            reflect_row(x.row(i), &b.lower, &b.upper, out.row_mut(i));
        }
    }
    LabeledDataset {
        features: out,
        labels: ds.labels.clone(),
    }
}

fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&u, &v)| (u - v) * (u - v)).sum()
}

/// Row indices that define the local box of sample `i`: `i` itself plus its
/// `p` nearest rows among `class_rows` (ties to the lower row index), or the
/// whole class when it has at most `p` other members.
pub fn local_support<T: Scalar>(
    x: &FeatureMatrix<T>,
    class_rows: &[usize],
    i: usize,
    p: usize,
) -> Vec<usize> {
    if class_rows.len() <= p + 1 {
        return class_rows.to_vec();
    }
    let q = x.row(i);
    let mut others: Vec<(T, usize)> = class_rows
        .iter()
        .filter(|&&j| j != i)
        .map(|&j| (squared_distance(q, x.row(j)), j))
        .collect();
    let by_distance = |a: &(T, usize), b: &(T, usize)| {
        a.0.partial_cmp(&b.0)
            .expect("finite distances")
            .then(a.1.cmp(&b.1))
    };
    others.select_nth_unstable_by(p - 1, by_distance);
    let mut support: Vec<usize> = others[..p].iter().map(|&(_, j)| j).collect();
    support.push(i);
    support
}

/// Reflects each row in the box spanned by itself and its `p` nearest
/// same-class neighbours (Euclidean).
pub fn oppose_localized<T: Scalar>(ds: &LabeledDataset<T>, p: usize) -> Result<LabeledDataset<T>> {
    if p == 0 {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    let x = &ds.features;
    let mut out = x.clone();
    for rows in ds.class_rows() {
        for &i in &rows {
            let b = FeatureBounds::of_rows(x, local_support(x, &rows, i, p));
            reflect_row(x.row(i), &b.lower, &b.upper, out.row_mut(i));
        }
    }
    Ok(LabeledDataset {
        features: out,
        labels: ds.labels.clone(),
    })
}

/// Dispatches on `scheme`. Global opposition uses the bounds of `ds` itself.
pub fn oppose<T: Scalar>(ds: &LabeledDataset<T>, scheme: OblScheme) -> Result<LabeledDataset<T>> {
    match scheme {
        OblScheme::Global => {
            let bounds = compute_bounds(&ds.features)?;
            Ok(LabeledDataset {
                features: oppose_global(&ds.features, &bounds)?,
                labels: ds.labels.clone(),
            })
        }
        OblScheme::ClassWise => Ok(oppose_classwise(ds)),
        OblScheme::Localized { p } => oppose_localized(ds, p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantKind {
    /// `k (a + b) - x`
    Generalized,
    /// Uniform draw between the box centre and the opposite.
    Quasi,
    /// `2 c - x` with `c` the population centroid.
    Centroid,
    /// `2 x* - x` with `x*` the pivot.
    CurrentOptimum,
    /// `x + eta ((a + b - x) - x)`
    Dynamic,
    /// `x* + beta (a + b - 2 x*)`, `beta ~ Beta(beta_a, beta_b)`.
    BetaCurrentOptimum,
    /// `2 x* - x + delta`, `delta ~ N(0, delta_sigma^2)`.
    Reflection,
}

impl FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "gobl" | "generalized" => Ok(Self::Generalized),
            "qobl" | "quasi" => Ok(Self::Quasi),
            "cobl" | "centroid" => Ok(Self::Centroid),
            "coobl" | "currentoptimum" => Ok(Self::CurrentOptimum),
            "dobl" | "dynamic" => Ok(Self::Dynamic),
            "betacoobl" | "beta" => Ok(Self::BetaCurrentOptimum),
            "robl" | "reflection" => Ok(Self::Reflection),
            other => Err(Error::Parse(format!("unknown opposition variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantParams<T> {
    pub kind: VariantKind,
    /// Fixed scaling factor; when `None` a uniform `[0, 1)` factor is drawn per row.
    pub k_scale: Option<T>,
    pub eta: T,
    pub beta_a: f64,
    pub beta_b: f64,
    pub delta_sigma: f64,
    pub pivot: Option<Vec<T>>,
}

impl<T: Scalar> VariantParams<T> {
    pub fn new(kind: VariantKind) -> Self {
        Self {
            kind,
            k_scale: None,
            eta: T::one(),
            beta_a: 2.0,
            beta_b: 2.0,
            delta_sigma: 0.01,
            pivot: None,
        }
    }

    pub fn with_pivot(mut self, pivot: Vec<T>) -> Self {
        self.pivot = Some(pivot);
        self
    }
}

/// Applies one of the generic opposition kernels to every row of `points`.
/// Random draws come from `seed` only, in row-major order.
pub fn oppose_variant<T: Scalar>(
    points: &FeatureMatrix<T>,
    bounds: Option<&FeatureBounds<T>>,
    params: &VariantParams<T>,
    seed: RngSeed,
) -> Result<FeatureMatrix<T>> {
    use VariantKind::*;
    let d = points.n_features();
    let needs_pivot = matches!(params.kind, CurrentOptimum | BetaCurrentOptimum | Reflection);
    let needs_bounds = matches!(params.kind, Generalized | Quasi | Dynamic | BetaCurrentOptimum);
    let pivot = match (&params.pivot, needs_pivot) {
        (None, true) => return Err(Error::MissingPivot),
        (Some(p), true) if p.len() != d => {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.len(),
            })
        }
        (p, _) => p.as_deref(),
    };
    let bounds = match (bounds, needs_bounds) {
        (None, true) => return Err(Error::MissingBounds),
        (Some(b), true) if b.n_features() != d => {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: b.n_features(),
            })
        }
        (b, _) => b,
    };
    if !(params.beta_a > 0.0 && params.beta_b > 0.0) {
        return Err(Error::InvalidParameter("beta shape parameters must be positive".into()));
    }
    let beta = Beta::new(params.beta_a, params.beta_b)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let noise = Normal::new(0.0, params.delta_sigma)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;

    let centroid: Vec<T> = if params.kind == Centroid {
        if points.n_samples() == 0 {
            return Err(Error::Empty);
        }
        let n = T::of(points.n_samples() as f64);
        (0..d).map(|k| points.column(k).into_iter().sum::<T>() / n).collect()
    } else {
        Vec::new()
    };

    let mut rng = seed.rng();
    let two = T::of(2.0);
    let mut out = points.clone();
    for i in 0..points.n_samples() {
        let x = points.row(i);
        let k_row = match params.kind {
            Generalized => Some(params.k_scale.unwrap_or_else(|| T::of(rng.random::<f64>()))),
            _ => None,
        };
        for (j, slot) in out.row_mut(i).iter_mut().enumerate() {
            let xi = x[j];
            let span = || {
                let b = bounds.expect("checked above");
                b.lower[j] + b.upper[j]
            };
            *slot = match params.kind {
                Generalized => k_row.expect("drawn per row") * span() - xi,
                Quasi => {
                    let centre = span() / two;
                    let opposite = span() - xi;
                    let u = T::of(rng.random::<f64>());
                    centre + (opposite - centre) * u
                }
                Centroid => two * centroid[j] - xi,
                CurrentOptimum => two * pivot.expect("checked above")[j] - xi,
                Dynamic => xi + params.eta * ((span() - xi) - xi),
                BetaCurrentOptimum => {
                    let p = pivot.expect("checked above")[j];
                    p + T::of(beta.sample(&mut rng)) * (span() - two * p)
                }
                Reflection => {
                    two * pivot.expect("checked above")[j] - xi + T::of(noise.sample(&mut rng))
                }
            };
        }
    }
    Ok(out)
}
