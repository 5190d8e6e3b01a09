//! Train/test transaction: impute, scale, select features, add opposites,
//! re-standardize the opposites and fit the classifier, all from training
//! rows. Held-out rows only ever see the fitted training transforms and are
//! never opposed.

use crate::data::{FeatureMatrix, LabelVector, LabeledDataset, RngSeed};
use crate::error::{Error, Result};
use crate::knn::KnnModel;
use crate::opposition::{oppose, AugmentMode, OblScheme};
use crate::preprocess::{
    apply_scaler, drop_incomplete_rows, fit_scaler, ImputePolicy, Imputer, ScalerKind, ScalerModel,
};
use crate::scalar::Scalar;
use crate::select::{project, select_top_k, MiConfig, SelectionResult};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub scaler: ScalerKind,
    pub impute: ImputePolicy,
    /// Keep this many features by mutual information; `None` keeps all.
    pub n_select: Option<usize>,
    pub mi: MiConfig,
    /// `None` is the plain classifier baseline.
    pub scheme: Option<OblScheme>,
    pub mode: AugmentMode,
    pub renormalize_opposites: bool,
    pub k: usize,
    pub weighted: bool,
    pub seed: RngSeed,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            scaler: ScalerKind::ZScore,
            impute: ImputePolicy::FeatureMean,
            n_select: None,
            mi: MiConfig::default(),
            scheme: None,
            mode: AugmentMode::Augment,
            renormalize_opposites: true,
            k: 3,
            weighted: false,
            seed: RngSeed::default(),
        }
    }
}

/// Everything learned from a training set, in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedPipeline<T> {
    pub n_raw_features: usize,
    pub imputer: Imputer<T>,
    pub scaler: ScalerModel<T>,
    pub selection: Option<SelectionResult>,
    pub opposite_scaler: Option<ScalerModel<T>>,
    pub model: KnnModel<T>,
}

pub fn fit_pipeline<T: Scalar>(train: &LabeledDataset<T>, cfg: &PipelineConfig) -> Result<FittedPipeline<T>> {
    let n_raw = train.n_features();
    if let Some(n) = cfg.n_select {
        if n == 0 || n > n_raw {
            return Err(Error::KOutOfRange { k: n, max: n_raw });
        }
    }

    let imputer = Imputer::fit(cfg.impute, &train.features)?;
    let clean = if cfg.impute == ImputePolicy::DropRow {
        drop_incomplete_rows(train)
    } else {
        LabeledDataset {
            features: imputer.apply(&train.features)?,
            labels: train.labels.clone(),
        }
    };
    if clean.n_samples() == 0 {
        return Err(Error::Empty);
    }

    let scaler = fit_scaler(cfg.scaler, &clean.features);
    let mut x = apply_scaler(&scaler, &clean.features)?;

    let selection = match cfg.n_select {
        Some(n) => {
            let sel = select_top_k(&x, &clean.labels, n, &cfg.mi)?;
            x = project(&x, &sel)?;
            Some(sel)
        }
        None => None,
    };
    let original = LabeledDataset {
        features: x,
        labels: clean.labels,
    };

    let (training, opposite_scaler) = match cfg.scheme {
        None => (original, None),
        Some(scheme) => {
            let mut opposites = oppose(&original, scheme)?;
            let opposite_scaler = if cfg.renormalize_opposites {
                let s = fit_scaler(ScalerKind::ZScore, &opposites.features);
                opposites.features = apply_scaler(&s, &opposites.features)?;
                Some(s)
            } else {
                None
            };
            let set = match cfg.mode {
                AugmentMode::Augment => original.concat(&opposites)?,
                AugmentMode::Replace => opposites,
            };
            (set, opposite_scaler)
        }
    };

    Ok(FittedPipeline {
        n_raw_features: n_raw,
        imputer,
        scaler,
        selection,
        opposite_scaler,
        model: KnnModel::fit(training, cfg.k, cfg.weighted)?,
    })
}

impl<T: Scalar> FittedPipeline<T> {
    /// Applies the training transforms to raw rows (no opposition).
    pub fn transform(&self, x: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        if x.n_features() != self.n_raw_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_raw_features,
                found: x.n_features(),
            });
        }
        let x = apply_scaler(&self.scaler, &self.imputer.apply(x)?)?;
        match &self.selection {
            Some(sel) => project(&x, sel),
            None => Ok(x),
        }
    }

    pub fn predict(&self, x: &FeatureMatrix<T>) -> Result<LabelVector> {
        self.model.predict(&self.transform(x)?)
    }
}

pub fn predict_pipeline<T: Scalar>(fp: &FittedPipeline<T>, test_x: &FeatureMatrix<T>) -> Result<LabelVector> {
    fp.predict(test_x)
}
