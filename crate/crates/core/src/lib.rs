//! Opposition-based data augmentation for k-nearest-neighbour classifiers.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases at the
//! crate root fix the scalar for the common cases.

pub mod data;
pub mod error;
pub mod evaluation;
pub mod knn;
pub mod opposition;
pub mod pipeline;
pub mod preprocess;
pub mod rankstats;
pub mod scalar;
pub mod select;

pub use data::{validate_dataset, FeatureBounds, FeatureMatrix, LabelVector, LabeledDataset, RngSeed, Violation};
pub use error::{Error, Result};
pub use evaluation::{
    accuracy, cross_validate, f1_score, stratified_folds, CvPlan, EvalReport, F1Average, FoldAssignment,
};
pub use knn::KnnModel;
pub use opposition::{
    compute_bounds, oppose, oppose_classwise, oppose_global, oppose_localized, oppose_variant, AugmentMode,
    OblScheme, VariantKind, VariantParams,
};
pub use pipeline::{fit_pipeline, predict_pipeline, FittedPipeline, PipelineConfig};
pub use preprocess::{apply_scaler, fit_scaler, impute, ImputePolicy, Imputer, ScalerKind, ScalerModel};
pub use rankstats::{friedman, rank_row, FriedmanResult, ScoreMatrix};
pub use scalar::Scalar;
pub use select::{mutual_information, project, select_top_k, MiConfig, SelectionResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Matrix = FeatureMatrix<f64>;
pub type Dataset = LabeledDataset<f64>;
pub type Bounds = FeatureBounds<f64>;
pub type Pipeline = FittedPipeline<f64>;
pub type Knn = KnnModel<f64>;

pub type Matrix32 = FeatureMatrix<f32>;
pub type Dataset32 = LabeledDataset<f32>;
pub type Bounds32 = FeatureBounds<f32>;
pub type Pipeline32 = FittedPipeline<f32>;
pub type Knn32 = KnnModel<f32>;
