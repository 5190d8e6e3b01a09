//! Experiment configuration, read from TOML.
//!
//! ```toml
//! [experiment]
//! output_dir = "results"
//! seed = 42
//!
//! [cv]
//! folds = 5
//! runs = 30
//!
//! [[dataset]]
//! id = "zoo"
//! path = "../data/zoo.csv"
//! n_select = 10
//!
//! [[algorithm]]
//! id = "OBLKNN-CW"
//! k = 3
//! scheme = "classwise"
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use oblknn_core::{
    AugmentMode, CvPlan, F1Average, ImputePolicy, MiConfig, OblScheme, PipelineConfig, RngSeed, ScalerKind,
};
use serde::Deserialize;

use crate::dataset::{relative_to, DatasetSpec};
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_scaler")]
    pub scaler: String,
    #[serde(default = "default_impute")]
    pub impute: String,
    #[serde(default = "default_f1")]
    pub f1: String,
    #[serde(default = "default_bins")]
    pub mi_bins: usize,
    /// Also write `pairs/<dataset>_<scheme>.csv` for every scheme in the roster.
    #[serde(default)]
    pub export_pairs: bool,
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}
fn default_scaler() -> String {
    "zscore".into()
}
fn default_impute() -> String {
    "mean".into()
}
fn default_f1() -> String {
    "auto".into()
}
fn default_bins() -> usize {
    MiConfig::default().n_bins
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            output_dir: default_output(),
            seed: 0,
            scaler: default_scaler(),
            impute: default_impute(),
            f1: default_f1(),
            mi_bins: default_bins(),
            export_pairs: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvSection {
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
}

fn default_folds() -> usize {
    5
}
fn default_runs() -> usize {
    30
}

impl Default for CvSection {
    fn default() -> Self {
        Self {
            folds: default_folds(),
            runs: default_runs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub id: String,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub weighted: bool,
    /// `global`, `classwise` or `localized`; absent for the plain classifier.
    #[serde(default)]
    pub scheme: Option<String>,
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub p: Option<usize>,
    #[serde(default = "default_renormalize")]
    pub renormalize: bool,
}

fn default_k() -> usize {
    3
}
fn default_renormalize() -> bool {
    true
}

impl AlgorithmSpec {
    pub fn scheme(&self) -> Result<Option<OblScheme>> {
        self.scheme
            .as_deref()
            .map(|s| OblScheme::parse(s, self.p))
            .transpose()
            .map_err(|e| HarnessError::Config(format!("algorithm {}: {e}", self.id)))
    }

    pub fn mode(&self) -> Result<AugmentMode> {
        self.mode
            .as_deref()
            .map_or(Ok(AugmentMode::Augment), str::parse)
            .map_err(|e| HarnessError::Config(format!("algorithm {}: {e}", self.id)))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub cv: CvSection,
    #[serde(rename = "dataset", default)]
    pub datasets: Vec<DatasetSpec>,
    #[serde(rename = "algorithm", default)]
    pub algorithms: Vec<AlgorithmSpec>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths inside it are taken relative to the file.
    pub fn from_file(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(HarnessError::FileNotFound(path.to_owned()));
        }
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        for ds in &mut cfg.datasets {
            ds.path = relative_to(path, &ds.path);
        }
        cfg.experiment.output_dir = relative_to(path, &cfg.experiment.output_dir);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.datasets.is_empty() {
            return bad("no [[dataset]] entries".into());
        }
        if self.algorithms.is_empty() {
            return bad("no [[algorithm]] entries".into());
        }
        let mut seen = HashSet::new();
        for d in &self.datasets {
            if !seen.insert(&d.id) {
                return bad(format!("duplicate dataset id `{}`", d.id));
            }
        }
        let mut seen = HashSet::new();
        for a in &self.algorithms {
            if !seen.insert(&a.id) {
                return bad(format!("duplicate algorithm id `{}`", a.id));
            }
            if a.k == 0 {
                return bad(format!("algorithm {}: k must be positive", a.id));
            }
            a.scheme()?;
            a.mode()?;
        }
        if self.cv.folds < 2 || self.cv.runs == 0 {
            return bad("cv needs folds >= 2 and runs >= 1".into());
        }
        self.scaler()?;
        self.impute()?;
        self.f1()?;
        if self.experiment.mi_bins == 0 {
            return bad("mi_bins must be positive".into());
        }
        Ok(())
    }

    pub fn plan(&self) -> CvPlan {
        CvPlan {
            n_folds: self.cv.folds,
            n_runs: self.cv.runs,
            seed: RngSeed(self.experiment.seed),
        }
    }

    pub fn scaler(&self) -> Result<ScalerKind> {
        self.experiment.scaler.parse().map_err(|e| HarnessError::Config(format!("{e}")))
    }

    pub fn impute(&self) -> Result<ImputePolicy> {
        self.experiment.impute.parse().map_err(|e| HarnessError::Config(format!("{e}")))
    }

    pub fn f1(&self) -> Result<F1Average> {
        self.experiment.f1.parse().map_err(|e| HarnessError::Config(format!("{e}")))
    }

    /// Pipeline settings for one grid cell.
    pub fn pipeline(&self, dataset: &DatasetSpec, algorithm: &AlgorithmSpec) -> Result<PipelineConfig> {
        Ok(PipelineConfig {
            scaler: self.scaler()?,
            impute: self.impute()?,
            n_select: dataset.n_select,
            mi: MiConfig {
                n_bins: self.experiment.mi_bins,
            },
            scheme: algorithm.scheme()?,
            mode: algorithm.mode()?,
            renormalize_opposites: algorithm.renormalize,
            k: algorithm.k,
            weighted: algorithm.weighted,
            seed: RngSeed(self.experiment.seed),
        })
    }
}
