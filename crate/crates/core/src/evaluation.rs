//! Repeated stratified k-fold cross-validation and classification metrics.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::data::{LabelVector, LabeledDataset, RngSeed};
use crate::error::{Error, Result};
use crate::pipeline::{fit_pipeline, PipelineConfig};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvPlan {
    pub n_folds: usize,
    pub n_runs: usize,
    pub seed: RngSeed,
}

impl Default for CvPlan {
    fn default() -> Self {
        Self {
            n_folds: 5,
            n_runs: 30,
            seed: RngSeed(0),
        }
    }
}

/// Test fold of every sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub fold_of: Vec<usize>,
    pub n_folds: usize,
}

impl FoldAssignment {
    /// `(train, test)` row indices for `fold`.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.fold_of.len()).partition(|&i| self.fold_of[i] != fold)
    }
}

/// Shuffles each class with the stream of `(plan.seed, run_index)` and deals
/// it round-robin into folds. The dealing position carries over from one
/// class to the next, so fold sizes stay balanced overall as well.
pub fn stratified_folds(labels: &LabelVector, plan: &CvPlan, run_index: usize) -> Result<FoldAssignment> {
    deal_folds(labels, plan, run_index, true)
}

fn deal_folds(labels: &LabelVector, plan: &CvPlan, run_index: usize, warn: bool) -> Result<FoldAssignment> {
    if plan.n_folds < 2 {
        return Err(Error::InvalidParameter("at least 2 folds are needed".into()));
    }
    if labels.len() < plan.n_folds {
        return Err(Error::TooFewSamples {
            n_samples: labels.len(),
            n_folds: plan.n_folds,
        });
    }
    let mut rng = plan.seed.stream(run_index as u64);
    let mut groups = vec![Vec::new(); labels.n_classes()];
    for (i, &c) in labels.ids().iter().enumerate() {
        groups[c].push(i);
    }
    let mut fold_of = vec![0; labels.len()];
    let mut next = 0;
    for (class, mut rows) in groups.into_iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        if warn && rows.len() < plan.n_folds {
            log::warn!(
                "class {} has {} samples, fewer than {} folds",
                labels.name_of(class),
                rows.len(),
                plan.n_folds
            );
        }
        rows.shuffle(&mut rng);
        for i in rows {
            fold_of[i] = next;
            next = (next + 1) % plan.n_folds;
        }
    }
    Ok(FoldAssignment {
        fold_of,
        n_folds: plan.n_folds,
    })
}

pub fn accuracy(pred: &LabelVector, truth: &LabelVector) -> Result<f64> {
    check_lengths(pred, truth)?;
    let hits = pred.ids().iter().zip(truth.ids()).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum F1Average {
    /// Binary positive-class F1 for two-class problems, macro otherwise.
    #[default]
    Auto,
    /// F1 of class id 1; needs exactly two classes.
    BinaryPositive,
    /// Unweighted mean of per-class F1 over the classes present in the truth.
    Macro,
}

impl FromStr for F1Average {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "binary" | "binary_positive" => Ok(Self::BinaryPositive),
            "macro" => Ok(Self::Macro),
            other => Err(Error::Parse(format!("unknown F1 averaging `{other}`"))),
        }
    }
}

impl fmt::Display for F1Average {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            F1Average::Auto => "auto",
            F1Average::BinaryPositive => "binary_positive",
            F1Average::Macro => "macro",
        })
    }
}

fn class_f1(pred: &[usize], truth: &[usize], class: usize) -> f64 {
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p == class, t == class) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => {}
        }
    }
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fneg == 0 { 0.0 } else { tp as f64 / (tp + fneg) as f64 };
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn f1_score(pred: &LabelVector, truth: &LabelVector, averaging: F1Average) -> Result<f64> {
    check_lengths(pred, truth)?;
    let n_classes = truth.n_classes().max(pred.n_classes());
    let averaging = match averaging {
        F1Average::Auto if truth.n_classes() == 2 => F1Average::BinaryPositive,
        F1Average::Auto => F1Average::Macro,
        other => other,
    };
    match averaging {
        F1Average::BinaryPositive => {
            if truth.n_classes() != 2 {
                return Err(Error::NotBinary(truth.n_classes()));
            }
            Ok(class_f1(pred.ids(), truth.ids(), 1))
        }
        _ => {
            let mut present = vec![false; n_classes];
            for &t in truth.ids() {
                present[t] = true;
            }
            let scores: Vec<f64> = (0..n_classes)
                .filter(|&c| present[c])
                .map(|c| class_f1(pred.ids(), truth.ids(), c))
                .collect();
            Ok(scores.iter().sum::<f64>() / scores.len() as f64)
        }
    }
}

fn check_lengths(pred: &LabelVector, truth: &LabelVector) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::Empty);
    }
    Ok(())
}

/// Scores of one (dataset, algorithm) cell over every run and fold.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub dataset_id: String,
    pub algorithm_id: String,
    pub scheme: String,
    pub mode: String,
    pub k: usize,
    pub p: Option<usize>,
    pub plan: CvPlan,
    pub mean_accuracy: f64,
    pub mean_f1: f64,
    pub mean_runtime_s: f64,
    /// `[run][fold]`
    pub accuracy: Vec<Vec<f64>>,
    pub f1: Vec<Vec<f64>>,
    pub runtime_s: Vec<Vec<f64>>,
}

pub const REPORT_CSV_HEADER: &str =
    "dataset,algorithm,scheme,mode,k,p,mean_acc,mean_f1,mean_runtime_s,n_runs,n_folds,seed";

impl EvalReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},{:.6},{:.4},{},{},{}",
            self.dataset_id,
            self.algorithm_id,
            self.scheme,
            self.mode,
            self.k,
            self.p.map_or_else(String::new, |p| p.to_string()),
            self.mean_accuracy,
            self.mean_f1,
            self.mean_runtime_s,
            self.plan.n_runs,
            self.plan.n_folds,
            self.plan.seed
        )
    }
}

pub(crate) fn grid_mean(cells: &[Vec<f64>]) -> f64 {
    let n: usize = cells.iter().map(Vec::len).sum();
    cells.iter().flatten().sum::<f64>() / n as f64
}

struct FoldScore {
    accuracy: f64,
    f1: f64,
    seconds: f64,
}

fn run_fold<T: Scalar>(
    ds: &LabeledDataset<T>,
    cfg: &PipelineConfig,
    folds: &FoldAssignment,
    fold: usize,
    averaging: F1Average,
) -> Result<FoldScore> {
    let (train_rows, test_rows) = folds.split(fold);
    let train = ds.select_rows(&train_rows);
    let test = ds.select_rows(&test_rows);
    let start = Instant::now();
    let fitted = fit_pipeline(&train, cfg)?;
    let pred = fitted.predict(&test.features)?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(FoldScore {
        accuracy: accuracy(&pred, &test.labels)?,
        f1: f1_score(&pred, &test.labels, averaging)?,
        seconds,
    })
}

/// Runs `plan.n_runs` independent stratified k-fold rounds of the pipeline.
/// Runs execute in parallel; each fold is timed on the worker that runs it.
pub fn cross_validate<T: Scalar>(
    ds: &LabeledDataset<T>,
    cfg: &PipelineConfig,
    plan: &CvPlan,
    averaging: F1Average,
    ids: (&str, &str),
) -> Result<EvalReport> {
    if plan.n_runs == 0 {
        return Err(Error::InvalidParameter("at least one run is needed".into()));
    }
    let runs: Vec<Vec<FoldScore>> = (0..plan.n_runs)
        .into_par_iter()
        .map(|run| {
            // warn about small classes once, not once per run
            let folds = deal_folds(&ds.labels, plan, run, run == 0)?;
            (0..plan.n_folds)
                .map(|fold| run_fold(ds, cfg, &folds, fold, averaging))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let grid = |f: fn(&FoldScore) -> f64| -> Vec<Vec<f64>> {
        runs.iter().map(|r| r.iter().map(f).collect()).collect()
    };
    let accuracy = grid(|s| s.accuracy);
    let f1 = grid(|s| s.f1);
    let runtime_s = grid(|s| s.seconds);
    Ok(EvalReport {
        dataset_id: ids.0.to_owned(),
        algorithm_id: ids.1.to_owned(),
        scheme: cfg.scheme.map_or("none", |s| s.name()).to_owned(),
        mode: cfg.mode.name().to_owned(),
        k: cfg.k,
        p: cfg.scheme.and_then(|s| s.neighbors()),
        plan: *plan,
        mean_accuracy: grid_mean(&accuracy),
        mean_f1: grid_mean(&f1),
        mean_runtime_s: grid_mean(&runtime_s),
        accuracy,
        f1,
        runtime_s,
    })
}
