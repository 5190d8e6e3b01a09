//! Grid execution and report files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use oblknn_core::evaluation::REPORT_CSV_HEADER;
use oblknn_core::rankstats::FRIEDMAN_CSV_HEADER;
use oblknn_core::{cross_validate, friedman, impute, Dataset, EvalReport, FriedmanResult, OblScheme, ScoreMatrix};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::dataset::load_csv;
use crate::error::{HarnessError, Result};
use crate::pairs::export_pairs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Accuracy,
    F1,
    Runtime,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Accuracy, Metric::F1, Metric::Runtime];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::F1 => "f1",
            Metric::Runtime => "runtime",
        }
    }

    pub fn higher_is_better(self) -> bool {
        self != Metric::Runtime
    }

    fn of(self, r: &EvalReport) -> f64 {
        match self {
            Metric::Accuracy => r.mean_accuracy,
            Metric::F1 => r.mean_f1,
            Metric::Runtime => r.mean_runtime_s,
        }
    }
}

/// One (dataset, algorithm) cell: a report or the reason it failed.
pub type Cell = std::result::Result<EvalReport, String>;

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub dataset_ids: Vec<String>,
    pub algorithm_ids: Vec<String>,
    /// `[dataset][algorithm]`
    pub cells: Vec<Vec<Cell>>,
    pub friedman: Vec<(Metric, std::result::Result<FriedmanResult, String>)>,
}

impl ExperimentOutcome {
    pub fn n_failed(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_err()).count()
    }

    pub fn table(&self, metric: Metric) -> Vec<Vec<Option<f64>>> {
        self.cells
            .iter()
            .map(|row| row.iter().map(|c| c.as_ref().ok().map(|r| metric.of(r))).collect())
            .collect()
    }
}

/// Cross-validates every (dataset, algorithm) pair and ranks algorithms per metric.
/// Cell failures are kept in the outcome; only load errors abort.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let datasets: Vec<Dataset> = cfg
        .datasets
        .iter()
        .map(|spec| {
            let ds = load_csv(spec).map(|l| l.dataset);
            if let Err(e) = &ds {
                log::error!("dataset {}: {e}", spec.id);
            }
            ds
        })
        .collect::<Result<_>>()?;
    let plan = cfg.plan();
    let averaging = cfg.f1()?;

    let jobs: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|d| (0..cfg.algorithms.len()).map(move |a| (d, a)))
        .collect();
    let results: Vec<Cell> = jobs
        .par_iter()
        .map(|&(d, a)| {
            let (spec, alg) = (&cfg.datasets[d], &cfg.algorithms[a]);
            let pipeline = cfg.pipeline(spec, alg).map_err(|e| e.to_string())?;
            let cell = cross_validate(&datasets[d], &pipeline, &plan, averaging, (&spec.id, &alg.id))
                .map_err(|e| e.to_string());
            match &cell {
                Ok(r) => log::info!("{} / {}: accuracy {:.4}", spec.id, alg.id, r.mean_accuracy),
                Err(e) => log::warn!("{} / {} failed: {e}", spec.id, alg.id),
            }
            cell
        })
        .collect();

    let mut results = results.into_iter();
    let cells: Vec<Vec<Cell>> = (0..datasets.len())
        .map(|_| results.by_ref().take(cfg.algorithms.len()).collect())
        .collect();

    let mut outcome = ExperimentOutcome {
        dataset_ids: cfg.datasets.iter().map(|d| d.id.clone()).collect(),
        algorithm_ids: cfg.algorithms.iter().map(|a| a.id.clone()).collect(),
        cells,
        friedman: Vec::new(),
    };
    outcome.friedman = Metric::ALL
        .iter()
        .map(|&m| {
            // only datasets where every algorithm produced a score
            let rows: Vec<Vec<f64>> = outcome
                .table(m)
                .into_iter()
                .filter_map(|row| row.into_iter().collect::<Option<Vec<f64>>>())
                .collect();
            let result = ScoreMatrix::new(rows, m.higher_is_better())
                .and_then(|sm| friedman(&sm))
                .map_err(|e| e.to_string());
            (m, result)
        })
        .collect();

    if cfg.experiment.export_pairs {
        let schemes: BTreeSet<(&str, Option<usize>)> = cfg
            .algorithms
            .iter()
            .filter_map(|a| a.scheme().ok().flatten())
            .map(|s| (s.name(), s.neighbors()))
            .collect();
        let policy = cfg.impute()?;
        for (spec, ds) in cfg.datasets.iter().zip(&datasets) {
            let filled = Dataset {
                features: impute(&ds.features, policy, None)?,
                labels: ds.labels.clone(),
            };
            for &(name, p) in &schemes {
                let scheme = OblScheme::parse(name, p)?;
                let file = match p {
                    Some(p) => format!("{}_{name}_p{p}.csv", spec.id),
                    None => format!("{}_{name}.csv", spec.id),
                };
                export_pairs(&filled, scheme, &cfg.experiment.output_dir.join("pairs").join(file))?;
            }
        }
    }
    Ok(outcome)
}

fn clean(s: &str) -> String {
    s.replace([',', '\n', '\r'], " ")
}

/// Datasets as rows, algorithms as columns, 4 decimals; failed cells read `FAILED`.
pub fn metric_table_csv(outcome: &ExperimentOutcome, metric: Metric) -> String {
    let mut out = String::from("dataset");
    for a in &outcome.algorithm_ids {
        out.push(',');
        out.push_str(a);
    }
    out.push('\n');
    for (id, row) in outcome.dataset_ids.iter().zip(outcome.table(metric)) {
        out.push_str(id);
        for v in row {
            match v {
                Some(v) => write!(out, ",{v:.4}").unwrap(),
                None => out.push_str(",FAILED"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn friedman_csv(outcome: &ExperimentOutcome) -> String {
    let mut out = format!("{FRIEDMAN_CSV_HEADER}\n");
    for (metric, result) in &outcome.friedman {
        match result {
            Ok(r) => {
                for line in r.csv_rows(metric.name(), &outcome.algorithm_ids) {
                    out.push_str(&line);
                    out.push('\n');
                }
            }
            Err(e) => writeln!(out, "{},,,,,,{}", metric.name(), clean(e)).unwrap(),
        }
    }
    out
}

pub fn reports_csv(outcome: &ExperimentOutcome) -> String {
    let mut out = format!("{REPORT_CSV_HEADER}\n");
    for (d, row) in outcome.cells.iter().enumerate() {
        for (a, cell) in row.iter().enumerate() {
            match cell {
                Ok(r) => out.push_str(&r.csv_row()),
                Err(e) => write!(
                    out,
                    "{},{},FAILED: {},,,,,,,,,",
                    outcome.dataset_ids[d],
                    outcome.algorithm_ids[a],
                    clean(e)
                )
                .unwrap(),
            }
            out.push('\n');
        }
    }
    out
}

pub fn manifest(cfg: &ExperimentConfig, config_text: Option<&str>) -> String {
    let mut out = String::new();
    writeln!(out, "oblknn-harness {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(out, "oblknn-core {}", oblknn_core::VERSION).unwrap();
    writeln!(out, "seed = {}", cfg.experiment.seed).unwrap();
    writeln!(out, "folds = {}", cfg.cv.folds).unwrap();
    writeln!(out, "runs = {}", cfg.cv.runs).unwrap();
    if let Some(text) = config_text {
        out.push_str("\n# config\n");
        out.push_str(text);
        if !text.ends_with('\n') {
            out.push('\n');
        }
    }
    out
}

/// Writes accuracy/f1/runtime tables, `friedman.csv`, `reports.csv` and `manifest.txt`.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    outcome: &ExperimentOutcome,
    config_text: Option<&str>,
) -> Result<()> {
    let dir: &Path = &cfg.experiment.output_dir;
    fs::create_dir_all(dir).map_err(HarnessError::from)?;
    for m in Metric::ALL {
        fs::write(dir.join(format!("{}.csv", m.name())), metric_table_csv(outcome, m))?;
    }
    fs::write(dir.join("friedman.csv"), friedman_csv(outcome))?;
    fs::write(dir.join("reports.csv"), reports_csv(outcome))?;
    fs::write(dir.join("manifest.txt"), manifest(cfg, config_text))?;
    Ok(())
}
