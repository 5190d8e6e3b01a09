//! Dataset loading, experiment configuration and the benchmark runner behind
//! the `oblknn` command.

pub mod config;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod pairs;

pub use config::{AlgorithmSpec, CvSection, ExperimentConfig, ExperimentSection};
pub use dataset::{load_csv, DatasetSpec, LabelColumn, LoadedDataset, MISSING_TOKENS};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, write_outputs, ExperimentOutcome, Metric};
pub use pairs::export_pairs;
