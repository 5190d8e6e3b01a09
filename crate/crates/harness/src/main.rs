use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oblknn_core::{apply_scaler, fit_scaler, impute, validate_dataset, Dataset, ImputePolicy, OblScheme, ScalerKind};
use oblknn_harness::{
    export_pairs, load_csv, run_experiment, write_outputs, DatasetSpec, ExperimentConfig, HarnessError, LabelColumn,
};

#[derive(Parser)]
#[command(name = "oblknn", version, about = "Opposition-based augmentation benchmarks for KNN")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid described by a TOML config.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        runs: Option<usize>,
        /// Output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// auto, macro or binary_positive
        #[arg(long)]
        f1: Option<String>,
        #[arg(long)]
        scaler: Option<String>,
    },
    /// Write every row of a dataset next to its opposite.
    Oppose {
        #[command(flatten)]
        input: InputArgs,
        /// global, classwise or localized
        #[arg(long, default_value = "global")]
        scheme: String,
        /// Neighbour count for the localized scheme
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// z-score the features before opposing
        #[arg(long)]
        standardize: bool,
    },
    /// Parse a dataset and report its shape and problems.
    Validate {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    dataset: PathBuf,
    /// `last`, a zero-based index or a header name
    #[arg(long, default_value = "last")]
    label: String,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    #[arg(long)]
    no_header: bool,
}

impl InputArgs {
    fn spec(&self) -> DatasetSpec {
        DatasetSpec {
            id: self
                .dataset
                .file_stem()
                .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned()),
            path: self.dataset.clone(),
            label_column: self.label.parse::<LabelColumn>().unwrap_or_default(),
            delimiter: self.delimiter,
            has_header: !self.no_header,
            n_select: None,
        }
    }
}

fn run(cli: Cli) -> Result<u8, HarnessError> {
    match cli.command {
        Command::Run {
            config,
            seed,
            folds,
            runs,
            out,
            f1,
            scaler,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => HarnessError::FileNotFound(config.clone()),
                _ => e.into(),
            })?;
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.experiment.seed = s;
            }
            if let Some(f) = folds {
                cfg.cv.folds = f;
            }
            if let Some(r) = runs {
                cfg.cv.runs = r;
            }
            if let Some(o) = out {
                cfg.experiment.output_dir = o;
            }
            if let Some(f) = f1 {
                cfg.experiment.f1 = f;
            }
            if let Some(s) = scaler {
                cfg.experiment.scaler = s;
            }
            cfg.validate()?;
            let outcome = run_experiment(&cfg)?;
            write_outputs(&cfg, &outcome, Some(&text))?;
            let failed = outcome.n_failed();
            println!(
                "{} datasets x {} algorithms, {} failed cells, reports in {}",
                outcome.dataset_ids.len(),
                outcome.algorithm_ids.len(),
                failed,
                cfg.experiment.output_dir.display()
            );
            Ok(u8::from(failed > 0))
        }
        Command::Oppose {
            input,
            scheme,
            p,
            out,
            standardize,
        } => {
            let scheme = OblScheme::parse(&scheme, p)?;
            let ds = load_csv(&input.spec())?.dataset;
            let mut features = impute(&ds.features, ImputePolicy::FeatureMean, None)?;
            if standardize {
                features = apply_scaler(&fit_scaler(ScalerKind::ZScore, &features), &features)?;
            }
            let ds = Dataset::new(features, ds.labels)?;
            export_pairs(&ds, scheme, &out)?;
            println!("wrote {} pairs to {}", ds.n_samples(), out.display());
            Ok(0)
        }
        Command::Validate { input } => {
            let loaded = load_csv(&input.spec())?;
            let ds = &loaded.dataset;
            let missing = ds.features.as_slice().iter().filter(|v| v.is_nan()).count();
            println!("samples   {}", ds.n_samples());
            println!("features  {}", ds.n_features());
            println!("classes   {}", ds.n_classes());
            for (name, count) in ds.labels.class_names().iter().zip(ds.labels.counts()) {
                println!("  {name}: {count}");
            }
            println!("missing   {missing}");
            let filled = Dataset::new(impute(&ds.features, ImputePolicy::FeatureMean, None)?, ds.labels.clone())?;
            let violations = validate_dataset(&filled);
            for v in &violations {
                println!("violation: {v}");
            }
            Ok(u8::from(!violations.is_empty()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
