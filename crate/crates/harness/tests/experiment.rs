use std::fs;
use std::path::{Path, PathBuf};

use oblknn_core::{compute_bounds, oppose_classwise, oppose_global, Dataset, LabelVector, Matrix, OblScheme};
use oblknn_harness::experiment::{friedman_csv, metric_table_csv};
use oblknn_harness::{export_pairs, load_csv, run_experiment, write_outputs, DatasetSpec, ExperimentConfig, Metric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn config(out: &Path, extra_dataset: bool, folds: usize, runs: usize) -> ExperimentConfig {
    let mut text = format!(
        r#"
[experiment]
output_dir = "{}"
seed = 5

[cv]
folds = {folds}
runs = {runs}

[[dataset]]
id = "zoo"
path = "{}"
n_select = 10

[[algorithm]]
id = "KNN"

[[algorithm]]
id = "OBLKNN-CW"
scheme = "classwise"
"#,
        out.display(),
        data_dir().join("zoo.csv").display()
    );
    if extra_dataset {
        text.push_str(&format!(
            "\n[[dataset]]\nid = \"sonar\"\npath = \"{}\"\nn_select = 36\n",
            data_dir().join("sonar.csv").display()
        ));
    }
    ExperimentConfig::parse(&text).unwrap()
}

#[test]
fn minimal_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), false, 2, 1);
    let outcome = run_experiment(&cfg).unwrap();
    assert_eq!(outcome.n_failed(), 0);
    write_outputs(&cfg, &outcome, None).unwrap();
    for m in ["accuracy", "f1", "runtime"] {
        let text = fs::read_to_string(dir.path().join(format!("{m}.csv"))).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "dataset,KNN,OBLKNN-CW");
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells.len(), 3);
        for c in &cells[1..] {
            let (_, decimals) = c.split_once('.').unwrap();
            assert_eq!(decimals.len(), 4);
        }
    }
    // a single dataset cannot be ranked; recorded, not fatal
    assert!(outcome.friedman.iter().all(|(_, r)| r.is_err()));
    let f = fs::read_to_string(dir.path().join("friedman.csv")).unwrap();
    assert!(f.lines().nth(1).unwrap().starts_with("accuracy,,,,,,"));
    assert!(dir.path().join("manifest.txt").is_file());
    assert!(outcome.cells[0].iter().flatten().all(|r| r.runtime_s.iter().flatten().all(|&t| t > 0.0)));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let cfg = config(dir.path(), true, 5, 3);
        let outcome = run_experiment(&cfg).unwrap();
        write_outputs(&cfg, &outcome, None).unwrap();
    }
    for file in ["accuracy.csv", "f1.csv"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn two_datasets_rank() {
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_experiment(&config(dir.path(), true, 3, 1)).unwrap();
    let (_, acc) = &outcome.friedman[0];
    let acc = acc.as_ref().unwrap();
    assert_eq!(acc.dof, 1);
    assert!((acc.mean_ranks.iter().sum::<f64>() - 3.0).abs() < 1e-12);
    assert_eq!(friedman_csv(&outcome).lines().count(), 1 + 3 * 2);
    assert_eq!(metric_table_csv(&outcome, Metric::F1).lines().count(), 3);
}

#[test]
fn failed_cells_are_marked() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), false, 2, 1);
    // more selected features than zoo has
    cfg.datasets[0].n_select = Some(99);
    let outcome = run_experiment(&cfg).unwrap();
    assert_eq!(outcome.n_failed(), 2);
    let table = metric_table_csv(&outcome, Metric::Accuracy);
    assert_eq!(table.lines().nth(1).unwrap(), "zoo,FAILED,FAILED");
}

#[test]
fn config_validation() {
    assert!(ExperimentConfig::parse("[cv]\nfolds = 5\n").is_err());
    let dup = r#"
[[dataset]]
id = "a"
path = "x.csv"
[[algorithm]]
id = "KNN"
[[algorithm]]
id = "KNN"
"#;
    assert!(ExperimentConfig::parse(dup).is_err());
    let local_without_p = r#"
[[dataset]]
id = "a"
path = "x.csv"
[[algorithm]]
id = "L"
scheme = "localized"
"#;
    assert!(ExperimentConfig::parse(local_without_p).is_err());
}

#[test]
fn bundled_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["desk.toml", "smoke.toml"] {
        let cfg = ExperimentConfig::from_file(&dir.join(name)).unwrap();
        for d in &cfg.datasets {
            assert!(d.path.is_file(), "{}", d.path.display());
        }
    }
}

fn random_dataset(rng: &mut ChaCha8Rng) -> Dataset {
    let n = rng.random_range(4..40);
    let d = rng.random_range(1..6);
    let c = rng.random_range(1..4);
    let x = Matrix::new(n, d, (0..n * d).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
    Dataset::new(x, LabelVector::from_ids((0..n).map(|i| i % c).collect())).unwrap()
}

fn read_halves(path: &Path, ds: &Dataset) -> (Matrix, Matrix) {
    let spec = DatasetSpec {
        label_column: oblknn_harness::LabelColumn::Name("kind".into()),
        ..DatasetSpec::new("pairs", path)
    };
    let loaded = load_csv(&spec).unwrap();
    // columns after the label drop: row_id, class, f0..
    let x = &loaded.dataset.features;
    let kinds = &loaded.dataset.labels;
    let pick = |kind: &str| {
        let rows: Vec<usize> = (0..x.n_samples()).filter(|&i| kinds.name_of(kinds.ids()[i]) == kind).collect();
        let cols = x.n_features();
        let data: Vec<f64> = rows.iter().flat_map(|&i| x.row(i)[2..cols].to_vec()).collect();
        Matrix::new(rows.len(), cols - 2, data).unwrap()
    };
    let (orig, opp) = (pick("original"), pick("opposite"));
    assert_eq!(orig.n_samples(), ds.n_samples());
    (orig, opp)
}

#[test]
fn pairs_reflect_and_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let dir = tempfile::tempdir().unwrap();
    for t in 0..20 {
        let ds = random_dataset(&mut rng);
        let path = dir.path().join(format!("g{t}.csv"));
        export_pairs(&ds, OblScheme::Global, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * ds.n_samples());

        let (orig, opp) = read_halves(&path, &ds);
        assert_eq!(orig, ds.features);
        let b = compute_bounds(&ds.features).unwrap();
        for i in 0..ds.n_samples() {
            for k in 0..ds.n_features() {
                let sum = b.lower[k] + b.upper[k];
                assert_eq!(opp.get(i, k), sum - orig.get(i, k));
                assert!((orig.get(i, k) + opp.get(i, k) - sum).abs() <= f64::EPSILON * 8.0);
            }
        }
        // opposing the opposite half again gives the originals back
        let back = oppose_global(&opp, &compute_bounds(&opp).unwrap()).unwrap();
        for (a, e) in back.as_slice().iter().zip(ds.features.as_slice()) {
            assert!((a - e).abs() < 1e-12);
        }

        let path = dir.path().join(format!("c{t}.csv"));
        export_pairs(&ds, OblScheme::ClassWise, &path).unwrap();
        let (_, opp) = read_halves(&path, &ds);
        let back = oppose_classwise(&Dataset::new(opp, ds.labels.clone()).unwrap());
        for (a, e) in back.features.as_slice().iter().zip(ds.features.as_slice()) {
            assert!((a - e).abs() < 1e-12);
        }
    }
}

#[test]
fn zoo_roster_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"
[experiment]
output_dir = "{}"
seed = 2025

[[dataset]]
id = "zoo"
path = "{}"
n_select = 10

[[algorithm]]
id = "KNN"

[[algorithm]]
id = "WKNN"
weighted = true

[[algorithm]]
id = "OBLKNN"
scheme = "global"

[[algorithm]]
id = "WOBLKNN"
scheme = "global"
weighted = true
"#,
        dir.path().display(),
        data_dir().join("zoo.csv").display()
    );
    let cfg = ExperimentConfig::parse(&text).unwrap();
    assert_eq!((cfg.cv.folds, cfg.cv.runs), (5, 30));
    let outcome = run_experiment(&cfg).unwrap();
    let row = &outcome.table(Metric::Accuracy)[0];
    for (got, expected) in row.iter().zip([0.9386, 0.9640, 0.9390, 0.9601]) {
        let got = got.unwrap();
        assert!((got - expected).abs() <= 0.03, "{got} vs {expected}");
    }
}
