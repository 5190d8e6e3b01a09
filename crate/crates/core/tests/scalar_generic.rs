use oblknn_core::{
    cross_validate, fit_pipeline, oppose, CvPlan, Dataset, Dataset32, F1Average, LabelVector, Matrix, OblScheme,
    PipelineConfig, RngSeed,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn separated(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 60;
    let mut data = Vec::new();
    for i in 0..n {
        let centre = (i % 3) as f64 * 10.0;
        data.push(centre + rng.random_range(-1.0..1.0));
        data.push(-centre + rng.random_range(-1.0..1.0));
        data.push(rng.random_range(-1.0..1.0));
    }
    Dataset::new(Matrix::new(n, 3, data).unwrap(), LabelVector::from_ids((0..n).map(|i| i % 3).collect())).unwrap()
}

fn to_f32(ds: &Dataset) -> Dataset32 {
    Dataset32::new(ds.features.cast(), ds.labels.clone()).unwrap()
}

#[test]
fn single_precision_matches_double_on_separated_data() {
    let ds = separated(1);
    let ds32 = to_f32(&ds);
    for scheme in [None, Some(OblScheme::Global), Some(OblScheme::ClassWise), Some(OblScheme::Localized { p: 4 })] {
        let cfg = PipelineConfig {
            scheme,
            n_select: Some(2),
            ..Default::default()
        };
        let a = fit_pipeline(&ds, &cfg).unwrap().predict(&ds.features).unwrap();
        let b = fit_pipeline(&ds32, &cfg).unwrap().predict(&ds32.features).unwrap();
        assert_eq!(a, b, "{scheme:?}");
    }
}

#[test]
fn single_precision_opposites_are_close() {
    let ds = separated(2);
    let ds32 = to_f32(&ds);
    for scheme in [OblScheme::Global, OblScheme::ClassWise, OblScheme::Localized { p: 3 }] {
        let a = oppose(&ds, scheme).unwrap();
        let b = oppose(&ds32, scheme).unwrap();
        for (x, y) in a.features.as_slice().iter().zip(b.features.as_slice()) {
            assert!((x - f64::from(*y)).abs() < 1e-4);
        }
    }
}

#[test]
fn cross_validation_runs_in_single_precision() {
    let plan = CvPlan {
        n_folds: 5,
        n_runs: 2,
        seed: RngSeed(8),
    };
    let r = cross_validate(&to_f32(&separated(3)), &PipelineConfig::default(), &plan, F1Average::Macro, ("s", "KNN"))
        .unwrap();
    assert_eq!(r.mean_accuracy, 1.0);
}
