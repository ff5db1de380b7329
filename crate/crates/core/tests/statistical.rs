//! Seeded Monte-Carlo checks whose bounds come from independent oracles.

use std::collections::BTreeMap;

use prunekit::data::extract_features;
use prunekit::explain::{select_k_best_scores, shapley_exact, shapley_sampled, ValueFunction};
use prunekit::models::{train, TreeParams};
use prunekit::pipeline::{
    generate_synthetic, generate_synthetic_series, interval_experiment, SeriesSpec, SyntheticSpec,
};
use prunekit::{cross_validate, mape, FeatureTable, ModelKind, ModelSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// 95th percentile of the F(1, 98) distribution.
const F_1_98_CRIT: f64 = 3.938;

/// Lowest MAPE any constant prediction achieves. MAPE is piecewise linear in
/// the constant with kinks at the targets, so one of them is optimal.
fn best_constant_mape(y: &[f64]) -> f64 {
    y.iter()
        .map(|&c| mape(y, &vec![c; y.len()]).unwrap())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn gbm_beats_the_best_constant_on_the_linear_benchmark() {
    for seed in 0..5 {
        let spec = SyntheticSpec {
            n_samples: 100,
            relevant: vec![4.0, 3.0, 2.0],
            n_irrelevant: 7,
            noise_sigma: 0.5,
            seed,
        };
        let table = generate_synthetic(&spec).unwrap();
        let bound = best_constant_mape(table.target("y").unwrap());
        let cv = cross_validate(&ModelSpec::gradient_boosting(), &table, "y", 5, seed).unwrap();
        assert!(cv.mean_mape < bound, "seed {seed}: {} >= {bound}", cv.mean_mape);
    }
}

#[test]
fn sampled_shapley_tracks_exact_on_a_six_feature_tree() {
    let spec = SyntheticSpec {
        n_samples: 80,
        relevant: vec![5.0, 3.0, 2.0, 1.0],
        n_irrelevant: 2,
        noise_sigma: 0.2,
        seed: 6,
    };
    let table = generate_synthetic(&spec).unwrap();
    let tree = ModelSpec {
        kind: ModelKind::DecisionTree(TreeParams::unlimited()),
        seed: 0,
    };
    let model = train(&tree, &table, "y").unwrap();
    let rows: Vec<usize> = (0..8).collect();
    let background: Vec<usize> = (8..48).collect();
    let exact = shapley_exact(&model, &table, &rows, &background, ValueFunction::Marginalize).unwrap();
    let sampled = shapley_sampled(&model, &table, &rows, &background, ValueFunction::Marginalize, 5000, 3).unwrap();
    let max_phi = exact.phi.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    for (s, e) in sampled.phi.iter().flatten().zip(exact.phi.iter().flatten()) {
        assert!((s - e).abs() < 0.05 * max_phi, "{s} vs {e} (max {max_phi})");
    }
}

#[test]
fn independent_noise_rarely_looks_significant() {
    let mut below = 0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(&mut rng)).collect() };
        let x = draw(100);
        let y: Vec<f64> = draw(100).into_iter().map(|v: f64| v + 10.0).collect();
        let table = FeatureTable::new(
            vec!["x".into()],
            x.into_iter().map(|v| vec![v]).collect(),
            BTreeMap::from([("y".to_string(), y)]),
        )
        .unwrap();
        let f = select_k_best_scores(&table, "y").unwrap().scores["x"];
        if f < F_1_98_CRIT {
            below += 1;
        }
    }
    assert!(below >= 90, "{below}/100 draws below the critical value");
}

#[test]
fn prefix_signal_makes_interval_errors_comparable() {
    let model = ModelSpec::gradient_boosting();
    for seed in 0..20 {
        let spec = SeriesSpec {
            seed,
            ..SeriesSpec::default()
        };
        let records = generate_synthetic_series(&spec).unwrap();
        let result = interval_experiment(
            &model,
            &records,
            SeriesSpec::TARGET,
            &[0.1, 0.5, 1.0],
            5,
            seed,
            Default::default(),
        )
        .unwrap();
        let m: Vec<f64> = result.reports.iter().map(|r| r.mean_mape).collect();
        let (lo, hi) = m
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        assert!(hi <= 1.5 * lo, "seed {seed}: {m:?}");
        assert_eq!(
            result.reports[2],
            cross_validate(&model, &extract_features(&records).unwrap(), "Ra", 5, seed).unwrap()
        );
    }
}
