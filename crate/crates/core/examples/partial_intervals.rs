//! How much of each process signal is needed to predict the final quality?
//!
//! cargo run --example partial_intervals

use prunekit::data::FeatureOptions;
use prunekit::pipeline::{generate_synthetic_series, interval_experiment, SeriesSpec};
use prunekit::ModelSpec;

fn main() -> prunekit::Result<()> {
    let records = generate_synthetic_series(&SeriesSpec {
        n_records: 50,
        seed: 4,
        ..SeriesSpec::default()
    })?;
    let fractions: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let result = interval_experiment(
        &ModelSpec::gradient_boosting(),
        &records,
        SeriesSpec::TARGET,
        &fractions,
        5,
        4,
        FeatureOptions::default(),
    )?;
    println!("{:>9}  {:>10}", "observed", "mean MAPE");
    for (f, r) in result.fractions.iter().zip(&result.reports) {
        println!("{:>8.0}%  {:>9.3}%", f * 100.0, r.mean_mape);
    }
    Ok(())
}
