//! Permutation importance on a held-out split.
//!
//! cargo run --example permutation_importance

use prunekit::explain::permutation_importance;
use prunekit::models::train;
use prunekit::pipeline::{generate_synthetic, holdout_split, SyntheticSpec};
use prunekit::ModelSpec;

fn main() -> prunekit::Result<()> {
    let table = generate_synthetic(&SyntheticSpec {
        n_samples: 150,
        relevant: vec![5.0, 2.0, 0.5],
        n_irrelevant: 4,
        noise_sigma: 0.2,
        seed: 3,
    })?;
    let (train_rows, test_rows) = holdout_split(table.n_samples(), 3)?;
    let model = train(&ModelSpec::gradient_boosting(), &table.select_rows(&train_rows)?, "y")?;
    let report = permutation_importance(&model, &table.select_rows(&test_rows)?, "y", 20, 3)?;

    println!("MAPE increase when each feature is shuffled (20 repeats):");
    for name in &report.rank {
        println!("  {name:<8} {:+.4}", report.scores[name]);
    }
    print!("\n{}", report.to_csv_string());
    Ok(())
}
