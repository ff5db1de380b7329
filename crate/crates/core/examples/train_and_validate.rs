//! Fit the three model families and compare them by k-fold MAPE.
//!
//! cargo run --example train_and_validate

use prunekit::pipeline::{generate_synthetic, SyntheticSpec};
use prunekit::{cross_validate, models, ModelSpec};

fn main() -> prunekit::Result<()> {
    let table = generate_synthetic(&SyntheticSpec {
        n_samples: 120,
        relevant: vec![4.0, 3.0, 2.0],
        n_irrelevant: 5,
        noise_sigma: 0.3,
        seed: 7,
    })?;

    for spec in [
        ModelSpec::decision_tree(),
        ModelSpec::random_forest().with_seed(1),
        ModelSpec::gradient_boosting(),
    ] {
        let cv = cross_validate(&spec, &table, "y", 5, 42)?;
        println!("{}", spec.kind.name());
        print!("{}", cv.to_table());
    }

    let model = models::train(&ModelSpec::gradient_boosting(), &table, "y")?;
    let json = model.to_json()?;
    let restored = prunekit::Model::from_json(&json)?;
    let probe = table.row(0);
    println!(
        "\nsaved model: {} bytes, prediction {:.4} before and {:.4} after a round trip",
        json.len(),
        model.predict(probe)?,
        restored.predict(probe)?
    );
    println!("features used by the ensemble: {:?}", model.used_features());
    Ok(())
}
