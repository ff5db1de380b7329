//! The three ranking methods side by side on the same data.
//!
//! cargo run --example compare_rankings

use prunekit::explain::Method;
use prunekit::pipeline::{generate_synthetic, rank_features, AttributionSettings, SyntheticSpec};
use prunekit::ModelSpec;

fn main() -> prunekit::Result<()> {
    let table = generate_synthetic(&SyntheticSpec {
        n_samples: 100,
        relevant: vec![4.0, 3.0, 2.0],
        n_irrelevant: 7,
        noise_sigma: 0.5,
        seed: 1,
    })?;
    let spec = ModelSpec::gradient_boosting();
    let settings = AttributionSettings::default();

    let reports = Method::ALL
        .iter()
        .map(|&m| rank_features(&spec, &table, "y", m, &settings, 1))
        .collect::<prunekit::Result<Vec<_>>>()?;
    print!("{:>4}", "rank");
    for r in &reports {
        print!("  {:<14}", r.method.as_str());
    }
    println!();
    for i in 0..table.n_features() {
        print!("{:>4}", i + 1);
        for r in &reports {
            print!("  {:<14}", r.rank[i]);
        }
        println!();
    }
    Ok(())
}
