//! Exact and sampled Shapley values for a boosted ensemble, and the global
//! mean-|phi| ranking.
//!
//! cargo run --example shapley

use prunekit::explain::{shapley_exact, shapley_global, shapley_sampled, ValueFunction};
use prunekit::models::train;
use prunekit::pipeline::{generate_synthetic, SyntheticSpec};
use prunekit::ModelSpec;

fn main() -> prunekit::Result<()> {
    let table = generate_synthetic(&SyntheticSpec {
        n_samples: 80,
        relevant: vec![4.0, 2.0, 1.0],
        n_irrelevant: 3,
        noise_sigma: 0.1,
        seed: 5,
    })?;
    let model = train(&ModelSpec::gradient_boosting(), &table, "y")?;
    let explain: Vec<usize> = (0..5).collect();
    let background: Vec<usize> = (5..69).collect();

    let exact = shapley_exact(&model, &table, &explain, &background, ValueFunction::Marginalize)?;
    let sampled = shapley_sampled(
        &model,
        &table,
        &explain,
        &background,
        ValueFunction::Marginalize,
        2000,
        11,
    )?;
    println!("baseline v(empty) = {:.4}", exact.baseline);
    for (r, &row) in explain.iter().enumerate() {
        let total: f64 = exact.phi[r].iter().sum();
        println!(
            "row {row}: f(x) = {:.4}, sum(phi) + baseline = {:.4}",
            exact.predictions[r],
            total + exact.baseline
        );
        for (j, name) in table.feature_names().iter().enumerate() {
            println!(
                "    {name:<8} exact {:+.4}  sampled {:+.4}",
                exact.phi[r][j], sampled.phi[r][j]
            );
        }
    }

    let global = shapley_global(&exact, table.feature_names())?;
    println!("\nglobal ranking by mean |phi|: {:?}", global.rank);
    Ok(())
}
