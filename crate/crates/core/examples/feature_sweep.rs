//! Rank, prune to the top p% of features, retrain, and pick the best subset.
//! Writes the MAPE-vs-p chart for all three methods.
//!
//! cargo run --example feature_sweep [-- <chart.svg>]

use prunekit::explain::Method;
use prunekit::pipeline::{feature_sweep, generate_synthetic, AttributionSettings, SyntheticSpec};
use prunekit::report::svg::{line_chart, Series};
use prunekit::ModelSpec;

fn main() -> prunekit::Result<()> {
    let spec = SyntheticSpec {
        n_samples: 100,
        relevant: vec![4.0, 3.0, 2.0],
        n_irrelevant: 7,
        noise_sigma: 0.5,
        seed: 2,
    };
    let table = generate_synthetic(&spec)?;
    let grid: Vec<f64> = (1..=10).map(|i| i as f64 * 10.0).collect();
    let model = ModelSpec::gradient_boosting();

    let mut curves = Vec::new();
    for method in Method::ALL {
        let sweep = feature_sweep(
            &model,
            &table,
            "y",
            method,
            &grid,
            5,
            &AttributionSettings::default(),
            2,
        )?;
        println!(
            "{method}: best p = {} ({:.3}% vs {:.3}% with all features), kept {:?}",
            sweep.best_p,
            sweep.best_point().cv.mean_mape,
            sweep.baseline_cv.mean_mape,
            sweep.best_features
        );
        curves.push(Series {
            name: if method == Method::SelectKBest {
                "FS".into()
            } else {
                method.to_string()
            },
            points: sweep.points.iter().map(|p| (p.p, p.cv.mean_mape)).collect(),
        });
    }

    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("prunekit-sweep.svg").display().to_string());
    let svg = line_chart(
        "MAPE vs. share of top-ranked features",
        "top features kept (%)",
        "mean MAPE (%)",
        &curves,
    );
    std::fs::write(&path, svg).map_err(|e| prunekit::Error::io(&path, e))?;
    println!("chart: {path}");
    Ok(())
}
