//! Drive every CLI command from a JSON config, as `prunekit <command>
//! --config <path>` would.
//!
//! cargo run --example cli_workflow [-- <work-dir>]

use std::path::PathBuf;

use prunekit::cli::{run, CommandKind};

const TABLE_CONFIG: &str = r#"{
  "input": {"synthetic": {"n_samples": 100, "relevant": [4, 3, 2], "n_irrelevant": 7, "noise_sigma": 0.5, "seed": 0}},
  "model": {"kind": "gradient_boosting", "n_stages": 100},
  "methods": ["permutation", "select_k_best"],
  "output_dir": "table-run",
  "seed": 1
}"#;

const SERIES_CONFIG: &str = r#"{
  "input": {"synthetic_series": {"n_records": 30, "seed": 0}},
  "model": {"kind": "random_forest", "n_trees": 50, "seed": 3},
  "fractions": [0.1, 0.25, 0.5, 1.0],
  "output_dir": "series-run"
}"#;

fn main() -> prunekit::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("prunekit-cli-workflow"));
    std::fs::create_dir_all(&dir).map_err(|e| prunekit::Error::io(&dir, e))?;
    let table_cfg = dir.join("table.json");
    let series_cfg = dir.join("series.json");
    std::fs::write(&table_cfg, TABLE_CONFIG).map_err(|e| prunekit::Error::io(&table_cfg, e))?;
    std::fs::write(&series_cfg, SERIES_CONFIG).map_err(|e| prunekit::Error::io(&series_cfg, e))?;

    let steps = [
        (CommandKind::Synth, &table_cfg),
        (CommandKind::Train, &table_cfg),
        (CommandKind::Explain, &table_cfg),
        (CommandKind::Sweep, &table_cfg),
        (CommandKind::Synth, &series_cfg),
        (CommandKind::Preprocess, &series_cfg),
        (CommandKind::Intervals, &series_cfg),
    ];
    for (command, cfg) in steps {
        let summary = run(command, cfg, None)?;
        println!(
            "{:<10} -> {}: {}",
            command.name(),
            summary.output_dir.display(),
            summary.artifacts.join(", ")
        );
        println!("{:<10}    {}", "", summary.details);
    }
    Ok(())
}
