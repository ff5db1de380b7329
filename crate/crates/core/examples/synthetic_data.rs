//! Generate the two synthetic benchmarks and write them to disk.
//!
//! cargo run --example synthetic_data [-- <output-dir>]

use std::path::PathBuf;

use prunekit::data::write_timeseries_dir;
use prunekit::pipeline::{generate_synthetic, generate_synthetic_series, SeriesSpec, SyntheticSpec};

fn main() -> prunekit::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("prunekit-synthetic"));
    std::fs::create_dir_all(&out).map_err(|e| prunekit::Error::io(&out, e))?;

    let spec = SyntheticSpec {
        n_samples: 100,
        relevant: vec![4.0, 3.0, 2.0],
        n_irrelevant: 7,
        noise_sigma: 0.5,
        seed: 0,
    };
    let table = generate_synthetic(&spec)?;
    std::fs::write(out.join("linear.csv"), table.to_csv_string()?).map_err(|e| prunekit::Error::io(&out, e))?;
    println!(
        "linear benchmark: {} samples, features {:?}",
        table.n_samples(),
        table.feature_names()
    );

    let records = generate_synthetic_series(&SeriesSpec::default())?;
    write_timeseries_dir(out.join("series"), &records)?;
    let first = &records[0];
    println!(
        "series benchmark: {} records, channels {:?}, first record {} has {} samples on fa, Ra = {:.3}",
        records.len(),
        first.channels.keys().collect::<Vec<_>>(),
        first.id,
        first.channels["fa"].len(),
        first.targets["Ra"]
    );
    println!("written to {}", out.display());
    Ok(())
}
