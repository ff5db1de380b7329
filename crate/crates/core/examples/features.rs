//! Turn raw process signals into box-plot features in the time and frequency
//! domains.
//!
//! cargo run --example features

use std::collections::BTreeMap;
use std::f64::consts::PI;

use prunekit::data::{dft_magnitude, extract_features, five_number_summary};
use prunekit::TimeSeriesRecord;

fn main() -> prunekit::Result<()> {
    let summary = five_number_summary(&[3.0, 1.0, 2.0, 4.0])?;
    println!("five-number summary of [3, 1, 2, 4]: {:?}", summary.to_array());

    let tone: Vec<f64> = (0..16).map(|t| (2.0 * PI * 3.0 * t as f64 / 16.0).cos()).collect();
    let spectrum = dft_magnitude(&tone)?;
    println!("|DFT| of a 3-cycle cosine over 16 samples:");
    for (k, m) in spectrum.iter().enumerate() {
        println!("  bin {k:>2}: {m:8.4}");
    }

    let record = |id: &str, amp: f64| {
        let force: Vec<f64> = (0..64).map(|t| amp * (t as f64 * 0.4).sin() + 2.0).collect();
        let torque: Vec<f64> = (0..48).map(|t| (t % 7) as f64 * amp).collect();
        TimeSeriesRecord::new(
            id,
            BTreeMap::from([("fz".to_string(), force), ("mz".to_string(), torque)]),
            BTreeMap::from([("speed".to_string(), 150.0), ("feed".to_string(), 0.08)]),
            BTreeMap::from([("Ra".to_string(), 1.0 + amp)]),
        )
    };
    let records = vec![record("r1", 1.0)?, record("r2", 2.5)?];
    let table = extract_features(&records)?;
    println!("\n{} features per record:", table.n_features());
    for (j, name) in table.feature_names().iter().enumerate() {
        println!("  {name:<14} {:>10.4} {:>10.4}", table.row(0)[j], table.row(1)[j]);
    }
    Ok(())
}
