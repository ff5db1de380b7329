use std::collections::BTreeMap;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{FeatureTable, TimeSeriesRecord};
use crate::error::{Error, Result};

/// Five-number summary of a sequence: min, quartiles and max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxPlotSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl BoxPlotSummary {
    pub const SUFFIXES: [&'static str; 5] = ["min", "q1", "median", "q3", "max"];

    pub fn to_array(self) -> [f64; 5] {
        [self.min, self.q1, self.median, self.q3, self.max]
    }
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Quartiles use linear interpolation at index `(n - 1) * p` of the sorted
/// sequence.
pub fn five_number_summary(xs: &[f64]) -> Result<BoxPlotSummary> {
    if xs.is_empty() {
        return Err(Error::Empty("five-number summary of an empty sequence"));
    }
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sample in five-number summary".into()));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(BoxPlotSummary {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

/// One-sided DFT magnitude spectrum `|X_k|` for `k = 0..=n/2`, DC included.
pub fn dft_magnitude(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::Empty("DFT of an empty sequence"));
    }
    let n = xs.len();
    let mut buf: Vec<Complex<f64>> = xs.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    Ok(buf[..=n / 2].iter().map(|c| c.norm()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureOptions {
    /// Keep the DC bin in the frequency-domain summary.
    pub include_dc: bool,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        Self { include_dc: true }
    }
}

/// Box-plot features in time and frequency domain plus configuration
/// parameters, one row per record in input order.
pub fn extract_features(records: &[TimeSeriesRecord]) -> Result<FeatureTable> {
    extract_features_with(records, FeatureOptions::default())
}

pub fn extract_features_with(records: &[TimeSeriesRecord], opts: FeatureOptions) -> Result<FeatureTable> {
    let first = records.first().ok_or(Error::Empty("no records"))?;
    for r in records {
        let same = r.channels.keys().eq(first.channels.keys())
            && r.config.keys().eq(first.config.keys())
            && r.targets.keys().eq(first.targets.keys());
        if !same {
            return Err(Error::Schema(format!(
                "record {:?} does not share the channel/config/target names of record {:?}",
                r.id, first.id
            )));
        }
        r.validate()?;
    }

    let mut names = Vec::new();
    for ch in first.channels.keys() {
        for domain in ["ts", "fq"] {
            for s in BoxPlotSummary::SUFFIXES {
                names.push(format!("{ch}_{domain}_{s}"));
            }
        }
    }
    names.extend(first.config.keys().cloned());

    let rows = records
        .par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let mut row = Vec::with_capacity(names.len());
            for xs in r.channels.values() {
                row.extend(five_number_summary(xs)?.to_array());
                let spectrum = dft_magnitude(xs)?;
                let spectrum = if opts.include_dc || spectrum.len() == 1 {
                    &spectrum[..]
                } else {
                    &spectrum[1..]
                };
                row.extend(five_number_summary(spectrum)?.to_array());
            }
            row.extend(r.config.values().copied());
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let targets: BTreeMap<String, Vec<f64>> = first
        .targets
        .keys()
        .map(|k| (k.clone(), records.iter().map(|r| r.targets[k]).collect()))
        .collect();
    FeatureTable::new(names, rows, targets)
}
