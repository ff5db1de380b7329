use serde::{Deserialize, Serialize};

use crate::data::{extract_features_with, truncate_records, FeatureOptions, TimeSeriesRecord};
use crate::error::{Error, Result, ResultExt};
use crate::eval::{cross_validate, CvReport};
use crate::models::ModelSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalResult {
    pub fractions: Vec<f64>,
    /// One report per fraction, in the same order.
    pub reports: Vec<CvReport>,
}

impl IntervalResult {
    /// `fraction,mean_mape,fold_1..fold_k`.
    pub fn to_csv_string(&self) -> String {
        let k = self.reports.first().map_or(0, |r| r.k);
        let mut out = String::from("fraction,mean_mape");
        for f in 1..=k {
            out.push_str(&format!(",fold_{f}"));
        }
        out.push('\n');
        for (fr, r) in self.fractions.iter().zip(&self.reports) {
            out.push_str(&format!("{fr},{}", r.mean_mape));
            for s in &r.fold_scores {
                out.push_str(&format!(",{s}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Predicts the final quality from only the first `fraction` of every
/// series: truncate, featurize, cross-validate, for each fraction.
pub fn interval_experiment(
    spec: &ModelSpec,
    records: &[TimeSeriesRecord],
    target: &str,
    fractions: &[f64],
    k: usize,
    seed: u64,
    options: FeatureOptions,
) -> Result<IntervalResult> {
    if fractions.is_empty() {
        return Err(Error::invalid("no fractions given"));
    }
    if fractions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("fractions must be strictly increasing"));
    }
    let reports = fractions
        .iter()
        .map(|&f| {
            let truncated = truncate_records(records, f)?;
            let table = extract_features_with(&truncated, options)?;
            cross_validate(spec, &table, target, k, seed)
        })
        .enumerate()
        .map(|(i, r)| r.context(|| format!("fraction {}", fractions[i])))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalResult {
        fractions: fractions.to_vec(),
        reports,
    })
}
