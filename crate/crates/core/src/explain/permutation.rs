use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use super::{ImportanceReport, Method};
use crate::data::FeatureTable;
use crate::error::{Error, Result};
use crate::eval::mape;
use crate::models::Model;
use crate::rng;

/// Row order used to shuffle `feature` in the given repeat.
pub fn permutation_order(seed: u64, feature: usize, repeat: usize, n: usize) -> Vec<usize> {
    rng::shuffled_indices(seed, "permutation", ((feature as u64) << 32) | repeat as u64, n)
}

/// Mean increase in MAPE when one feature column is shuffled.
///
/// `score_i = mean_r(MAPE with feature i permuted in repeat r - MAPE of the
/// unmodified table)`; a positive score means the model relies on the
/// feature. A feature the model never reads scores exactly zero.
pub fn permutation_importance(
    model: &Model,
    table: &FeatureTable,
    target: &str,
    repeats: usize,
    seed: u64,
) -> Result<ImportanceReport> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be >= 1"));
    }
    if model.feature_names.as_slice() != table.feature_names() {
        return Err(Error::FeatureMismatch);
    }
    let y = table.target(target)?;
    let baseline = mape(y, &model.predict_table(table)?)?;
    let n = table.n_samples();

    let scores = (0..table.n_features())
        .into_par_iter()
        .map(|j| -> Result<f64> {
            let mut total = 0.0;
            let mut x = vec![0.0; table.n_features()];
            for r in 0..repeats {
                let order = permutation_order(seed, j, r, n);
                let preds = (0..n)
                    .map(|i| {
                        x.copy_from_slice(table.row(i));
                        x[j] = table.row(order[i])[j];
                        model.predict(&x)
                    })
                    .collect::<Result<Vec<_>>>()?;
                total += mape(y, &preds)? - baseline;
            }
            Ok(total / repeats as f64)
        })
        .collect::<Result<Vec<_>>>()?;

    let scores: BTreeMap<String, f64> = table.feature_names().iter().cloned().zip(scores).collect();
    let metadata = BTreeMap::from([
        ("metric".to_string(), json!("mape")),
        ("repeats".to_string(), json!(repeats)),
        ("seed".to_string(), json!(seed)),
        ("n_samples".to_string(), json!(n)),
        (
            "sign_convention".to_string(),
            json!("score = MAPE_permuted - MAPE_original; positive means important"),
        ),
    ]);
    Ok(ImportanceReport::new(Method::Permutation, scores, metadata))
}
