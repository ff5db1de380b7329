use std::collections::BTreeMap;

use serde_json::json;

use super::{ImportanceReport, Method};
use crate::data::FeatureTable;
use crate::error::{Error, Result};

const PERFECT_CORRELATION: f64 = 1e-12;

fn is_constant(xs: &[f64]) -> bool {
    xs.iter().all(|&v| v == xs[0])
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Univariate regression F-statistic of each feature against the target,
/// `F = r^2 / (1 - r^2) * (n - 2)` with `r` the Pearson correlation.
///
/// `|r| = 1` maps to `+inf`. Constant features (or a constant target) have
/// no defined correlation and score 0.
pub fn select_k_best_scores(table: &FeatureTable, target: &str) -> Result<ImportanceReport> {
    let n = table.n_samples();
    if n < 3 {
        return Err(Error::invalid(format!("F-statistic needs at least 3 samples, got {n}")));
    }
    let y = table.target(target)?;
    let constant_target = is_constant(y);
    if constant_target {
        log::warn!("target {target:?} is constant; all F-scores set to 0");
    }
    let mut zero_variance = Vec::new();
    let mut scores = BTreeMap::new();
    for (j, name) in table.feature_names().iter().enumerate() {
        let x = table.column(j);
        let score = if constant_target {
            0.0
        } else if is_constant(&x) {
            log::warn!("feature {name:?} has zero variance; F-score set to 0");
            zero_variance.push(name.clone());
            0.0
        } else {
            let r = pearson(&x, y);
            let r2 = r * r;
            if r.abs() >= 1.0 - PERFECT_CORRELATION {
                f64::INFINITY
            } else {
                r2 / (1.0 - r2) * (n - 2) as f64
            }
        };
        scores.insert(name.clone(), score);
    }
    let metadata = BTreeMap::from([
        ("score_function".to_string(), json!("f_regression")),
        ("n_samples".to_string(), json!(n)),
        ("zero_variance_features".to_string(), json!(zero_variance)),
    ]);
    Ok(ImportanceReport::new(Method::SelectKBest, scores, metadata))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(cols: &[(&str, Vec<f64>)], y: Vec<f64>) -> FeatureTable {
        let n = y.len();
        let rows = (0..n).map(|i| cols.iter().map(|(_, c)| c[i]).collect()).collect();
        FeatureTable::new(
            cols.iter().map(|(k, _)| k.to_string()).collect(),
            rows,
            BTreeMap::from([("y".to_string(), y)]),
        )
        .unwrap()
    }

    #[test]
    fn perfect_correlation_ranks_first() {
        let y = vec![1.0, 4.0, 2.0, 8.0, 5.0];
        let t = table(&[("noise", vec![3.0, 1.0, 4.0, 1.0, 5.0]), ("copy", y.clone())], y);
        let r = select_k_best_scores(&t, "y").unwrap();
        assert_eq!(r.scores["copy"], f64::INFINITY);
        assert_eq!(r.rank[0], "copy");
    }

    #[test]
    fn anti_correlation_ranks_first() {
        let t = table(
            &[("b", vec![1.0, 3.0, 2.0]), ("x", vec![1.0, 2.0, 3.0])],
            vec![6.0, 4.0, 2.0],
        );
        let r = select_k_best_scores(&t, "y").unwrap();
        assert_eq!(r.rank[0], "x");
        assert_eq!(r.scores["x"], f64::INFINITY);
    }

    #[test]
    fn matches_closed_form() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y = vec![1.0, 3.0, 2.0, 4.0];
        // r = 0.8 for this pair: F = 0.64 / 0.36 * 2
        let r = select_k_best_scores(&table(&[("x", x)], y), "y").unwrap();
        assert!((r.scores["x"] - 0.64 / 0.36 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_feature_scores_zero() {
        let t = table(
            &[("c", vec![2.0; 4]), ("x", vec![1.0, 2.0, 4.0, 3.0])],
            vec![1.0, 2.0, 3.0, 5.0],
        );
        let r = select_k_best_scores(&t, "y").unwrap();
        assert_eq!(r.scores["c"], 0.0);
        assert_eq!(r.metadata["zero_variance_features"], json!(["c"]));
    }

    #[test]
    fn too_few_samples() {
        let t = table(&[("x", vec![1.0, 2.0])], vec![1.0, 2.0]);
        assert!(select_k_best_scores(&t, "y").is_err());
    }
}
