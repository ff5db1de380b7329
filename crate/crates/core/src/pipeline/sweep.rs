use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{rank_features, AttributionSettings};
use crate::data::FeatureTable;
use crate::error::{Error, Result};
use crate::eval::{cross_validate, CvReport};
use crate::explain::{ImportanceReport, Method};
use crate::models::ModelSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Percentage of top-ranked features kept.
    pub p: f64,
    /// Top-ranked features kept at this `p`, in rank order.
    pub selected_features: Vec<String>,
    pub cv: CvReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub method: Method,
    pub grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub best_p: f64,
    pub best_features: Vec<String>,
    /// Cross-validation on all features (`p = 100`).
    pub baseline_cv: CvReport,
    pub ranking: ImportanceReport,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl SweepResult {
    pub fn best_point(&self) -> &SweepPoint {
        self.points
            .iter()
            .find(|pt| pt.p == self.best_p)
            .expect("best_p is on the grid")
    }

    /// `p,n_features,mean_mape,fold_1..fold_k` in grid order.
    pub fn to_csv_string(&self) -> String {
        let k = self.baseline_cv.k;
        let mut out = String::from("p,n_features,mean_mape");
        for f in 1..=k {
            out.push_str(&format!(",fold_{f}"));
        }
        out.push('\n');
        for pt in &self.points {
            out.push_str(&format!("{},{},{}", pt.p, pt.selected_features.len(), pt.cv.mean_mape));
            for s in &pt.cv.fold_scores {
                out.push_str(&format!(",{s}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Number of features kept at `p` percent of `n`: `p/100 * n` rounded half
/// up, at least 1.
pub fn feature_count(p: f64, n: usize) -> usize {
    ((p * n as f64 / 100.0 + 0.5).floor() as usize).clamp(1, n.max(1))
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if let Some(p) = grid.iter().find(|&&p| !(p > 0.0 && p <= 100.0)) {
        return Err(Error::invalid(format!("grid value {p} outside (0, 100]")));
    }
    if !grid.contains(&100.0) {
        return Err(Error::invalid("grid must contain 100 (the all-features baseline)"));
    }
    let mut seen = HashSet::new();
    if let Some(p) = grid.iter().find(|p| !seen.insert(p.to_bits())) {
        return Err(Error::invalid(format!("duplicate grid value {p}")));
    }
    Ok(())
}

/// Ranks features once, then cross-validates a fresh model on the top-p%
/// subset for every `p` in `grid`. All points share the fold assignment
/// given by `seed`; selected columns keep the table's column order.
#[allow(clippy::too_many_arguments)]
pub fn feature_sweep(
    spec: &ModelSpec,
    table: &FeatureTable,
    target: &str,
    method: Method,
    grid: &[f64],
    k: usize,
    settings: &AttributionSettings,
    seed: u64,
) -> Result<SweepResult> {
    validate_grid(grid)?;
    let ranking = rank_features(spec, table, target, method, settings, seed)?;
    let n = table.n_features();

    let points = grid
        .par_iter()
        .map(|&p| -> Result<SweepPoint> {
            let selected = ranking.top(feature_count(p, n)).to_vec();
            let keep: HashSet<&str> = selected.iter().map(String::as_str).collect();
            let columns: Vec<usize> = (0..n)
                .filter(|&j| keep.contains(table.feature_names()[j].as_str()))
                .collect();
            let projected = table.select_feature_indices(&columns)?;
            let cv = cross_validate(spec, &projected, target, k, seed)?;
            Ok(SweepPoint {
                p,
                selected_features: selected,
                cv,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let best = points
        .iter()
        .min_by(|a, b| {
            a.cv.mean_mape
                .total_cmp(&b.cv.mean_mape)
                .then(a.selected_features.len().cmp(&b.selected_features.len()))
                .then(a.p.total_cmp(&b.p))
        })
        .expect("grid is non-empty");
    let baseline_cv = points
        .iter()
        .find(|pt| pt.p == 100.0)
        .expect("grid contains 100")
        .cv
        .clone();
    let metadata = BTreeMap::from([
        ("model".to_string(), json!(spec.kind.name())),
        ("k".to_string(), json!(k)),
        ("seed".to_string(), json!(seed)),
        ("n_features".to_string(), json!(n)),
        (
            "feature_count_rule".to_string(),
            json!("max(1, round_half_up(p / 100 * n_features))"),
        ),
        (
            "folds".to_string(),
            json!("all points share the fold assignment of the sweep seed"),
        ),
    ]);
    Ok(SweepResult {
        method,
        grid: grid.to_vec(),
        best_p: best.p,
        best_features: best.selected_features.clone(),
        points,
        baseline_cv,
        ranking,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{generate_synthetic, SyntheticSpec};

    #[test]
    fn counts() {
        assert_eq!(feature_count(20.0, 30), 6);
        assert_eq!(feature_count(15.0, 10), 2);
        assert_eq!(feature_count(1.0, 10), 1);
        assert_eq!(feature_count(100.0, 7), 7);
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[10.0, 50.0]).is_err());
        assert!(validate_grid(&[0.0, 100.0]).is_err());
        assert!(validate_grid(&[100.0, 100.0]).is_err());
        assert!(validate_grid(&[10.0, 100.0]).is_ok());
    }

    fn small_table() -> FeatureTable {
        generate_synthetic(&SyntheticSpec {
            n_samples: 40,
            relevant: vec![3.0, 1.0],
            n_irrelevant: 3,
            noise_sigma: 0.1,
            seed: 2,
        })
        .unwrap()
    }

    #[test]
    fn baseline_only_grid() {
        let t = small_table();
        let spec = ModelSpec::decision_tree();
        let s = feature_sweep(&spec, &t, "y", Method::SelectKBest, &[100.0], 5, &Default::default(), 1).unwrap();
        assert_eq!(s.best_p, 100.0);
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.baseline_cv, cross_validate(&spec, &t, "y", 5, 1).unwrap());
    }

    #[test]
    fn nested_prefixes_and_best_not_worse() {
        let t = small_table();
        let grid: Vec<f64> = (1..=10).map(|i| i as f64 * 10.0).collect();
        let s = feature_sweep(
            &ModelSpec::decision_tree(),
            &t,
            "y",
            Method::Permutation,
            &grid,
            5,
            &Default::default(),
            3,
        )
        .unwrap();
        for w in s.points.windows(2) {
            assert!(w[1].selected_features.starts_with(&w[0].selected_features));
        }
        assert!(s.best_point().cv.mean_mape <= s.baseline_cv.mean_mape);
        let csv = s.to_csv_string();
        assert_eq!(csv.lines().count(), 11);
        assert!(csv.starts_with("p,n_features,mean_mape,fold_1,"));
    }
}
