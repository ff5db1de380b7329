//! The rank-and-retrain methodology: rank features with an attribution
//! method, retrain on top-p% subsets, keep the best subset. Also the
//! partial-data interval experiment and synthetic benchmark generators.

mod interval;
mod sweep;
mod synthetic;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use interval::{interval_experiment, IntervalResult};
pub use sweep::{feature_count, feature_sweep, SweepPoint, SweepResult};
pub use synthetic::{generate_synthetic, generate_synthetic_series, SeriesSpec, SyntheticSpec};

use crate::data::FeatureTable;
use crate::error::{Error, Result};
use crate::explain::{
    permutation_importance, select_k_best_scores, shapley_global, shapley_sampled, ImportanceReport, Method,
    ValueFunction,
};
use crate::models::{train, ModelSpec};
use crate::rng;

/// Knobs for the model-based attribution methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttributionSettings {
    /// Permutation repeats per feature.
    pub repeats: usize,
    /// Sampled orderings per explained row.
    pub shapley_permutations: usize,
    /// Training rows beyond this count are subsampled for the Shapley background.
    pub background_limit: usize,
}

impl Default for AttributionSettings {
    fn default() -> Self {
        Self {
            repeats: 10,
            shapley_permutations: 200,
            background_limit: 128,
        }
    }
}

/// Seeded 80/20 split: `(train, held_out)`, both in ascending row order.
pub fn holdout_split(n: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::invalid("a hold-out split needs at least 2 samples"));
    }
    let order = rng::shuffled_indices(seed, "holdout", 0, n);
    let n_test = ((n as f64 * 0.2).round() as usize).clamp(1, n - 1);
    let mut test = order[..n_test].to_vec();
    let mut train = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Ranks the table's features by `method`.
///
/// Model-based methods train `spec` on a seeded 80% split and attribute on
/// the held-out 20%; `select_k_best` scores the full table without a model.
pub fn rank_features(
    spec: &ModelSpec,
    table: &FeatureTable,
    target: &str,
    method: Method,
    settings: &AttributionSettings,
    seed: u64,
) -> Result<ImportanceReport> {
    if method == Method::SelectKBest {
        return select_k_best_scores(table, target);
    }
    table.target(target)?;
    let (train_idx, test_idx) = holdout_split(table.n_samples(), seed)?;
    let model = train(spec, &table.select_rows(&train_idx)?, target)?;
    let mut report = match method {
        Method::Permutation => {
            let held_out = table.select_rows(&test_idx)?;
            permutation_importance(&model, &held_out, target, settings.repeats, seed)?
        }
        Method::Shapley => {
            let background = if train_idx.len() > settings.background_limit {
                let mut pick = rng::shuffled_indices(seed, "background", 0, train_idx.len());
                pick.truncate(settings.background_limit);
                pick.sort_unstable();
                pick.into_iter().map(|i| train_idx[i]).collect()
            } else {
                train_idx.clone()
            };
            let expl = shapley_sampled(
                &model,
                table,
                &test_idx,
                &background,
                ValueFunction::Marginalize,
                settings.shapley_permutations,
                seed,
            )?;
            shapley_global(&expl, table.feature_names())?
        }
        Method::SelectKBest => unreachable!(),
    };
    report.metadata.extend(BTreeMap::from([
        ("n_train".to_string(), json!(train_idx.len())),
        ("n_held_out".to_string(), json!(test_idx.len())),
        ("model".to_string(), json!(spec.kind.name())),
        ("seed".to_string(), json!(seed)),
    ]));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holdout_shapes() {
        let (tr, te) = holdout_split(100, 3).unwrap();
        assert_eq!((tr.len(), te.len()), (80, 20));
        let mut all: Vec<usize> = tr.iter().chain(&te).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert_eq!(holdout_split(2, 0).unwrap().1.len(), 1);
        assert!(holdout_split(1, 0).is_err());
    }

    fn one_feature_table() -> FeatureTable {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 8) as f64, ((i * 3) % 5) as f64, ((i * 7) % 11) as f64])
            .collect();
        let y = rows.iter().map(|r| 5.0 + 2.0 * r[0]).collect();
        FeatureTable::new(
            vec!["a".into(), "b".into(), "c".into()],
            rows,
            BTreeMap::from([("y".into(), y)]),
        )
        .unwrap()
    }

    #[test]
    fn select_k_best_copy_ranks_first() {
        let t = one_feature_table();
        let r = rank_features(
            &ModelSpec::decision_tree(),
            &t,
            "y",
            Method::SelectKBest,
            &Default::default(),
            0,
        )
        .unwrap();
        assert_eq!(r.rank[0], "a");
    }

    #[test]
    fn model_methods_give_dummies_zero() {
        let t = one_feature_table();
        let spec = ModelSpec::decision_tree();
        for method in [Method::Permutation, Method::Shapley] {
            let r = rank_features(&spec, &t, "y", method, &Default::default(), 4).unwrap();
            assert_eq!(r.scores["b"], 0.0, "{method}");
            assert_eq!(r.scores["c"], 0.0, "{method}");
            assert_eq!(r.rank[0], "a");
            let again = rank_features(&spec, &t, "y", method, &Default::default(), 4).unwrap();
            assert_eq!(r, again);
        }
    }
}
