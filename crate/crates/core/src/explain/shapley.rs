//! Shapley value attribution.
//!
//! The value of a coalition `S` of features is the model's expected
//! prediction when only the features in `S` are known. Two value functions
//! are offered:
//!
//! - [`ValueFunction::Marginalize`]: absent features are filled in from each
//!   background row and the predictions averaged (interventional
//!   expectation). No retraining; exact enumeration satisfies efficiency to
//!   rounding error.
//! - [`ValueFunction::Retrain`]: a fresh model of the given spec is fitted on
//!   the background rows restricted to `S`, and its prediction is the value.
//!   Every coalition needs its own model, so this is limited to
//!   [`RETRAIN_FEATURE_LIMIT`] features.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{ImportanceReport, Method};
use crate::data::FeatureTable;
use crate::error::{Error, Result};
use crate::models::{mean_of, Fitted, ModelSpec, Predict};
use crate::rng;

pub const EXACT_FEATURE_LIMIT: usize = 20;
pub const RETRAIN_FEATURE_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Marginalize,
    Retrain,
}

#[derive(Debug, Clone, Copy)]
pub enum ValueFunction<'a> {
    Marginalize,
    Retrain { spec: &'a ModelSpec, target: &'a str },
}

impl ValueFunction<'_> {
    pub fn strategy(&self) -> Strategy {
        match self {
            ValueFunction::Marginalize => Strategy::Marginalize,
            ValueFunction::Retrain { .. } => Strategy::Retrain,
        }
    }
}

/// Per-row Shapley values for a set of explained rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapleyExplanation {
    pub strategy: Strategy,
    pub explained_rows: Vec<usize>,
    /// `phi[r][i]`: contribution of feature `i` to explained row `r`.
    pub phi: Vec<Vec<f64>>,
    /// Value of the empty coalition.
    pub baseline: f64,
    /// Value of the full coalition for each explained row.
    pub predictions: Vec<f64>,
    pub background_size: usize,
    /// `None` for exact enumeration.
    pub n_permutations: Option<usize>,
}

enum Evaluator<'a, P> {
    Marginal {
        model: &'a P,
        background: Vec<&'a [f64]>,
    },
    /// One fitted model per coalition bitmask.
    Retrained {
        models: Vec<Fitted>,
        n_rows: usize,
    },
}

impl<'a, P: Predict + Sync> Evaluator<'a, P> {
    fn new(model: &'a P, table: &'a FeatureTable, background: &[usize], value_fn: ValueFunction<'_>) -> Result<Self> {
        if background.is_empty() {
            return Err(Error::Empty("Shapley background set"));
        }
        check_rows(table, background)?;
        match value_fn {
            ValueFunction::Marginalize => {
                if model.input_len() > table.n_features() {
                    return Err(Error::FeatureMismatch);
                }
                Ok(Evaluator::Marginal {
                    model,
                    background: background.iter().map(|&i| table.row(i)).collect(),
                })
            }
            ValueFunction::Retrain { spec, target } => {
                let n = table.n_features();
                if n > RETRAIN_FEATURE_LIMIT {
                    return Err(Error::TooManyFeatures {
                        limit: RETRAIN_FEATURE_LIMIT,
                        actual: n,
                    });
                }
                let train = table.select_rows(background)?;
                let y = train.target(target)?;
                let models = (0..1usize << n)
                    .into_par_iter()
                    .map(|mask| {
                        let rows: Vec<Vec<f64>> =
                            train.rows().iter().map(|r| subset(r, |j| mask >> j & 1 == 1)).collect();
                        spec.fit(&rows, y)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Evaluator::Retrained {
                    models,
                    n_rows: background.len(),
                })
            }
        }
    }

    fn background_size(&self) -> usize {
        match self {
            Evaluator::Marginal { background, .. } => background.len(),
            Evaluator::Retrained { n_rows, .. } => *n_rows,
        }
    }

    fn value(&self, present: &[bool], x: &[f64]) -> Result<f64> {
        match self {
            Evaluator::Marginal { model, background } => {
                let mut z = vec![0.0; x.len()];
                let preds = background
                    .iter()
                    .map(|b| {
                        for (j, zj) in z.iter_mut().enumerate() {
                            *zj = if present[j] { x[j] } else { b[j] };
                        }
                        model.predict_row(&z)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(mean_of(preds.iter().copied()))
            }
            Evaluator::Retrained { models, .. } => {
                let mask = present
                    .iter()
                    .enumerate()
                    .fold(0usize, |m, (j, &p)| m | (usize::from(p) << j));
                models[mask].predict(&subset(x, |j| present[j]))
            }
        }
    }
}

fn subset(row: &[f64], keep: impl Fn(usize) -> bool) -> Vec<f64> {
    row.iter()
        .enumerate()
        .filter(|&(j, _)| keep(j))
        .map(|(_, &v)| v)
        .collect()
}

fn check_rows(table: &FeatureTable, rows: &[usize]) -> Result<()> {
    match rows.iter().find(|&&i| i >= table.n_samples()) {
        Some(bad) => Err(Error::invalid(format!("row index {bad} out of range"))),
        None => Ok(()),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact Shapley values by enumerating all `2^n` coalitions per row.
///
/// `phi_i = sum over S not containing i of |S|!(n-|S|-1)!/n! * (v(S+i) - v(S))`.
pub fn shapley_exact<P: Predict + Sync>(
    model: &P,
    table: &FeatureTable,
    explain_rows: &[usize],
    background: &[usize],
    value_fn: ValueFunction<'_>,
) -> Result<ShapleyExplanation> {
    let n = table.n_features();
    if n > EXACT_FEATURE_LIMIT {
        return Err(Error::TooManyFeatures {
            limit: EXACT_FEATURE_LIMIT,
            actual: n,
        });
    }
    if explain_rows.is_empty() {
        return Err(Error::Empty("no rows to explain"));
    }
    check_rows(table, explain_rows)?;
    let eval = Evaluator::new(model, table, background, value_fn)?;
    // weight of a coalition of size s that excludes the feature: 1 / (n * C(n-1, s))
    let weights: Vec<f64> = (0..n).map(|s| 1.0 / (n as f64 * binomial(n - 1, s))).collect();

    let per_row = explain_rows
        .par_iter()
        .map(|&r| -> Result<(Vec<f64>, f64, f64)> {
            let x = table.row(r);
            let mut present = vec![false; n];
            let mut values = Vec::with_capacity(1 << n);
            for mask in 0..1usize << n {
                for (j, p) in present.iter_mut().enumerate() {
                    *p = mask >> j & 1 == 1;
                }
                values.push(eval.value(&present, x)?);
            }
            let phi = (0..n)
                .map(|i| {
                    let bit = 1usize << i;
                    (0..values.len())
                        .filter(|m| m & bit == 0)
                        .map(|m| weights[m.count_ones() as usize] * (values[m | bit] - values[m]))
                        .sum()
                })
                .collect();
            Ok((phi, values[0], values[values.len() - 1]))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(assemble(
        explain_rows,
        per_row,
        value_fn.strategy(),
        eval.background_size(),
        None,
    ))
}

/// Monte-Carlo Shapley values from `n_permutations` random feature orderings
/// per row: each feature is credited with its marginal contribution when
/// added after its predecessors in the ordering. Row `r` draws its orderings
/// from the stream `(seed, "shapley", r)`.
pub fn shapley_sampled<P: Predict + Sync>(
    model: &P,
    table: &FeatureTable,
    explain_rows: &[usize],
    background: &[usize],
    value_fn: ValueFunction<'_>,
    n_permutations: usize,
    seed: u64,
) -> Result<ShapleyExplanation> {
    if n_permutations == 0 {
        return Err(Error::invalid("n_permutations must be >= 1"));
    }
    if explain_rows.is_empty() {
        return Err(Error::Empty("no rows to explain"));
    }
    check_rows(table, explain_rows)?;
    let eval = Evaluator::new(model, table, background, value_fn)?;
    let n = table.n_features();

    let per_row = explain_rows
        .par_iter()
        .map(|&r| -> Result<(Vec<f64>, f64, f64)> {
            let x = table.row(r);
            let mut stream = rng::stream(seed, "shapley", r as u64);
            let mut cache: HashMap<Vec<bool>, f64> = HashMap::new();
            let mut value = |present: &Vec<bool>| -> Result<f64> {
                if let Some(v) = cache.get(present) {
                    return Ok(*v);
                }
                let v = eval.value(present, x)?;
                cache.insert(present.clone(), v);
                Ok(v)
            };
            let empty = value(&vec![false; n])?;
            let full = value(&vec![true; n])?;
            let mut phi = vec![0.0; n];
            let mut order: Vec<usize> = (0..n).collect();
            let mut present = vec![false; n];
            for _ in 0..n_permutations {
                order.shuffle(&mut stream);
                present.fill(false);
                let mut prev = empty;
                for &j in &order {
                    present[j] = true;
                    let cur = value(&present)?;
                    phi[j] += cur - prev;
                    prev = cur;
                }
            }
            for p in &mut phi {
                *p /= n_permutations as f64;
            }
            Ok((phi, empty, full))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(assemble(
        explain_rows,
        per_row,
        value_fn.strategy(),
        eval.background_size(),
        Some(n_permutations),
    ))
}

fn assemble(
    rows: &[usize],
    per_row: Vec<(Vec<f64>, f64, f64)>,
    strategy: Strategy,
    background_size: usize,
    n_permutations: Option<usize>,
) -> ShapleyExplanation {
    let baseline = per_row[0].1;
    let (phi, predictions) = per_row.into_iter().map(|(p, _, f)| (p, f)).unzip();
    ShapleyExplanation {
        strategy,
        explained_rows: rows.to_vec(),
        phi,
        baseline,
        predictions,
        background_size,
        n_permutations,
    }
}

/// Global importance as the mean absolute Shapley value per feature.
pub fn shapley_global<S: AsRef<str>>(expl: &ShapleyExplanation, feature_names: &[S]) -> Result<ImportanceReport> {
    if expl.phi.is_empty() {
        return Err(Error::Empty("Shapley explanation has no rows"));
    }
    if let Some(row) = expl.phi.iter().find(|r| r.len() != feature_names.len()) {
        return Err(Error::DimensionMismatch {
            expected: feature_names.len(),
            actual: row.len(),
        });
    }
    let rows = expl.phi.len() as f64;
    let scores = feature_names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let total: f64 = expl.phi.iter().map(|r| r[i].abs()).sum();
            (name.as_ref().to_string(), total / rows)
        })
        .collect();
    let mut metadata = BTreeMap::from([
        ("aggregation".to_string(), json!("mean_abs")),
        ("strategy".to_string(), json!(expl.strategy)),
        ("background_size".to_string(), json!(expl.background_size)),
        ("n_explained".to_string(), json!(expl.phi.len())),
        ("baseline".to_string(), json!(expl.baseline)),
    ]);
    match expl.n_permutations {
        Some(m) => {
            metadata.insert("estimator".into(), json!("sampled"));
            metadata.insert("n_permutations".into(), json!(m));
        }
        None => {
            metadata.insert("estimator".into(), json!("exact"));
        }
    }
    Ok(ImportanceReport::new(Method::Shapley, scores, metadata))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{fit_tree, GbmModel, GbmParams, Tree, TreeParams};

    fn table(rows: Vec<Vec<f64>>) -> FeatureTable {
        let n = rows[0].len();
        let y = rows.iter().map(|r| 1.0 + r.iter().sum::<f64>()).collect();
        FeatureTable::new(
            (0..n).map(|i| format!("x{i}")).collect(),
            rows,
            BTreeMap::from([("y".to_string(), y)]),
        )
        .unwrap()
    }

    fn additive(stages: Vec<Tree>) -> GbmModel {
        GbmModel {
            f0: 0.0,
            stages,
            learning_rate: 1.0,
            params: GbmParams::default(),
            train_mse: vec![],
        }
    }

    fn grid_rows() -> Vec<Vec<f64>> {
        (0..12)
            .map(|i| vec![(i % 4) as f64, (i % 3) as f64, ((i * 7) % 5) as f64])
            .collect()
    }

    #[test]
    fn constant_model() {
        let t = table(grid_rows());
        let bg: Vec<usize> = (0..12).collect();
        let m = Tree::leaf(0.3);
        let e = shapley_exact(&m, &t, &[0, 5], &bg, ValueFunction::Marginalize).unwrap();
        assert_eq!(e.baseline, 0.3);
        assert!(e.phi.iter().flatten().all(|&p| p == 0.0));
        let s = shapley_sampled(&m, &t, &[0, 5], &bg, ValueFunction::Marginalize, 50, 1).unwrap();
        assert!(s.phi.iter().flatten().all(|&p| p == 0.0));
    }

    #[test]
    fn additive_model_closed_form() {
        let g1 = Tree::stump(0, 1.5, 2.0, 5.0);
        let g2 = Tree::stump(1, 0.5, -1.0, 4.0);
        let m = additive(vec![g1.clone(), g2.clone()]);
        let rows = grid_rows();
        let t = table(rows.clone());
        let bg: Vec<usize> = (0..12).collect();
        let e = shapley_exact(&m, &t, &[0, 3, 7], &bg, ValueFunction::Marginalize).unwrap();
        let mean = |g: &Tree| rows.iter().map(|b| g.predict(b).unwrap()).sum::<f64>() / rows.len() as f64;
        for (k, &r) in [0usize, 3, 7].iter().enumerate() {
            let x = &rows[r];
            assert!((e.phi[k][0] - (g1.predict(x).unwrap() - mean(&g1))).abs() < 1e-12);
            assert!((e.phi[k][1] - (g2.predict(x).unwrap() - mean(&g2))).abs() < 1e-12);
            assert_eq!(e.phi[k][2], 0.0);
        }
    }

    #[test]
    fn efficiency_for_a_fitted_tree() {
        let rows = grid_rows();
        let y: Vec<f64> = rows.iter().map(|r| r[0] * r[1] + r[2]).collect();
        let tree = fit_tree(&rows, &y, &TreeParams::unlimited()).unwrap();
        let t = table(rows);
        let bg: Vec<usize> = (0..12).collect();
        let e = shapley_exact(&tree, &t, &bg, &bg, ValueFunction::Marginalize).unwrap();
        for (phi, f) in e.phi.iter().zip(&e.predictions) {
            assert!((phi.iter().sum::<f64>() - (f - e.baseline)).abs() < 1e-9);
        }
    }

    #[test]
    fn retrain_strategy_is_efficient() {
        let t = table(grid_rows());
        let spec = ModelSpec::decision_tree();
        let bg: Vec<usize> = (0..12).collect();
        let vf = ValueFunction::Retrain {
            spec: &spec,
            target: "y",
        };
        let e = shapley_exact(&Tree::leaf(0.0), &t, &[1, 2], &bg, vf).unwrap();
        assert_eq!(e.strategy, Strategy::Retrain);
        let ys = t.target("y").unwrap();
        assert!((e.baseline - ys.iter().sum::<f64>() / 12.0).abs() < 1e-12);
        for (phi, f) in e.phi.iter().zip(&e.predictions) {
            assert!((phi.iter().sum::<f64>() - (f - e.baseline)).abs() < 1e-9);
        }
    }

    #[test]
    fn guards() {
        let t = table(grid_rows());
        let m = Tree::leaf(1.0);
        assert!(shapley_exact(&m, &t, &[0], &[], ValueFunction::Marginalize).is_err());
        assert!(shapley_exact(&m, &t, &[], &[0], ValueFunction::Marginalize).is_err());
        assert!(shapley_exact(&m, &t, &[99], &[0], ValueFunction::Marginalize).is_err());
        assert!(shapley_sampled(&m, &t, &[0], &[0], ValueFunction::Marginalize, 0, 0).is_err());
        let wide = table(vec![vec![1.0; 21]; 2]);
        assert!(matches!(
            shapley_exact(&m, &wide, &[0], &[0], ValueFunction::Marginalize),
            Err(Error::TooManyFeatures { limit: 20, actual: 21 })
        ));
        assert!(shapley_sampled(&m, &wide, &[0], &[0, 1], ValueFunction::Marginalize, 3, 0).is_ok());
    }

    #[test]
    fn sampled_is_deterministic() {
        let t = table(grid_rows());
        let m = additive(vec![Tree::stump(0, 1.5, 2.0, 5.0), Tree::stump(2, 2.5, 0.0, 1.0)]);
        let bg: Vec<usize> = (0..12).collect();
        let a = shapley_sampled(&m, &t, &[1, 4], &bg, ValueFunction::Marginalize, 40, 9).unwrap();
        let b = shapley_sampled(&m, &t, &[1, 4], &bg, ValueFunction::Marginalize, 40, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn global_aggregation() {
        let e = |phi: Vec<Vec<f64>>| ShapleyExplanation {
            strategy: Strategy::Marginalize,
            explained_rows: (0..phi.len()).collect(),
            predictions: vec![0.0; phi.len()],
            phi,
            baseline: 0.0,
            background_size: 1,
            n_permutations: None,
        };
        let r = shapley_global(&e(vec![vec![-2.0, 1.0]]), &["f1", "f2"]).unwrap();
        assert_eq!(r.scores["f1"], 2.0);
        assert_eq!(r.scores["f2"], 1.0);
        assert_eq!(r.rank, ["f1", "f2"]);
        let r = shapley_global(&e(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]), &["f1", "f2"]).unwrap();
        assert_eq!((r.scores["f1"], r.scores["f2"]), (1.0, 0.0));
        let r = shapley_global(&e(vec![vec![0.0; 3]]), &["c", "a", "b"]).unwrap();
        assert_eq!(r.rank, ["a", "b", "c"]);
        assert!(shapley_global(&e(vec![vec![0.0; 3]]), &["a"]).is_err());
    }
}
