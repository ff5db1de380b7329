//! MAPE and k-fold cross-validation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::FeatureTable;
use crate::error::{Error, Result, ResultExt};
use crate::models::{train, ModelSpec};
use crate::rng;

/// Mean absolute percentage error, in percent.
///
/// A zero ground-truth value makes the metric undefined and is rejected.
pub fn mape(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    if y_true.is_empty() {
        return Err(Error::Empty("MAPE of an empty vector"));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            actual: y_pred.len(),
        });
    }
    let mut total = 0.0;
    for (i, (t, p)) in y_true.iter().zip(y_pred).enumerate() {
        if *t == 0.0 {
            return Err(Error::ZeroTarget(i));
        }
        total += ((t - p) / t).abs();
    }
    Ok(100.0 * total / y_true.len() as f64)
}

/// Per-sample fold index. Samples are shuffled by the stream
/// `(seed, "kfold", 0)` and dealt into `k` contiguous folds; the first
/// `n % k` folds hold one extra sample.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 || k > n {
        return Err(Error::invalid(format!("k must satisfy 2 <= k <= n (k={k}, n={n})")));
    }
    let order = rng::shuffled_indices(seed, "kfold", 0, n);
    let (base, extra) = (n / k, n % k);
    let mut assignment = vec![0; n];
    let mut pos = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for &sample in &order[pos..pos + size] {
            assignment[sample] = fold;
        }
        pos += size;
    }
    Ok(assignment)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    /// MAPE (%) on each held-out fold, in fold order.
    pub fold_scores: Vec<f64>,
    pub mean_mape: f64,
    pub fold_assignments: Vec<usize>,
}

impl CvReport {
    /// Fixed-width per-fold table for terminal output.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:>6}  {:>12}\n", "fold", "MAPE %");
        for (i, s) in self.fold_scores.iter().enumerate() {
            out.push_str(&format!("{:>6}  {:>12.4}\n", i + 1, s));
        }
        out.push_str(&format!("{:>6}  {:>12.4}\n", "mean", self.mean_mape));
        out
    }
}

/// Trains on each fold's complement and scores MAPE on the fold.
pub fn cross_validate(spec: &ModelSpec, table: &FeatureTable, target: &str, k: usize, seed: u64) -> Result<CvReport> {
    let y = table.target(target)?;
    let assignment = kfold_split(table.n_samples(), k, seed)?;
    let fold_scores = (0..k)
        .into_par_iter()
        .map(|fold| {
            let (test, train_idx): (Vec<usize>, Vec<usize>) =
                (0..table.n_samples()).partition(|&i| assignment[i] == fold);
            let model = train(spec, &table.select_rows(&train_idx)?, target)?;
            let preds = test
                .iter()
                .map(|&i| model.predict(table.row(i)))
                .collect::<Result<Vec<_>>>()?;
            let truth: Vec<f64> = test.iter().map(|&i| y[i]).collect();
            mape(&truth, &preds)
        })
        .enumerate()
        .map(|(fold, r)| r.context(|| format!("fold {}", fold + 1)))
        .collect::<Result<Vec<_>>>()?;
    let mean_mape = fold_scores.iter().sum::<f64>() / k as f64;
    Ok(CvReport {
        k,
        seed,
        fold_scores,
        mean_mape,
        fold_assignments: assignment,
    })
}
