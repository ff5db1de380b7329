//! Gradient boosting with squared-error loss.
//!
//! `F_0` is the mean target. Each stage fits a regression tree to the current
//! residuals `y - F_{m-1}(x)` (the negative gradient of squared error) and
//! adds it with step `learning_rate`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::tree::{check_training_input, fit_tree, mean_of, Tree, TreeParams};
use super::Predict;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbmParams {
    pub n_stages: usize,
    pub learning_rate: f64,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
}

impl Default for GbmParams {
    fn default() -> Self {
        Self {
            n_stages: 200,
            learning_rate: 0.05,
            max_depth: Some(3),
            min_samples_leaf: 1,
            min_samples_split: 2,
        }
    }
}

impl GbmParams {
    pub fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
            min_samples_split: self.min_samples_split,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    pub f0: f64,
    pub stages: Vec<Tree>,
    pub learning_rate: f64,
    pub params: GbmParams,
    /// Training MSE of `F_0, F_1, ..., F_M`.
    pub train_mse: Vec<f64>,
}

fn mse(y: &[f64], f: &[f64]) -> f64 {
    y.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64
}

pub fn fit_gbm(rows: &[Vec<f64>], y: &[f64], params: &GbmParams) -> Result<GbmModel> {
    check_training_input(rows, y)?;
    let alpha = params.learning_rate;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("learning_rate must lie in (0, 1], got {alpha}")));
    }
    let tree_params = params.tree_params();
    let f0 = mean_of(y.iter().copied());
    let mut current = vec![f0; y.len()];
    let mut train_mse = vec![mse(y, &current)];
    let mut stages = Vec::with_capacity(params.n_stages);
    for _ in 0..params.n_stages {
        let residuals: Vec<f64> = y.iter().zip(&current).map(|(a, f)| a - f).collect();
        let h = fit_tree(rows, &residuals, &tree_params)?;
        for (f, row) in current.iter_mut().zip(rows) {
            *f += alpha * h.predict(row)?;
        }
        train_mse.push(mse(y, &current));
        stages.push(h);
    }
    Ok(GbmModel {
        f0,
        stages,
        learning_rate: alpha,
        params: *params,
        train_mse,
    })
}

impl GbmModel {
    /// `F_0 + learning_rate * sum_m h_m(x)`, accumulated stage by stage in
    /// the same order as during training.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let mut f = self.f0;
        for h in &self.stages {
            f += self.learning_rate * h.predict(x)?;
        }
        Ok(f)
    }

    pub fn used_features(&self) -> BTreeSet<usize> {
        self.stages.iter().flat_map(Tree::used_features).collect()
    }
}

impl Predict for GbmModel {
    fn input_len(&self) -> usize {
        self.used_features().last().map_or(0, |f| f + 1)
    }

    fn predict_row(&self, x: &[f64]) -> Result<f64> {
        self.predict(x)
    }
}
