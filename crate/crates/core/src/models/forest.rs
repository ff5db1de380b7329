//! Bootstrap-aggregated regression trees.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{check_training_input, fit_tree_on, mean_of, Tree, TreeParams};
use super::Predict;
use crate::error::{Error, Result};
use crate::rng;

/// How many features each split may consider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeaturesPerSplit {
    All,
    /// `ceil(n_features / 3)`
    OneThird,
    Count(usize),
}

impl FeaturesPerSplit {
    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            FeaturesPerSplit::All => n_features,
            FeaturesPerSplit::OneThird => n_features.div_ceil(3),
            FeaturesPerSplit::Count(k) => k.min(n_features),
        }
        .max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub features_per_split: FeaturesPerSplit,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 200,
            features_per_split: FeaturesPerSplit::OneThird,
            bootstrap: true,
            max_depth: None,
            min_samples_leaf: 1,
            min_samples_split: 2,
        }
    }
}

impl ForestParams {
    pub fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
            min_samples_split: self.min_samples_split,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub params: ForestParams,
    pub seed: u64,
}

/// Tree `t` draws its bootstrap sample and split features from the stream
/// `(seed, "forest", t)`, so trees can be grown in any order or in parallel.
pub fn fit_forest(rows: &[Vec<f64>], y: &[f64], params: &ForestParams, seed: u64) -> Result<ForestModel> {
    let n_features = check_training_input(rows, y)?;
    if params.n_trees == 0 {
        return Err(Error::invalid("a forest needs at least one tree"));
    }
    let tree_params = params.tree_params();
    let k = params.features_per_split.resolve(n_features);
    let n = rows.len();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut stream = rng::stream(seed, "forest", t as u64);
            let samples: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| stream.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            fit_tree_on(rows, y, &samples, &tree_params, Some((k, &mut stream)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel {
        trees,
        params: *params,
        seed,
    })
}

impl ForestModel {
    /// Arithmetic mean of the per-tree predictions.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let preds = self.trees.iter().map(|t| t.predict(x)).collect::<Result<Vec<_>>>()?;
        Ok(mean_of(preds.iter().copied()))
    }

    pub fn used_features(&self) -> BTreeSet<usize> {
        self.trees.iter().flat_map(Tree::used_features).collect()
    }
}

impl Predict for ForestModel {
    fn input_len(&self) -> usize {
        self.used_features().last().map_or(0, |f| f + 1)
    }

    fn predict_row(&self, x: &[f64]) -> Result<f64> {
        self.predict(x)
    }
}
