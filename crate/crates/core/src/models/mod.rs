//! Tree-based regressors behind a uniform train/predict contract.

mod forest;
mod gbm;
mod tree;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use forest::{fit_forest, FeaturesPerSplit, ForestModel, ForestParams};
pub use gbm::{fit_gbm, GbmModel, GbmParams};
pub(crate) use tree::mean_of;
pub use tree::{fit_tree, fit_tree_on, Node, Tree, TreeParams};

use crate::data::FeatureTable;
use crate::error::{Error, Result};

/// Anything that maps a feature vector to a real prediction.
pub trait Predict {
    /// Minimum input length the predictor accepts.
    fn input_len(&self) -> usize;

    fn predict_row(&self, x: &[f64]) -> Result<f64>;
}

impl<P: Predict + ?Sized> Predict for &P {
    fn input_len(&self) -> usize {
        (**self).input_len()
    }

    fn predict_row(&self, x: &[f64]) -> Result<f64> {
        (**self).predict_row(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    DecisionTree(TreeParams),
    RandomForest(ForestParams),
    GradientBoosting(GbmParams),
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::DecisionTree(_) => "decision_tree",
            ModelKind::RandomForest(_) => "random_forest",
            ModelKind::GradientBoosting(_) => "gradient_boosting",
        }
    }
}

/// Model family, its hyperparameters and the seed for any randomness.
///
/// Serialized flat, e.g. `{"kind": "gradient_boosting", "n_stages": 100, "seed": 1}`;
/// omitted hyperparameters take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub kind: ModelKind,
    #[serde(default)]
    pub seed: u64,
}

impl ModelSpec {
    pub fn decision_tree() -> Self {
        Self {
            kind: ModelKind::DecisionTree(TreeParams::default()),
            seed: 0,
        }
    }

    pub fn random_forest() -> Self {
        Self {
            kind: ModelKind::RandomForest(ForestParams::default()),
            seed: 0,
        }
    }

    pub fn gradient_boosting() -> Self {
        Self {
            kind: ModelKind::GradientBoosting(GbmParams::default()),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Fits on raw rows without feature names.
    pub fn fit(&self, rows: &[Vec<f64>], y: &[f64]) -> Result<Fitted> {
        Ok(match &self.kind {
            ModelKind::DecisionTree(p) => Fitted::DecisionTree {
                tree: fit_tree(rows, y, p)?,
            },
            ModelKind::RandomForest(p) => Fitted::RandomForest(fit_forest(rows, y, p, self.seed)?),
            ModelKind::GradientBoosting(p) => Fitted::GradientBoosting(fit_gbm(rows, y, p)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fitted {
    DecisionTree { tree: Tree },
    RandomForest(ForestModel),
    GradientBoosting(GbmModel),
}

impl Fitted {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        match self {
            Fitted::DecisionTree { tree: t } => t.predict(x),
            Fitted::RandomForest(f) => f.predict(x),
            Fitted::GradientBoosting(g) => g.predict(x),
        }
    }

    pub fn used_features(&self) -> BTreeSet<usize> {
        match self {
            Fitted::DecisionTree { tree: t } => t.used_features(),
            Fitted::RandomForest(f) => f.used_features(),
            Fitted::GradientBoosting(g) => g.used_features(),
        }
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A fitted regressor together with the feature names and target it was
/// trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub format_version: u32,
    pub feature_names: Vec<String>,
    pub target: String,
    pub spec: ModelSpec,
    pub fitted: Fitted,
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_names.len(),
                actual: x.len(),
            });
        }
        self.fitted.predict(x)
    }

    /// Predictions for every row; the table must carry the model's features
    /// in the model's order.
    pub fn predict_table(&self, table: &FeatureTable) -> Result<Vec<f64>> {
        if table.feature_names() != self.feature_names.as_slice() {
            return Err(Error::FeatureMismatch);
        }
        table.rows().iter().map(|r| self.fitted.predict(r)).collect()
    }

    /// Names of the features referenced by at least one split.
    pub fn used_features(&self) -> Vec<&str> {
        self.fitted
            .used_features()
            .into_iter()
            .map(|i| self.feature_names[i].as_str())
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Model = serde_json::from_str(text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }
}

impl Predict for Model {
    fn input_len(&self) -> usize {
        self.feature_names.len()
    }

    fn predict_row(&self, x: &[f64]) -> Result<f64> {
        self.predict(x)
    }
}

/// Fits `spec` on `table` against the named target.
pub fn train(spec: &ModelSpec, table: &FeatureTable, target: &str) -> Result<Model> {
    let y = table.target(target)?;
    let fitted = spec.fit(table.rows(), y)?;
    Ok(Model {
        format_version: MODEL_FORMAT_VERSION,
        feature_names: table.feature_names().to_vec(),
        target: target.to_string(),
        spec: spec.clone(),
        fitted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn table() -> FeatureTable {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, ((i * 3) % 7) as f64]).collect();
        let y = rows.iter().map(|r| 1.0 + r[0] * 0.5 + r[1]).collect();
        FeatureTable::new(vec!["a".into(), "b".into()], rows, BTreeMap::from([("y".into(), y)])).unwrap()
    }

    #[test]
    fn dispatch_and_errors() {
        let t = table().select_rows(&[0, 1]).unwrap();
        let m = train(&ModelSpec::decision_tree(), &t, "y").unwrap();
        assert!(matches!(m.fitted, Fitted::DecisionTree { .. }));
        assert_eq!(m.feature_names, ["a", "b"]);
        assert!(matches!(
            train(&ModelSpec::decision_tree(), &t, "Rxx"),
            Err(Error::UnknownTarget(_))
        ));
        assert!(matches!(m.predict(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn spec_json_shape() {
        let spec: ModelSpec =
            serde_json::from_str(r#"{"kind": "gradient_boosting", "n_stages": 7, "seed": 3}"#).unwrap();
        match spec.kind {
            ModelKind::GradientBoosting(p) => {
                assert_eq!(p.n_stages, 7);
                assert_eq!(p.learning_rate, 0.05);
            }
            _ => panic!(),
        }
        assert_eq!(spec.seed, 3);
        assert!(serde_json::from_str::<ModelSpec>(r#"{"kind": "svm"}"#).is_err());
        let rf: ModelSpec =
            serde_json::from_str(r#"{"kind": "random_forest", "features_per_split": {"count": 2}}"#).unwrap();
        assert!(matches!(
            rf.kind,
            ModelKind::RandomForest(ForestParams {
                features_per_split: FeaturesPerSplit::Count(2),
                ..
            })
        ));
        let back: ModelSpec = serde_json::from_str(&serde_json::to_string(&rf).unwrap()).unwrap();
        assert_eq!(back, rf);
    }

    #[test]
    fn deterministic_and_lossless_serialization() {
        let t = table();
        let probes = [[0.3, 2.2], [17.5, 0.0], [8.0, 6.5]];
        for spec in [
            ModelSpec::decision_tree(),
            ModelSpec::random_forest().with_seed(4),
            ModelSpec::gradient_boosting(),
        ] {
            let a = train(&spec, &t, "y").unwrap();
            let b = train(&spec, &t, "y").unwrap();
            assert_eq!(a, b);
            let back = Model::from_json(&a.to_json().unwrap()).unwrap();
            assert_eq!(back, a);
            for p in &probes {
                assert_eq!(a.predict(p).unwrap(), back.predict(p).unwrap());
            }
        }
    }

    #[test]
    fn unknown_format_version_rejected() {
        let m = train(&ModelSpec::decision_tree(), &table(), "y").unwrap();
        let json = m
            .to_json()
            .unwrap()
            .replace("\"format_version\": 1", "\"format_version\": 99");
        assert!(Model::from_json(&json).is_err());
    }
}
