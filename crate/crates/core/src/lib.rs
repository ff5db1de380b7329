//! Tree-based regression with explainability-driven feature pruning.
//!
//! The crate trains CART trees, random forests and gradient-boosted
//! ensembles on tabular data, attributes predictions to features with
//! permutation importance and Shapley values, and retrains on the
//! top-ranked feature subsets to find a smaller, more accurate model.
//!
//! Module map:
//!
//! - [`data`]: CSV feature tables, time-series records, box-plot feature extraction.
//! - [`models`]: decision tree, random forest and gradient boosting regressors.
//! - [`eval`]: MAPE and k-fold cross-validation.
//! - [`explain`]: permutation importance, Shapley values, univariate F-scores.
//! - [`pipeline`]: rank-and-retrain sweeps, partial-data intervals, synthetic benchmarks.
//! - [`cli`]: the config-driven `prunekit` command line front end.
//! - [`report`]: JSON/CSV/SVG artifact writers.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod explain;
pub mod models;
pub mod pipeline;
pub mod report;
pub mod rng;

pub use data::{BoxPlotSummary, FeatureTable, TimeSeriesRecord};
pub use error::{Error, Result};
pub use eval::{cross_validate, kfold_split, mape, CvReport};
pub use explain::{ImportanceReport, Method, ShapleyExplanation};
pub use models::{Model, ModelKind, ModelSpec, Predict};
pub use pipeline::{IntervalResult, SweepResult, SyntheticSpec};
