use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::FeatureOptions;
use crate::error::{Error, Result};
use crate::explain::Method;
use crate::models::ModelSpec;
use crate::pipeline::{AttributionSettings, SeriesSpec, SyntheticSpec};
use crate::report::sha256_hex;

/// Where the data comes from. Exactly one source per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSource {
    FeatureCsv { path: PathBuf, targets: Vec<String> },
    TimeseriesDir { path: PathBuf },
    Synthetic(SyntheticSpec),
    SyntheticSeries(SeriesSpec),
}

impl InputSource {
    pub fn is_series(&self) -> bool {
        matches!(
            self,
            InputSource::TimeseriesDir { .. } | InputSource::SyntheticSeries(_)
        )
    }
}

fn default_model() -> ModelSpec {
    ModelSpec::gradient_boosting()
}

fn default_methods() -> Vec<String> {
    Method::ALL.iter().map(|m| m.as_str().to_string()).collect()
}

fn default_grid() -> Vec<f64> {
    (1..=10).map(|i| f64::from(i) * 10.0).collect()
}

fn default_fractions() -> Vec<f64> {
    (1..=10).map(|i| f64::from(i) / 10.0).collect()
}

fn default_k() -> usize {
    5
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("prunekit-out")
}

fn default_true() -> bool {
    true
}

/// A run configuration, read from a single JSON document.
///
/// Relative paths are resolved against the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputSource,
    /// Defaults to the first listed target column, or the synthetic target.
    #[serde(default)]
    pub target: Option<String>,
    #[serde(default = "default_model")]
    pub model: ModelSpec,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default = "default_fractions")]
    pub fractions: Vec<f64>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub attribution: AttributionSettings,
    #[serde(default = "default_true")]
    pub include_dc: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!("k must be >= 2, got {}", self.k)));
        }
        self.parsed_methods()?;
        if self.grid.iter().any(|&p| !(p > 0.0 && p <= 100.0)) {
            return Err(Error::Config("grid values must lie in (0, 100]".into()));
        }
        if !self.grid.contains(&100.0) {
            return Err(Error::Config(
                "grid must contain 100 (the all-features baseline)".into(),
            ));
        }
        if self.fractions.is_empty()
            || self.fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0))
            || self.fractions.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Config(
                "fractions must be strictly increasing values in (0, 1]".into(),
            ));
        }
        if let InputSource::FeatureCsv { targets, .. } = &self.input {
            if targets.is_empty() {
                return Err(Error::Config(
                    "feature_csv input needs at least one target column".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn parsed_methods(&self) -> Result<Vec<Method>> {
        if self.methods.is_empty() {
            return Err(Error::Config("methods must not be empty".into()));
        }
        self.methods.iter().map(|m| m.parse()).collect()
    }

    pub fn target_name(&self) -> String {
        if let Some(t) = &self.target {
            return t.clone();
        }
        match &self.input {
            InputSource::FeatureCsv { targets, .. } => targets[0].clone(),
            InputSource::Synthetic(_) => SyntheticSpec::TARGET.to_string(),
            InputSource::SyntheticSeries(_) => SeriesSpec::TARGET.to_string(),
            // resolved against the records once they are loaded
            InputSource::TimeseriesDir { .. } => String::new(),
        }
    }

    pub fn feature_options(&self) -> FeatureOptions {
        FeatureOptions {
            include_dc: self.include_dc,
        }
    }
}

/// A validated config plus what is needed to resolve paths and stamp
/// provenance.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    /// SHA-256 of the config file bytes.
    pub hash: String,
    pub base_dir: PathBuf,
    pub path: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let text =
            String::from_utf8(bytes.clone()).map_err(|_| Error::Config(format!("{} is not UTF-8", path.display())))?;
        let config = RunConfig::from_json(&text).map_err(|e| e.context(path.display().to_string()))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self {
            config,
            hash: sha256_hex(&bytes),
            base_dir,
            path: path.to_path_buf(),
        })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(
            r#"{"input": {"synthetic": {"n_samples": 20, "relevant": [1.0], "n_irrelevant": 2, "noise_sigma": 0.0}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.k, 5);
        assert_eq!(cfg.grid.len(), 10);
        assert_eq!(cfg.parsed_methods().unwrap(), Method::ALL);
        assert_eq!(cfg.target_name(), "y");
        assert_eq!(cfg.model, ModelSpec::gradient_boosting());
    }

    fn with(extra: &str) -> Result<RunConfig> {
        RunConfig::from_json(&format!(
            r#"{{"input": {{"feature_csv": {{"path": "x.csv", "targets": ["Ra"]}}}}{extra}}}"#
        ))
    }

    #[test]
    fn validation_errors() {
        assert!(with("").is_ok());
        assert!(matches!(with(r#", "k": 1"#), Err(Error::Config(_))));
        let err = with(r#", "methods": ["lime"]"#).unwrap_err().to_string();
        assert!(err.contains("permutation") && err.contains("select_k_best"), "{err}");
        assert!(with(r#", "grid": [10, 50]"#).is_err());
        assert!(with(r#", "fractions": [0.0, 1.0]"#).is_err());
        assert!(with(r#", "bogus": 1"#).is_err());
        assert!(RunConfig::from_json(r#"{"input": {"feature_csv": {"path": "x", "targets": []}}}"#).is_err());
        assert!(RunConfig::from_json(
            r#"{"input": {"feature_csv": {"path": "x", "targets": ["a"]}, "timeseries_dir": {"path": "y"}}}"#
        )
        .is_err());
    }
}
