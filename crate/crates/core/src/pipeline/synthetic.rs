//! Ground-truth generators standing in for real process data.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{FeatureTable, TimeSeriesRecord};
use crate::error::{Error, Result};
use crate::rng;

/// Linear benchmark: `y = 10 + sum_j coeff_j * rel_j + N(0, noise_sigma)`
/// with every feature drawn from U(1, 2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_samples: usize,
    /// One coefficient per relevant feature.
    pub relevant: Vec<f64>,
    pub n_irrelevant: usize,
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticSpec {
    pub const TARGET: &'static str = "y";

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples must be >= 1"));
        }
        if !self.relevant.iter().any(|&c| c != 0.0) || self.relevant.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("need at least one finite non-zero relevant coefficient"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("noise_sigma must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn relevant_names(&self) -> Vec<String> {
        (0..self.relevant.len()).map(|i| format!("rel_{i}")).collect()
    }
}

/// Columns `rel_0..` then `noise_0..`, target `"y"`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<FeatureTable> {
    spec.validate()?;
    let mut stream = rng::stream(spec.seed, "synthetic", 0);
    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::invalid(e.to_string()))?;
    let width = spec.relevant.len() + spec.n_irrelevant;
    let mut rows = Vec::with_capacity(spec.n_samples);
    let mut y = Vec::with_capacity(spec.n_samples);
    for _ in 0..spec.n_samples {
        let row: Vec<f64> = (0..width).map(|_| stream.gen_range(1.0..2.0)).collect();
        let signal: f64 = spec.relevant.iter().zip(&row).map(|(c, x)| c * x).sum();
        let eps = if spec.noise_sigma > 0.0 {
            noise.sample(&mut stream)
        } else {
            0.0
        };
        y.push(signal + 10.0 + eps);
        rows.push(row);
    }
    let names = spec
        .relevant_names()
        .into_iter()
        .chain((0..spec.n_irrelevant).map(|i| format!("noise_{i}")))
        .collect();
    FeatureTable::new(names, rows, BTreeMap::from([(SyntheticSpec::TARGET.to_string(), y)]))
}

/// Time-series benchmark whose quality signal sits in the start of each
/// series.
///
/// Each record has a latent quality `q ~ U(1, 2)` and target
/// `Ra = 10 + 2 q + N(0, noise_sigma)`. The first `informative_fraction` of
/// every channel oscillates with amplitude proportional to `q`; the rest is
/// low-level noise independent of `q`. Configuration parameters are random
/// and carry no signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesSpec {
    pub n_records: usize,
    pub channels: Vec<String>,
    pub min_len: usize,
    pub max_len: usize,
    pub informative_fraction: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        Self {
            n_records: 40,
            channels: vec!["fa".into(), "fz".into()],
            min_len: 200,
            max_len: 400,
            informative_fraction: 0.1,
            noise_sigma: 0.2,
            seed: 0,
        }
    }
}

impl SeriesSpec {
    pub const TARGET: &'static str = "Ra";

    fn validate(&self) -> Result<()> {
        if self.n_records == 0 || self.channels.is_empty() {
            return Err(Error::invalid("need at least one record and one channel"));
        }
        if self.min_len < 10 || self.max_len < self.min_len {
            return Err(Error::invalid("series lengths must satisfy 10 <= min_len <= max_len"));
        }
        if !(self.informative_fraction > 0.0 && self.informative_fraction <= 1.0) {
            return Err(Error::invalid("informative_fraction must lie in (0, 1]"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("noise_sigma must be finite and >= 0"));
        }
        Ok(())
    }
}

pub fn generate_synthetic_series(spec: &SeriesSpec) -> Result<Vec<TimeSeriesRecord>> {
    spec.validate()?;
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    (0..spec.n_records)
        .map(|i| {
            let mut stream = rng::stream(spec.seed, "synthetic_series", i as u64);
            let q: f64 = stream.gen_range(1.0..2.0);
            let mut channels = BTreeMap::new();
            for (c, name) in spec.channels.iter().enumerate() {
                let len = stream.gen_range(spec.min_len..=spec.max_len);
                let informative = ((spec.informative_fraction * len as f64).floor() as usize).max(1);
                let gain = 20.0 * (c + 1) as f64;
                let xs = (0..len)
                    .map(|t| {
                        if t < informative {
                            let phase = t as f64 * 0.7;
                            gain * q * (1.0 + 0.5 * phase.sin()) + 0.1 * unit.sample(&mut stream)
                        } else {
                            5.0 + unit.sample(&mut stream)
                        }
                    })
                    .collect();
                channels.insert(name.clone(), xs);
            }
            let config = BTreeMap::from([
                ("depth".to_string(), stream.gen_range(0.5..1.5)),
                ("speed".to_string(), stream.gen_range(100.0..200.0)),
            ]);
            let ra = 10.0 + 2.0 * q + spec.noise_sigma * unit.sample(&mut stream);
            TimeSeriesRecord::new(
                format!("rec_{i:04}"),
                channels,
                config,
                BTreeMap::from([(SeriesSpec::TARGET.to_string(), ra)]),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(relevant: Vec<f64>, n_irrelevant: usize, noise_sigma: f64) -> SyntheticSpec {
        SyntheticSpec {
            n_samples: 25,
            relevant,
            n_irrelevant,
            noise_sigma,
            seed: 11,
        }
    }

    #[test]
    fn noiseless_target_is_exact() {
        let t = generate_synthetic(&spec(vec![2.0], 0, 0.0)).unwrap();
        for (row, y) in t.rows().iter().zip(t.target("y").unwrap()) {
            assert_eq!(*y, 2.0 * row[0] + 10.0);
            assert!((1.0..2.0).contains(&row[0]));
        }
    }

    #[test]
    fn arity_and_determinism() {
        let s = spec(vec![1.0, 2.0, 3.0], 7, 0.5);
        let t = generate_synthetic(&s).unwrap();
        assert_eq!(t.n_features(), 10);
        assert_eq!(t.feature_names()[0], "rel_0");
        assert_eq!(t.feature_names()[3], "noise_0");
        assert_eq!(t, generate_synthetic(&s).unwrap());
    }

    #[test]
    fn invalid_specs() {
        assert!(generate_synthetic(&spec(vec![0.0], 2, 0.1)).is_err());
        assert!(generate_synthetic(&spec(vec![1.0], 2, -1.0)).is_err());
        assert!(generate_synthetic(&SyntheticSpec {
            n_samples: 0,
            ..spec(vec![1.0], 0, 0.0)
        })
        .is_err());
    }

    #[test]
    fn series_are_valid_and_deterministic() {
        let s = SeriesSpec {
            n_records: 5,
            ..SeriesSpec::default()
        };
        let a = generate_synthetic_series(&s).unwrap();
        assert_eq!(a, generate_synthetic_series(&s).unwrap());
        assert_eq!(a.len(), 5);
        for r in &a {
            assert_eq!(r.channels.keys().collect::<Vec<_>>(), ["fa", "fz"]);
            assert!(r.channels.values().all(|xs| (200..=400).contains(&xs.len())));
        }
    }
}
