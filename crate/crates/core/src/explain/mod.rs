//! Feature attribution: permutation importance, Shapley values and the
//! univariate F-statistic baseline, all reported as [`ImportanceReport`]s.

mod permutation;
mod shapley;
mod univariate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use permutation::{permutation_importance, permutation_order};
pub use shapley::{
    shapley_exact, shapley_global, shapley_sampled, ShapleyExplanation, Strategy, ValueFunction, EXACT_FEATURE_LIMIT,
    RETRAIN_FEATURE_LIMIT,
};
pub use univariate::select_k_best_scores;

use crate::error::{Error, Result};

/// Attribution method used to produce a ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Permutation,
    Shapley,
    SelectKBest,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Permutation, Method::Shapley, Method::SelectKBest];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Permutation => "permutation",
            Method::Shapley => "shapley",
            Method::SelectKBest => "select_k_best",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| {
            Error::Config(format!(
                "unknown method {s:?}; valid methods are permutation, shapley, select_k_best"
            ))
        })
    }
}

/// Per-feature scores from one attribution method and the derived ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub method: Method,
    #[serde(with = "score_map")]
    pub scores: BTreeMap<String, f64>,
    /// Feature names by descending score; equal scores are ordered by name.
    pub rank: Vec<String>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl ImportanceReport {
    pub fn new(method: Method, scores: BTreeMap<String, f64>, metadata: BTreeMap<String, serde_json::Value>) -> Self {
        let rank = rank_by_score(&scores);
        Self {
            method,
            scores,
            rank,
            metadata,
        }
    }

    /// The first `n` ranked features.
    pub fn top(&self, n: usize) -> &[String] {
        &self.rank[..n.min(self.rank.len())]
    }

    /// Two-column `feature,score` CSV in rank order.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("feature,score\n");
        for name in &self.rank {
            out.push_str(&format!("{},{}\n", csv_field(name), format_score(self.scores[name])));
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub(crate) fn format_score(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else {
        v.to_string()
    }
}

/// Descending by score, ties broken by ascending name.
pub fn rank_by_score(scores: &BTreeMap<String, f64>) -> Vec<String> {
    let mut names: Vec<&String> = scores.keys().collect();
    names.sort_by(|a, b| scores[*b].total_cmp(&scores[*a]).then_with(|| a.cmp(b)));
    names.into_iter().cloned().collect()
}

/// JSON has no infinity; `+inf` scores are written as the string `"inf"`.
mod score_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Score {
        Finite(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        let out: BTreeMap<&String, Score> = map
            .iter()
            .map(|(k, &v)| {
                let score = if v.is_finite() {
                    Score::Finite(v)
                } else {
                    Score::Text(super::format_score(v))
                };
                (k, score)
            })
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let raw = BTreeMap::<String, Score>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| match v {
                Score::Finite(x) => Ok((k, x)),
                Score::Text(t) if t == "inf" => Ok((k, f64::INFINITY)),
                Score::Text(t) => Err(serde::de::Error::custom(format!("invalid score {t:?}"))),
            })
            .collect()
    }
}
