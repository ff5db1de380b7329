use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named feature matrix plus named target columns.
///
/// Rows are samples. Every cell is finite, feature names are unique and
/// every target vector has one entry per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    feature_names: Vec<String>,
    rows: Vec<Vec<f64>>,
    targets: BTreeMap<String, Vec<f64>>,
}

impl FeatureTable {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, targets: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("feature table has no rows"));
        }
        let mut seen = HashSet::new();
        for name in feature_names.iter().chain(targets.keys()) {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateHeader(name.clone()));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != feature_names.len() {
                return Err(Error::DimensionMismatch {
                    expected: feature_names.len(),
                    actual: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "row {}, feature {:?}",
                    i + 1,
                    feature_names[j]
                )));
            }
        }
        for (name, ys) in &targets {
            if ys.len() != rows.len() {
                return Err(Error::DimensionMismatch {
                    expected: rows.len(),
                    actual: ys.len(),
                });
            }
            if ys.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("target {name:?}")));
            }
        }
        Ok(Self {
            feature_names,
            rows,
            targets,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn targets(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.targets
    }

    pub fn n_samples(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn target(&self, name: &str) -> Result<&[f64]> {
        self.targets
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownTarget(name.to_string()))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Sub-table with the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Empty("row selection"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.rows.len()) {
            return Err(Error::invalid(format!(
                "row index {bad} out of range for {} rows",
                self.rows.len()
            )));
        }
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let targets = self
            .targets
            .iter()
            .map(|(k, ys)| (k.clone(), indices.iter().map(|&i| ys[i]).collect()))
            .collect();
        Ok(Self {
            feature_names: self.feature_names.clone(),
            rows,
            targets,
        })
    }

    /// Projection onto the named features, in the order given.
    pub fn select_features<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let idx = names
            .iter()
            .map(|n| {
                self.feature_index(n.as_ref())
                    .ok_or_else(|| Error::invalid(format!("unknown feature {:?}", n.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.select_feature_indices(&idx)
    }

    pub fn select_feature_indices(&self, idx: &[usize]) -> Result<Self> {
        let feature_names = idx.iter().map(|&j| self.feature_names[j].clone()).collect();
        let rows = self.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect();
        Self::new(feature_names, rows, self.targets.clone())
    }

    /// Parses a CSV document; every column not listed in `target_columns`
    /// becomes a feature, in header order.
    pub fn from_csv_reader<R: Read, S: AsRef<str>>(reader: R, target_columns: &[S]) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut seen = HashSet::new();
        for h in &header {
            if !seen.insert(h.as_str()) {
                return Err(Error::DuplicateHeader(h.clone()));
            }
        }
        let mut target_pos = Vec::with_capacity(target_columns.len());
        for t in target_columns {
            let t = t.as_ref();
            let pos = header
                .iter()
                .position(|h| h == t)
                .ok_or_else(|| Error::UnknownTarget(t.to_string()))?;
            target_pos.push((t.to_string(), pos));
        }
        let is_target: HashSet<usize> = target_pos.iter().map(|&(_, p)| p).collect();
        let feature_pos: Vec<usize> = (0..header.len()).filter(|j| !is_target.contains(j)).collect();

        let mut rows = Vec::new();
        let mut target_vals: Vec<Vec<f64>> = vec![Vec::new(); target_pos.len()];
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            let parse = |j: usize| -> Result<f64> {
                let raw = record.get(j).unwrap_or("").trim();
                match raw.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    Ok(_) => Err(Error::NonFinite(format!("row {}, column {:?}", r + 1, header[j]))),
                    Err(_) => Err(Error::Parse {
                        row: r + 1,
                        column: header[j].clone(),
                        value: raw.to_string(),
                    }),
                }
            };
            rows.push(feature_pos.iter().map(|&j| parse(j)).collect::<Result<Vec<_>>>()?);
            for (t, &(_, p)) in target_pos.iter().enumerate() {
                target_vals[t].push(parse(p)?);
            }
        }
        let feature_names = feature_pos.iter().map(|&j| header[j].clone()).collect();
        let targets = target_pos.into_iter().map(|(name, _)| name).zip(target_vals).collect();
        Self::new(feature_names, rows, targets)
    }

    /// Writes features followed by target columns (sorted by name).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.feature_names.iter().chain(self.targets.keys()))?;
        for (i, row) in self.rows.iter().enumerate() {
            let cells = row
                .iter()
                .copied()
                .chain(self.targets.values().map(|ys| ys[i]))
                .map(|v| v.to_string());
            w.write_record(cells)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Loads a CSV feature table from disk.
pub fn load_feature_table<S: AsRef<str>>(path: impl AsRef<Path>, target_columns: &[S]) -> Result<FeatureTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    FeatureTable::from_csv_reader(file, target_columns).map_err(|e| e.context(path.display().to_string()))
}
