use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ResultExt};

/// One experiment: variable-length sensor channels, machine configuration
/// and the measured quality targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub id: String,
    pub channels: BTreeMap<String, Vec<f64>>,
    pub config: BTreeMap<String, f64>,
    pub targets: BTreeMap<String, f64>,
}

impl TimeSeriesRecord {
    pub fn new(
        id: impl Into<String>,
        channels: BTreeMap<String, Vec<f64>>,
        config: BTreeMap<String, f64>,
        targets: BTreeMap<String, f64>,
    ) -> Result<Self> {
        let record = Self {
            id: id.into(),
            channels,
            config,
            targets,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, xs) in &self.channels {
            if xs.is_empty() {
                return Err(Error::Schema(format!(
                    "record {:?}: channel {name:?} is empty",
                    self.id
                )));
            }
            if xs.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("record {:?}, channel {name:?}", self.id)));
            }
        }
        for (name, v) in self.targets.iter().chain(self.config.iter()) {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("record {:?}, {name:?}", self.id)));
            }
        }
        Ok(())
    }
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    #[serde(default)]
    config: BTreeMap<String, f64>,
    targets: BTreeMap<String, f64>,
}

/// Keeps the first `ceil(fraction * len)` samples of every channel.
pub fn truncate_records(records: &[TimeSeriesRecord], fraction: f64) -> Result<Vec<TimeSeriesRecord>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("fraction must lie in (0, 1], got {fraction}")));
    }
    Ok(records
        .iter()
        .map(|r| {
            let channels = r
                .channels
                .iter()
                .map(|(name, xs)| {
                    let keep = ((fraction * xs.len() as f64).ceil() as usize).clamp(1, xs.len());
                    (name.clone(), xs[..keep].to_vec())
                })
                .collect();
            TimeSeriesRecord { channels, ..r.clone() }
        })
        .collect())
}

fn read_channel(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cell = line.trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(_) => return Err(Error::NonFinite(format!("{}, line {}", path.display(), i + 1))),
            // a single non-numeric first line is a column header
            Err(_) if i == 0 => {}
            Err(_) => {
                return Err(Error::Parse {
                    row: i + 1,
                    column: path.display().to_string(),
                    value: cell.to_string(),
                })
            }
        }
    }
    Ok(out)
}

fn load_record(dir: &Path, id: &str) -> Result<TimeSeriesRecord> {
    let meta_path = dir.join("meta.json");
    let meta_text = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: Meta = serde_json::from_str(&meta_text)?;
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(dir, e))?;
    entries.sort_by_key(|e| e.file_name());
    let mut channels = BTreeMap::new();
    for entry in entries {
        let path = entry.path();
        if path.extension().and_then(|s| s.to_str()) != Some("csv") {
            continue;
        }
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::Schema(format!("unreadable channel file name {}", path.display())))?
            .to_string();
        channels.insert(name, read_channel(&path)?);
    }
    if channels.is_empty() {
        return Err(Error::Schema("no channel CSV files".into()));
    }
    TimeSeriesRecord::new(id, channels, meta.config, meta.targets)
}

/// Loads `<root>/<record-id>/{<channel>.csv, meta.json}`; records are
/// returned sorted by id.
pub fn load_timeseries_dir(root: impl AsRef<Path>) -> Result<Vec<TimeSeriesRecord>> {
    let root = root.as_ref();
    let mut dirs: Vec<_> = std::fs::read_dir(root)
        .map_err(|e| Error::io(root, e))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .collect();
    dirs.sort_by_key(|e| e.file_name());
    if dirs.is_empty() {
        return Err(Error::Empty("time-series directory has no record subdirectories"));
    }
    dirs.iter()
        .map(|e| {
            let id = e.file_name().to_string_lossy().into_owned();
            load_record(&e.path(), &id).context(|| format!("record {id:?}"))
        })
        .collect()
}

/// Writes records in the layout read by [`load_timeseries_dir`].
pub fn write_timeseries_dir(root: impl AsRef<Path>, records: &[TimeSeriesRecord]) -> Result<()> {
    let root = root.as_ref();
    for r in records {
        let dir = root.join(&r.id);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (name, xs) in &r.channels {
            let path = dir.join(format!("{name}.csv"));
            let mut body = String::with_capacity(xs.len() * 12);
            for v in xs {
                body.push_str(&v.to_string());
                body.push('\n');
            }
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
        let meta = Meta {
            config: r.config.clone(),
            targets: r.targets.clone(),
        };
        let path = dir.join("meta.json");
        let body = serde_json::to_string_pretty(&meta)? + "\n";
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(len: usize) -> TimeSeriesRecord {
        TimeSeriesRecord::new(
            "r0",
            BTreeMap::from([("fa".to_string(), (0..len).map(|v| v as f64).collect())]),
            BTreeMap::from([("depth".to_string(), 1.0)]),
            BTreeMap::from([("Ra".to_string(), 0.8)]),
        )
        .unwrap()
    }

    #[test]
    fn truncate_identity_at_one() {
        let r = vec![record(10)];
        assert_eq!(truncate_records(&r, 1.0).unwrap(), r);
    }

    #[test]
    fn truncate_rounds_up() {
        let t = truncate_records(&[record(10)], 0.25).unwrap();
        assert_eq!(t[0].channels["fa"], [0.0, 1.0, 2.0]);
        assert_eq!(t[0].targets, record(10).targets);
    }

    #[test]
    fn truncate_rejects_out_of_range() {
        assert!(truncate_records(&[record(3)], 0.0).is_err());
        assert!(truncate_records(&[record(3)], 1.5).is_err());
        assert!(truncate_records(&[record(3)], f64::NAN).is_err());
    }

    #[test]
    fn empty_channel_rejected() {
        let err = TimeSeriesRecord::new(
            "x",
            BTreeMap::from([("fa".to_string(), vec![])]),
            BTreeMap::new(),
            BTreeMap::new(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut b = record(4);
        b.id = "r1".into();
        b.channels.get_mut("fa").unwrap()[2] = 0.125;
        let recs = vec![record(5), b];
        write_timeseries_dir(dir.path(), &recs).unwrap();
        assert_eq!(load_timeseries_dir(dir.path()).unwrap(), recs);
    }

    #[test]
    fn missing_meta_names_record() {
        let dir = tempfile::tempdir().unwrap();
        write_timeseries_dir(dir.path(), &[record(3)]).unwrap();
        std::fs::remove_file(dir.path().join("r0/meta.json")).unwrap();
        let msg = load_timeseries_dir(dir.path()).unwrap_err().to_string();
        assert!(msg.contains("r0"), "{msg}");
        assert!(msg.contains("meta.json"), "{msg}");
    }

    #[test]
    fn channel_header_line_is_skipped() {
        let dir = tempfile::tempdir().unwrap();
        write_timeseries_dir(dir.path(), &[record(3)]).unwrap();
        std::fs::write(dir.path().join("r0/fa.csv"), "force\n1\n2\n").unwrap();
        let recs = load_timeseries_dir(dir.path()).unwrap();
        assert_eq!(recs[0].channels["fa"], [1.0, 2.0]);
    }
}
