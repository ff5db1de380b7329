use std::fs::OpenOptions;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::config::{InputSource, LoadedConfig};
use crate::data::{
    extract_features_with, load_feature_table, load_timeseries_dir, write_timeseries_dir, FeatureTable,
    TimeSeriesRecord,
};
use crate::error::{Error, Result, ResultExt};
use crate::eval::cross_validate;
use crate::explain::Method;
use crate::models::train;
use crate::pipeline::{
    feature_sweep, generate_synthetic, generate_synthetic_series, interval_experiment, rank_features,
};
use crate::report::svg::{bar_chart, line_chart, Series};
use crate::report::{to_json_artifact, write_file};

/// What a command wrote, printed as the final stdout line.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: &'static str,
    pub status: &'static str,
    pub output_dir: PathBuf,
    pub artifacts: Vec<String>,
    pub details: serde_json::Value,
}

/// Execution context shared by all commands.
pub struct Context {
    pub loaded: LoadedConfig,
    pub output_dir: PathBuf,
}

impl Context {
    pub fn new(loaded: LoadedConfig, output_override: Option<&Path>) -> Self {
        let output_dir = match output_override {
            Some(p) => p.to_path_buf(),
            None => loaded.resolve(&loaded.config.output_dir),
        };
        Self { loaded, output_dir }
    }

    fn hash(&self) -> &str {
        &self.loaded.hash
    }

    fn records(&self) -> Result<Vec<TimeSeriesRecord>> {
        match &self.loaded.config.input {
            InputSource::TimeseriesDir { path } => load_timeseries_dir(self.loaded.resolve(path)),
            InputSource::SyntheticSeries(spec) => generate_synthetic_series(spec),
            _ => Err(Error::Config(
                "this command requires raw time series (timeseries_dir or synthetic_series input)".into(),
            )),
        }
    }

    fn target_for_records(&self, records: &[TimeSeriesRecord]) -> Result<String> {
        let t = self.loaded.config.target_name();
        if !t.is_empty() {
            return Ok(t);
        }
        let names: Vec<&String> = records.first().map(|r| r.targets.keys().collect()).unwrap_or_default();
        match names.as_slice() {
            [only] => Ok((*only).clone()),
            _ => Err(Error::Config(
                "records carry several targets; set \"target\" in the config".into(),
            )),
        }
    }

    /// Feature table and target name for the configured input.
    fn table(&self) -> Result<(FeatureTable, String)> {
        let cfg = &self.loaded.config;
        let (table, target) = match &cfg.input {
            InputSource::FeatureCsv { path, targets } => (
                load_feature_table(self.loaded.resolve(path), targets)?,
                cfg.target_name(),
            ),
            InputSource::Synthetic(spec) => (generate_synthetic(spec)?, cfg.target_name()),
            InputSource::TimeseriesDir { .. } | InputSource::SyntheticSeries(_) => {
                let records = self.records()?;
                let target = self.target_for_records(&records)?;
                (extract_features_with(&records, cfg.feature_options())?, target)
            }
        };
        table.target(&target)?;
        Ok((table, target))
    }

    fn write(&self, written: &mut Vec<String>, name: &str, contents: &str) -> Result<()> {
        write_file(&self.output_dir.join(name), contents)?;
        written.push(name.to_string());
        Ok(())
    }
}

/// Exclusive lock on an output directory, released on drop.
struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    fn acquire(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(".prunekit.lock");
        OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e).context("output directory is locked by another run"))?;
        Ok(Self { path })
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Preprocess,
    Train,
    Explain,
    Sweep,
    Intervals,
    Synth,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Preprocess => "preprocess",
            CommandKind::Train => "train",
            CommandKind::Explain => "explain",
            CommandKind::Sweep => "sweep",
            CommandKind::Intervals => "intervals",
            CommandKind::Synth => "synth",
        }
    }
}

/// Runs one command against a loaded config.
pub fn execute(kind: CommandKind, ctx: &Context) -> Result<Summary> {
    let _lock = OutputLock::acquire(&ctx.output_dir)?;
    let mut artifacts = Vec::new();
    let details = match kind {
        CommandKind::Preprocess => cmd_preprocess(ctx, &mut artifacts),
        CommandKind::Train => cmd_train(ctx, &mut artifacts),
        CommandKind::Explain => cmd_explain(ctx, &mut artifacts),
        CommandKind::Sweep => cmd_sweep(ctx, &mut artifacts),
        CommandKind::Intervals => cmd_intervals(ctx, &mut artifacts),
        CommandKind::Synth => cmd_synth(ctx, &mut artifacts),
    }
    .context(|| format!("{} ({})", kind.name(), ctx.loaded.path.display()))?;
    Ok(Summary {
        command: kind.name(),
        status: "ok",
        output_dir: ctx.output_dir.clone(),
        artifacts,
        details,
    })
}

pub fn cmd_preprocess(ctx: &Context, out: &mut Vec<String>) -> Result<serde_json::Value> {
    let records = ctx.records()?;
    let table = extract_features_with(&records, ctx.loaded.config.feature_options())?;
    ctx.write(out, "features.csv", &table.to_csv_string()?)?;
    Ok(json!({"n_records": records.len(), "n_features": table.n_features()}))
}

pub fn cmd_train(ctx: &Context, out: &mut Vec<String>) -> Result<serde_json::Value> {
    let cfg = &ctx.loaded.config;
    let (table, target) = ctx.table()?;
    let cv = cross_validate(&cfg.model, &table, &target, cfg.k, cfg.seed)?;
    log::info!("cross-validation of {} on {target:?}", cfg.model.kind.name());
    eprint!("{}", cv.to_table());
    let model = train(&cfg.model, &table, &target)?;
    ctx.write(out, "model.json", &to_json_artifact("model", ctx.hash(), &model)?)?;
    ctx.write(out, "cv_report.json", &to_json_artifact("cv_report", ctx.hash(), &cv)?)?;
    Ok(json!({"target": target, "mean_mape": cv.mean_mape}))
}

pub fn cmd_explain(ctx: &Context, out: &mut Vec<String>) -> Result<serde_json::Value> {
    let cfg = &ctx.loaded.config;
    let methods = cfg.parsed_methods()?;
    let (table, target) = ctx.table()?;
    let mut top = serde_json::Map::new();
    for m in methods {
        let report = rank_features(&cfg.model, &table, &target, m, &cfg.attribution, cfg.seed)?;
        let stem = format!("importance_{m}");
        ctx.write(
            out,
            &format!("{stem}.json"),
            &to_json_artifact("importance", ctx.hash(), &report)?,
        )?;
        ctx.write(out, &format!("{stem}.csv"), &report.to_csv_string())?;
        let bars: Vec<(String, f64)> = report.rank.iter().map(|f| (f.clone(), report.scores[f])).collect();
        let svg = bar_chart(&format!("Feature importance ({m}) for {target}"), "score", &bars);
        ctx.write(out, &format!("{stem}.svg"), &svg)?;
        top.insert(m.to_string(), json!(report.top(5)));
    }
    Ok(json!({"target": target, "top_features": top}))
}

fn curve_label(m: Method) -> &'static str {
    match m {
        Method::SelectKBest => "FS",
        other => other.as_str(),
    }
}

pub fn cmd_sweep(ctx: &Context, out: &mut Vec<String>) -> Result<serde_json::Value> {
    let cfg = &ctx.loaded.config;
    let methods = cfg.parsed_methods()?;
    let (table, target) = ctx.table()?;
    let mut series = Vec::new();
    let mut best = serde_json::Map::new();
    for m in methods {
        let sweep = feature_sweep(
            &cfg.model,
            &table,
            &target,
            m,
            &cfg.grid,
            cfg.k,
            &cfg.attribution,
            cfg.seed,
        )?;
        ctx.write(
            out,
            &format!("sweep_{m}.json"),
            &to_json_artifact("sweep", ctx.hash(), &sweep)?,
        )?;
        ctx.write(out, &format!("sweep_{m}.csv"), &sweep.to_csv_string())?;
        let mut points: Vec<(f64, f64)> = sweep.points.iter().map(|pt| (pt.p, pt.cv.mean_mape)).collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        series.push(Series {
            name: curve_label(m).to_string(),
            points,
        });
        best.insert(
            m.to_string(),
            json!({
                "best_p": sweep.best_p,
                "best_mean_mape": sweep.best_point().cv.mean_mape,
                "baseline_mean_mape": sweep.baseline_cv.mean_mape,
            }),
        );
    }
    let svg = line_chart(
        &format!("MAPE vs. share of top-ranked features ({target})"),
        "top features kept (%)",
        "mean MAPE (%)",
        &series,
    );
    ctx.write(out, "sweep.svg", &svg)?;
    Ok(json!({"target": target, "methods": best}))
}

pub fn cmd_intervals(ctx: &Context, out: &mut Vec<String>) -> Result<serde_json::Value> {
    let cfg = &ctx.loaded.config;
    if !cfg.input.is_series() {
        return Err(Error::Config(
            "intervals require raw series (timeseries_dir or synthetic_series input)".into(),
        ));
    }
    let records = ctx.records()?;
    let target = ctx.target_for_records(&records)?;
    let result = interval_experiment(
        &cfg.model,
        &records,
        &target,
        &cfg.fractions,
        cfg.k,
        cfg.seed,
        cfg.feature_options(),
    )?;
    ctx.write(
        out,
        "intervals.json",
        &to_json_artifact("intervals", ctx.hash(), &result)?,
    )?;
    ctx.write(out, "intervals.csv", &result.to_csv_string())?;
    let points = result
        .fractions
        .iter()
        .zip(&result.reports)
        .map(|(f, r)| (f * 100.0, r.mean_mape))
        .collect();
    let svg = line_chart(
        &format!("MAPE vs. share of processing time observed ({target})"),
        "data collected (%)",
        "mean MAPE (%)",
        &[Series {
            name: cfg.model.kind.name().to_string(),
            points,
        }],
    );
    ctx.write(out, "intervals.svg", &svg)?;
    let mapes: Vec<f64> = result.reports.iter().map(|r| r.mean_mape).collect();
    Ok(json!({"target": target, "mean_mape": mapes}))
}

pub fn cmd_synth(ctx: &Context, out: &mut Vec<String>) -> Result<serde_json::Value> {
    match &ctx.loaded.config.input {
        InputSource::Synthetic(spec) => {
            let table = generate_synthetic(spec)?;
            ctx.write(out, "features.csv", &table.to_csv_string()?)?;
            Ok(json!({"n_samples": table.n_samples(), "n_features": table.n_features()}))
        }
        InputSource::SyntheticSeries(spec) => {
            let records = generate_synthetic_series(spec)?;
            write_timeseries_dir(ctx.output_dir.join("series"), &records)?;
            out.push("series".to_string());
            Ok(json!({"n_records": records.len()}))
        }
        _ => Err(Error::Config(
            "synth requires a synthetic or synthetic_series input".into(),
        )),
    }
}
