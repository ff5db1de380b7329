//! Dataset ingestion and time-series preprocessing.

mod features;
mod series;
mod table;

pub use features::{
    dft_magnitude, extract_features, extract_features_with, five_number_summary, BoxPlotSummary, FeatureOptions,
};
pub use series::{load_timeseries_dir, truncate_records, write_timeseries_dir, TimeSeriesRecord};
pub use table::{load_feature_table, FeatureTable};
