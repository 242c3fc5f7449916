//! Rating datasets and the empirical inefficiency of the naive random sink.
//!
//! Ratings are loaded from MovieLens or Jester files (or seeded synthetic
//! files in the same formats), gaps are filled from each item's observed
//! ratings, and random groups are scored by the exact expected sample
//! inefficiency over the choice of sink.

pub mod chart;
pub mod datasets;
pub mod error;
pub mod experiment;
pub mod ratings;
pub mod synthetic;

use std::fs;
use std::path::{Path, PathBuf};

pub use chart::chart_svg;
pub use datasets::{load_dataset, Dataset, Source, DATA_DIR_ENV};
pub use error::{Error, Result};
pub use experiment::{
    group_inefficiency, ratings_to_profile, results_csv, run_experiment, theory_line, ExperimentConfig,
    ExperimentResult, GroupInefficiency, SizeSummary, WidthRule,
};
pub use ratings::{impute, load_jester, load_movielens, Item, RatingMatrix};

/// Writes `results.csv` and `chart.svg` into `dir`.
pub fn emit_results(results: &[ExperimentResult], dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let table = dir.join("results.csv");
    let chart = dir.join("chart.svg");
    fs::write(&table, results_csv(results)).map_err(|e| Error::io(&table, e))?;
    fs::write(&chart, chart_svg(results)).map_err(|e| Error::io(&chart, e))?;
    Ok((table, chart))
}
