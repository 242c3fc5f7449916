//! `experiment run|plot`.

use std::fs;
use std::path::Path;

use serde_json::Value;
use sinkmech::Scalar;
use sinkmech_experiments::experiment::parse_results_csv;
use sinkmech_experiments::{
    chart_svg, emit_results, impute, load_dataset, run_experiment, Dataset, ExperimentConfig, ExperimentResult, Source,
    WidthRule,
};

use crate::args::{DatasetName, ExperimentCommand};
use crate::error::{CliError, CliResult};
use crate::output::Report;

pub fn experiment(command: &ExperimentCommand) -> CliResult<Report> {
    match command {
        ExperimentCommand::Run {
            dataset,
            data_dir,
            genre,
            sizes,
            trials,
            m,
            seed,
            width,
            min_ratings,
            out,
        } => {
            let width = match width.as_str() {
                "range" => WidthRule::Range,
                text => WidthRule::Custom(
                    sinkmech::Rational::parse_scalar(text).map_err(|e| CliError::Invalid(format!("--M: {e}")))?,
                ),
            };
            let config = ExperimentConfig {
                sizes: sizes.clone(),
                trials: *trials,
                m: *m,
                seed: *seed,
                width,
            };
            config.validate()?;
            let datasets = match dataset {
                DatasetName::Movielens => vec![Dataset::MovieLens],
                DatasetName::Jester => vec![Dataset::Jester],
                DatasetName::All => vec![Dataset::MovieLens, Dataset::Jester],
            };
            let mut results = Vec::new();
            for d in datasets {
                let (raw, source) = load_dataset(d, data_dir.as_deref(), genre.as_deref(), &out.join("synthetic"))?;
                match &source {
                    Source::Files(files) => log::info!("{}: loaded {}", d.label(), files[0].display()),
                    Source::Synthetic(dir) => {
                        log::warn!("{}: no data files found, using synthetic data in {}", d.label(), dir.display())
                    }
                }
                let matrix = impute(&raw, *min_ratings, *seed)?;
                log::info!(
                    "{}: {} users, {} of {} items kept, {} observed ratings",
                    d.label(),
                    matrix.num_users(),
                    matrix.num_items(),
                    raw.num_items(),
                    raw.num_observed()
                );
                results.push(run_experiment(d.label(), &matrix, &config)?);
            }
            let (table, chart) = emit_results(&results, out)?;
            log::info!("wrote {} and {}", table.display(), chart.display());
            Ok(summary(&results))
        }
        ExperimentCommand::Plot { results, out } => {
            let text = fs::read_to_string(results).map_err(|e| CliError::Runtime(format!("{}: {e}", results.display())))?;
            let parsed = parse_results_csv(&text)?;
            let path = out
                .clone()
                .unwrap_or_else(|| results.parent().unwrap_or(Path::new(".")).join("chart.svg"));
            fs::write(&path, chart_svg(&parsed)).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            let mut report = summary(&parsed);
            report.line(format!("chart written to {}", path.display()));
            Ok(report)
        }
    }
}

fn summary(results: &[ExperimentResult]) -> Report {
    let mut report = Report::new(&[
        "dataset",
        "n",
        "trials",
        "mean_exp_ineff",
        "std_exp_ineff",
        "mean_worst_ineff",
        "std_worst_ineff",
        "theory_line",
    ]);
    report.line(format!(
        "{:<10} {:>5} {:>7} {:>12} {:>12} {:>12} {:>10} {:>8}",
        "dataset", "n", "trials", "mean", "std", "worst", "theory", "ratio"
    ));
    for r in results {
        for s in &r.sizes {
            report.line(format!(
                "{:<10} {:>5} {:>7} {:>12.4e} {:>12.4e} {:>12.4e} {:>10.4e} {:>8.1}",
                r.dataset,
                s.n,
                s.trials,
                s.mean_expected,
                s.std_expected,
                s.mean_worst,
                s.theory,
                s.improvement()
            ));
            let num = |x: f64| serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
            report.row(vec![
                Value::String(r.dataset.clone()),
                Value::from(s.n),
                Value::from(s.trials),
                num(s.mean_expected),
                num(s.std_expected),
                num(s.mean_worst),
                num(s.std_worst),
                num(s.theory),
            ]);
        }
    }
    report
}
