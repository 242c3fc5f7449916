//! Group sampling and the inefficiency measurements.

use std::fmt::Write as _;

use num_traits::Zero;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sinkmech::{Rational, Scalar, ValuationProfile};

use crate::error::{Error, Result};
use crate::ratings::{mix, RatingMatrix, TICK};

/// How ratings become valuations.
#[derive(Debug, Clone, PartialEq)]
pub enum WidthRule {
    /// `M = hi − lo`, values centred on the middle of the scale.
    Range,
    /// A caller-chosen `M`, at least as wide as the rating scale.
    Custom(Rational),
}

/// Valuations `rating − (hi + lo)/2` for the chosen users and items.
pub fn ratings_to_profile(
    matrix: &RatingMatrix,
    users: &[usize],
    items: &[usize],
    rule: &WidthRule,
) -> Result<ValuationProfile<Rational>> {
    let (lo, hi) = matrix.scale;
    let width = resolve_width(matrix, rule)?;
    let mid = lo + hi;
    let rows = users
        .iter()
        .map(|&u| {
            items
                .iter()
                .map(|&i| {
                    let r = matrix
                        .rating_ticks(u, i)
                        .ok_or_else(|| Error::Argument(format!("user {u} has no rating for item {i}")))?;
                    Ok(Rational::new((2 * r - mid).into(), (2 * TICK).into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ValuationProfile::new(width, rows)?)
}

/// Sample inefficiency of the naive random sink on one group: the exact
/// expectation over the `n` equally likely sinks, and the worst sink.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupInefficiency {
    pub expected: Rational,
    pub worst: Rational,
}

pub fn group_inefficiency(profile: &ValuationProfile<Rational>) -> GroupInefficiency {
    let n = profile.agents();
    let rows: Vec<&[Rational]> = profile.rows().collect();
    let (total, worst) = sink_losses(&rows);
    let scale = Rational::from_int(n as i64) * profile.width();
    GroupInefficiency {
        expected: total / (scale.clone() * Rational::from_int(n as i64)),
        worst: worst / scale,
    }
}

/// Total and largest welfare loss over the `n` choices of sink. Generic so
/// the experiment can run on exact integer ticks.
fn sink_losses<T>(rows: &[&[T]]) -> (T, T)
where
    T: Clone + PartialOrd + Zero + std::iter::Sum<T> + for<'a> std::ops::Sub<&'a T, Output = T>,
{
    let m = rows[0].len();
    let welfare: Vec<T> = (0..m).map(|a| rows.iter().map(|r| r[a].clone()).sum()).collect();
    let mut best = welfare[0].clone();
    for w in &welfare[1..] {
        if *w > best {
            best = w.clone();
        }
    }
    let mut total = T::zero();
    let mut worst = T::zero();
    for row in rows {
        // Welfare of everyone but the sink; ties go to the lowest index.
        let mut chosen = 0;
        for a in 1..m {
            if welfare[a].clone() - &row[a] > welfare[chosen].clone() - &row[chosen] {
                chosen = a;
            }
        }
        let loss = best.clone() - &welfare[chosen];
        if loss > worst {
            worst = loss.clone();
        }
        total = total + loss;
    }
    (total, worst)
}

/// [`group_inefficiency`] on the users and items of `matrix` directly, in
/// integer ticks.
fn group_from_ticks(matrix: &RatingMatrix, users: &[usize], items: &[usize], width: &Rational) -> Result<GroupInefficiency> {
    let rows = users
        .iter()
        .map(|&u| {
            items
                .iter()
                .map(|&i| {
                    matrix
                        .rating_ticks(u, i)
                        .map(i128::from)
                        .ok_or_else(|| Error::Argument(format!("user {u} has no rating for item {i}")))
                })
                .collect::<Result<Vec<i128>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[i128]> = rows.iter().map(Vec::as_slice).collect();
    let (total, worst) = sink_losses(&refs);
    let n = users.len() as i64;
    let scale = Rational::from_int(n) * width * Rational::from_int(TICK);
    let exact = |t: i128| Rational::from_integer(t.into());
    Ok(GroupInefficiency {
        expected: exact(total) / (scale.clone() * Rational::from_int(n)),
        worst: exact(worst) / scale,
    })
}

/// Width `M` implied by `rule` for the matrix's scale.
fn resolve_width(matrix: &RatingMatrix, rule: &WidthRule) -> Result<Rational> {
    let (lo, hi) = matrix.scale;
    let range = Rational::new((hi - lo).into(), TICK.into());
    match rule {
        WidthRule::Range => Ok(range),
        WidthRule::Custom(m) if *m < range => {
            Err(Error::Argument(format!("width {m} is narrower than the rating range {range}")))
        }
        WidthRule::Custom(m) => Ok(m.clone()),
    }
}

/// `⌈n/2⌉/n²`, the worst case of the naive random sink with two alternatives.
pub fn theory_line(n: usize) -> Rational {
    Rational::from_ratio(n.div_ceil(2) as i64, (n * n) as i64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    /// Alternatives per group.
    pub m: usize,
    pub seed: u64,
    pub width: WidthRule,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sizes: vec![10, 60, 110, 160, 210],
            trials: 50,
            m: 2,
            seed: 0,
            width: WidthRule::Range,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return Err(Error::Argument(format!("group sizes must be at least 2, got {:?}", self.sizes)));
        }
        if self.trials == 0 {
            return Err(Error::Argument("need at least one trial".into()));
        }
        if self.m < 2 {
            return Err(Error::Argument(format!("need at least two alternatives, got {}", self.m)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub n: usize,
    pub trials: usize,
    pub mean_expected: f64,
    pub std_expected: f64,
    pub mean_worst: f64,
    pub std_worst: f64,
    pub theory: f64,
}

impl SizeSummary {
    /// Theory line over measured mean; infinite when nothing was lost.
    pub fn improvement(&self) -> f64 {
        self.theory / self.mean_expected
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub dataset: String,
    pub sizes: Vec<SizeSummary>,
}

/// Mean and sample standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Draws `trials` groups of `n` users and `m` items for every size and
/// measures each group. The generator of every trial is seeded from
/// `(seed, n, trial)`, so results do not depend on scheduling.
pub fn run_experiment(dataset: &str, matrix: &RatingMatrix, config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    if !matrix.is_complete() {
        return Err(Error::Argument("the rating matrix has gaps; impute it first".into()));
    }
    if config.m > matrix.num_items() {
        return Err(Error::Argument(format!("{} alternatives requested, {} items available", config.m, matrix.num_items())));
    }
    let width = resolve_width(matrix, &config.width)?;
    let mut sizes = Vec::with_capacity(config.sizes.len());
    for &n in &config.sizes {
        if n > matrix.num_users() {
            return Err(Error::Argument(format!("group size {n} exceeds {} users", matrix.num_users())));
        }
        let groups: Vec<GroupInefficiency> = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(&[config.seed, n as u64, t as u64]));
                let users = sample(&mut rng, matrix.num_users(), n).into_vec();
                let items = sample(&mut rng, matrix.num_items(), config.m).into_vec();
                group_from_ticks(matrix, &users, &items, &width)
            })
            .collect::<Result<_>>()?;
        let expected: Vec<f64> = groups.iter().map(|g| g.expected.to_f64()).collect();
        let worst: Vec<f64> = groups.iter().map(|g| g.worst.to_f64()).collect();
        let (mean_expected, std_expected) = mean_std(&expected);
        let (mean_worst, std_worst) = mean_std(&worst);
        sizes.push(SizeSummary {
            n,
            trials: config.trials,
            mean_expected,
            std_expected,
            mean_worst,
            std_worst,
            theory: theory_line(n).to_f64(),
        });
    }
    Ok(ExperimentResult {
        dataset: dataset.to_owned(),
        sizes,
    })
}

pub const RESULTS_HEADER: &str =
    "dataset,n,trials,mean_exp_ineff,std_exp_ineff,mean_worst_ineff,std_worst_ineff,theory_line";

/// The results table, one row per dataset and group size.
pub fn results_csv(results: &[ExperimentResult]) -> String {
    let mut out = format!("{RESULTS_HEADER}\n");
    for r in results {
        for s in &r.sizes {
            writeln!(
                out,
                "{},{},{},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
                r.dataset, s.n, s.trials, s.mean_expected, s.std_expected, s.mean_worst, s.std_worst, s.theory
            )
            .unwrap();
        }
    }
    out
}

/// Parses a table written by [`results_csv`].
pub fn parse_results_csv(text: &str) -> Result<Vec<ExperimentResult>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::parse("<results>", 1, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.join(",") != RESULTS_HEADER {
        return Err(Error::parse("<results>", 1, format!("unexpected header {}", header.join(","))));
    }
    let mut results: Vec<ExperimentResult> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::parse("<results>", e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let num = |k: usize| -> Result<f64> {
            record[k]
                .parse()
                .map_err(|_| Error::parse("<results>", line, format!("bad number {:?}", &record[k])))
        };
        let int = |k: usize| -> Result<usize> {
            record[k]
                .parse()
                .map_err(|_| Error::parse("<results>", line, format!("bad integer {:?}", &record[k])))
        };
        let summary = SizeSummary {
            n: int(1)?,
            trials: int(2)?,
            mean_expected: num(3)?,
            std_expected: num(4)?,
            mean_worst: num(5)?,
            std_worst: num(6)?,
            theory: num(7)?,
        };
        match results.last_mut() {
            Some(r) if r.dataset == record[0] => r.sizes.push(summary),
            _ => results.push(ExperimentResult {
                dataset: record[0].to_owned(),
                sizes: vec![summary],
            }),
        }
    }
    Ok(results)
}
