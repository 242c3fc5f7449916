use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

/// Budget-balanced sink mechanisms: evaluation, brute-force verification,
/// automated design and rating-data experiments.
#[derive(Debug, Parser)]
#[command(name = "mech", version, propagate_version = true)]
pub struct Cli {
    /// Output format for results on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Worker threads for verifiers, solvers and experiments [default: available parallelism].
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,

    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a mechanism on a profile file.
    Run(RunArgs),
    /// Worst cases over a valuation grid or on the adversarial profiles.
    #[command(subcommand)]
    Worstcase(WorstcaseCommand),
    /// Brute-force property checks over a valuation grid.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Automated mechanism design by linear programming.
    #[command(subcommand)]
    Amd(AmdCommand),
    /// Empirical inefficiency of the naive random sink on rating data.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Numeric {
    /// Exact rational arithmetic.
    Exact,
    /// Double precision with a 1e-9 tolerance.
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MechanismName {
    Vcg,
    /// Single-sink mechanism; the sink is `--sink`.
    SingleSink,
    /// Naive random sink: uniformly random sink agent.
    Nrs,
    /// Uniform sink drawn independently of the reports.
    UniformSink,
    IrrelevantSink,
    /// Modified irrelevant sink with a uniform default draw.
    Mis,
    /// Always picks `--alternative`, no payments.
    Constant,
    /// Affine maximizer with `--weights`, one per agent.
    Affine,
}

#[derive(Debug, Clone, Args)]
pub struct MechanismArgs {
    #[arg(long, value_enum, default_value_t = MechanismName::Nrs)]
    pub mechanism: MechanismName,

    /// Sink agent of the single-sink mechanism, 1-based.
    #[arg(long, default_value_t = 1)]
    pub sink: usize,

    /// Alternative of the constant mechanism, 1-based.
    #[arg(long, default_value_t = 1)]
    pub alternative: usize,

    /// Comma-separated agent weights of the affine maximizer.
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Agents.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Alternatives.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Valuation levels per entry, evenly spaced on [-M/2, M/2].
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Valuation range width, as an integer, decimal or fraction.
    #[arg(long = "M", visible_alias = "width", default_value = "1")]
    pub width: String,
    /// Largest number of profiles that may be enumerated.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Profile file: a header `n m M`, then one row of valuations per agent.
    #[arg(long)]
    pub profile: PathBuf,
    #[command(flatten)]
    pub mechanism: MechanismArgs,
    #[arg(long, value_enum, default_value_t = Numeric::Exact)]
    pub numeric: Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricName {
    /// Expected welfare loss.
    Absolute,
    /// Expected welfare loss divided by n·M.
    Sample,
    /// Mixture of inefficiency and payment spillover, weighted by `--lambda`.
    Spillover,
}

#[derive(Debug, Subcommand)]
pub enum WorstcaseCommand {
    /// Supremum of a metric over every profile of the grid.
    Grid {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        mechanism: MechanismArgs,
        #[arg(long, value_enum, default_value_t = MetricName::Absolute)]
        metric: MetricName,
        /// Weight of inefficiency in the spillover metric.
        #[arg(long, default_value = "1/2")]
        lambda: String,
        #[arg(long, value_enum, default_value_t = Numeric::Exact)]
        numeric: Numeric,
    },
    /// Evaluate an adversarial profile family.
    Generator {
        #[arg(long, value_enum)]
        kind: GeneratorKind,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long = "M", visible_alias = "width", default_value = "1")]
        width: String,
        /// Distance kept from the edge of the valuation range.
        #[arg(long, default_value = "1/1000")]
        margin: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    /// Single-sink mechanism with sink 1 loses at least M − 3·margin.
    SingleSink,
    /// Naive random sink approaches ⌈n/2⌉/n² sample inefficiency.
    Nrs,
    /// With m > n every fixed sink loses M − margin.
    ManyAlternatives,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub mechanism: MechanismArgs,
    #[arg(long, value_enum, default_value_t = Numeric::Exact)]
    pub numeric: Numeric,
    /// Counterexamples to print; 0 prints all of them.
    #[arg(long, default_value_t = 20)]
    pub limit: usize,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Strategyproofness: no agent gains by misreporting.
    Sp(VerifyArgs),
    /// Weak monotonicity of the allocation.
    Wmon(VerifyArgs),
    /// Budget balance: payments sum to zero in every outcome.
    Bb(VerifyArgs),
    /// Neutrality under relabelling of alternatives.
    Neutral(VerifyArgs),
    /// Anonymity under relabelling of agents.
    Anon(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassName {
    /// Any randomized, strategyproof, budget-balanced mechanism.
    Randomized,
    /// Generalized sink mechanisms.
    GeneralizedSink,
    /// Deterministic mechanisms, by exhaustive search.
    Deterministic,
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long = "M", visible_alias = "width", default_value = "1")]
    pub width: String,
    #[arg(long, value_enum, default_value_t = ClassName::Randomized)]
    pub class: ClassName,
    /// Solve the full program instead of the symmetry-reduced one.
    #[arg(long)]
    pub no_symmetry: bool,
    #[arg(long, value_enum, default_value_t = Numeric::Exact)]
    pub numeric: Numeric,
    /// Pivot limit of the simplex method.
    #[arg(long, default_value_t = 5_000_000)]
    pub max_pivots: usize,
    /// Largest grid, in profiles, that may be built.
    #[arg(long, default_value_t = 4096)]
    pub budget: u64,
}

#[derive(Debug, Subcommand)]
pub enum AmdCommand {
    /// Optimal worst-case absolute inefficiency of a class on one grid.
    Solve {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        design: DesignArgs,
        /// Also print the optimal mechanism, one profile per line.
        #[arg(long)]
        show_mechanism: bool,
        /// Write the program in LP text format to this file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Optima for every number of levels in a range.
    Sweep {
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[command(flatten)]
        design: DesignArgs,
    },
    /// Check a dual certificate against the symmetry-reduced program.
    CertVerify {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long = "M", visible_alias = "width", default_value = "1")]
        width: String,
        /// `bundled` or a certificate file.
        #[arg(long, default_value = "bundled")]
        cert: String,
    },
    /// Exhaustive search over deterministic mechanisms (n = m = k = 2).
    DetSearch {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long = "M", visible_alias = "width", default_value = "1")]
        width: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetName {
    Movielens,
    Jester,
    All,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Sample groups from rating data and measure the naive random sink.
    Run {
        #[arg(long, value_enum, default_value_t = DatasetName::All)]
        dataset: DatasetName,
        /// Directory holding `ml-20m/`, `ml-latest-small/` or `jester/`; seeded
        /// synthetic data in the same formats is used when nothing is found.
        #[arg(long, env = "SINKMECH_DATA_DIR")]
        data_dir: Option<PathBuf>,
        /// Restrict MovieLens to one genre.
        #[arg(long)]
        genre: Option<String>,
        /// Group sizes.
        #[arg(long, value_delimiter = ',', default_value = "10,60,110,160,210")]
        sizes: Vec<usize>,
        /// Groups drawn per size.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Alternatives per group.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `range` for the rating scale's width, or an explicit wider value.
        #[arg(long = "M", visible_alias = "width", default_value = "range")]
        width: String,
        /// Items with fewer ratings are dropped before imputation.
        #[arg(long, default_value_t = 10)]
        min_ratings: usize,
        /// Directory for `results.csv`, `chart.svg` and any synthetic data.
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Redraw the chart from a results table.
    Plot {
        #[arg(long)]
        results: PathBuf,
        /// Chart file [default: chart.svg next to the results].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
