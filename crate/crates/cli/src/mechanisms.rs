//! `run`, `worstcase` and `verify`.

use std::fs;

use serde_json::Value;
use sinkmech::mechanisms::adversarial::{nrs_worst_profile, worst_case_profile_single_sink};
use sinkmech::metrics::{absolute_inefficiency, efficient_alternative, grid_supremum, sample_inefficiency_normalize, Metric};
use sinkmech::randomized::gen_sink_worst_profile_m_gt_n;
use sinkmech::verify::{
    check_anonymity, check_budget_balance, check_neutrality, check_strategyproof, check_weak_monotonicity,
    ViolationReport,
};
use sinkmech::{
    AffineMaximizer, Alternative, ConstantMechanism, FixedSink, GeneralizedSink, GridSpec, IrrelevantSink, Mechanism,
    ModifiedIrrelevantSink, NaiveRandomSink, Rational, Scalar, SingleSink, SinkDistribution, ValuationProfile, Vcg,
};

use crate::args::{
    GeneratorKind, GridArgs, MechanismArgs, MechanismName, MetricName, Numeric, RunArgs, VerifyArgs, VerifyCommand,
    WorstcaseCommand,
};
use crate::error::{CliError, CliResult};
use crate::output::{decimal_cell, describe, exact_cell, row_text, Report};

type BoxedMechanism<S> = Box<dyn Mechanism<S> + Send>;

fn scalar<S: Scalar>(text: &str, what: &str) -> CliResult<S> {
    S::parse_scalar(text).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}

pub fn build_mechanism<S: Scalar>(args: &MechanismArgs, n: usize, m: usize) -> CliResult<BoxedMechanism<S>> {
    let one_based = |value: usize, limit: usize, what: &str| {
        if value == 0 || value > limit {
            Err(CliError::Invalid(format!("{what} must lie in 1..={limit}, got {value}")))
        } else {
            Ok(value - 1)
        }
    };
    Ok(match args.mechanism {
        MechanismName::Vcg => Box::new(Vcg),
        MechanismName::SingleSink => Box::new(SingleSink::new(one_based(args.sink, n, "--sink")?)),
        MechanismName::Nrs => Box::new(GeneralizedSink::new(NaiveRandomSink)),
        MechanismName::UniformSink => Box::new(GeneralizedSink::new(FixedSink(SinkDistribution::<S>::uniform(n)?))),
        MechanismName::IrrelevantSink => Box::new(GeneralizedSink::new(IrrelevantSink)),
        MechanismName::Mis => Box::new(GeneralizedSink::new(ModifiedIrrelevantSink::<S>::default())),
        MechanismName::Constant => Box::new(ConstantMechanism(Alternative(one_based(args.alternative, m, "--alternative")?))),
        MechanismName::Affine => {
            if args.weights.len() != n {
                return Err(CliError::Invalid(format!("--weights needs {n} entries, got {}", args.weights.len())));
            }
            let weights = args.weights.iter().map(|w| scalar(w, "--weights")).collect::<CliResult<Vec<S>>>()?;
            Box::new(AffineMaximizer::neutral(weights, m)?)
        }
    })
}

fn grid<S: Scalar>(args: &GridArgs) -> CliResult<GridSpec<S>> {
    let spec = GridSpec::new(args.n, args.m, args.k, scalar(&args.width, "--M")?)?;
    Ok(match args.budget {
        Some(b) => spec.with_budget(b),
        None => spec,
    })
}

pub fn run(args: &RunArgs) -> CliResult<Report> {
    let text = fs::read_to_string(&args.profile)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.profile.display())))?;
    match args.numeric {
        Numeric::Exact => run_with::<Rational>(args, &text),
        Numeric::Float => run_with::<f64>(args, &text),
    }
}

fn run_with<S: Scalar>(args: &RunArgs, text: &str) -> CliResult<Report> {
    let profile = ValuationProfile::<S>::parse_text(text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", args.profile.display())))?;
    let (n, m) = (profile.agents(), profile.alternatives());
    let mechanism = build_mechanism::<S>(&args.mechanism, n, m)?;
    let lottery = mechanism.run(&profile)?;
    let abs = absolute_inefficiency(&profile, &lottery)?;
    let sample = sample_inefficiency_normalize(abs.clone(), n, profile.width())?;
    let efficient = efficient_alternative(&profile, &[])?;

    let mut report = Report::new(&["probability", "alternative", "payments", "surplus"]);
    report.line(format!("mechanism {}", mechanism.name()));
    for (p, outcome) in lottery.support() {
        report.line(format!(
            "  p = {}: alternative {}, payments ({})",
            describe(p),
            outcome.alternative.0 + 1,
            outcome.payments.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        ));
        report.row(vec![
            exact_cell(p),
            Value::from(outcome.alternative.0 + 1),
            Value::String(row_text(&outcome.payments)),
            exact_cell(&outcome.surplus()),
        ]);
    }
    report.line(format!("alternative distribution ({})", row_text(&lottery.alternative_distribution(m))));
    report.line(format!("expected payments ({})", row_text(&lottery.expected_payments())));
    report.line(format!("largest |surplus| {}", describe(&lottery.max_abs_surplus())));
    report.line(format!("efficient alternative {}", efficient.0 + 1));
    report.line(format!("absolute inefficiency {}", describe(&abs)));
    report.line(format!("sample inefficiency {}", describe(&sample)));
    Ok(report)
}

pub fn worstcase(command: &WorstcaseCommand) -> CliResult<Report> {
    match command {
        WorstcaseCommand::Grid {
            grid,
            mechanism,
            metric,
            lambda,
            numeric,
        } => match numeric {
            Numeric::Exact => grid_worst::<Rational>(grid, mechanism, *metric, lambda),
            Numeric::Float => grid_worst::<f64>(grid, mechanism, *metric, lambda),
        },
        WorstcaseCommand::Generator {
            kind,
            n,
            m,
            width,
            margin,
        } => generator(*kind, *n, *m, &scalar(width, "--M")?, &scalar(margin, "--margin")?),
    }
}

fn grid_worst<S: Scalar>(args: &GridArgs, mech: &MechanismArgs, metric: MetricName, lambda: &str) -> CliResult<Report> {
    let spec = grid::<S>(args)?;
    let mechanism = build_mechanism::<S>(mech, spec.n, spec.m)?;
    let metric = match metric {
        MetricName::Absolute => Metric::AbsoluteInefficiency,
        MetricName::Sample => Metric::SampleInefficiency,
        MetricName::Spillover => Metric::Spillover(scalar(lambda, "--lambda")?),
    };
    let (value, profile) = grid_supremum(&metric, &spec, &mechanism)?;
    let mut report = Report::new(&["mechanism", "n", "m", "k", "M", "value", "decimal", "profile"]);
    report.line(describe(&value));
    report.line(format!("attained at {profile}"));
    report.row(vec![
        Value::String(mechanism.name()),
        Value::from(spec.n),
        Value::from(spec.m),
        Value::from(spec.k),
        exact_cell(&spec.width),
        exact_cell(&value),
        decimal_cell(&value),
        Value::String(profile.rows().map(row_text).collect::<Vec<_>>().join(";")),
    ]);
    Ok(report)
}

fn generator(kind: GeneratorKind, n: usize, m: usize, width: &Rational, margin: &Rational) -> CliResult<Report> {
    let w = width.clone();
    let (profile, mechanisms, bound): (ValuationProfile<Rational>, Vec<BoxedMechanism<Rational>>, Rational) = match kind {
        GeneratorKind::SingleSink => (
            worst_case_profile_single_sink(n, m, w.clone(), margin.clone())?,
            vec![Box::new(SingleSink::new(0))],
            w - margin * Rational::from_int(3),
        ),
        GeneratorKind::Nrs => {
            if m != 2 {
                return Err(CliError::Invalid("the naive random sink family has two alternatives; use --m 2".into()));
            }
            let p = nrs_worst_profile(n, w.clone(), margin.clone())?;
            (p, vec![Box::new(GeneralizedSink::new(NaiveRandomSink))], Rational::from_ratio(n.div_ceil(2) as i64, (n * n) as i64))
        }
        GeneratorKind::ManyAlternatives => (
            gen_sink_worst_profile_m_gt_n(n, m, w.clone(), margin.clone())?,
            (0..n).map(|i| Box::new(SingleSink::new(i)) as BoxedMechanism<Rational>).collect(),
            w - margin,
        ),
    };
    let mut report = Report::new(&["mechanism", "absolute", "decimal", "sample", "bound"]);
    report.line(format!("profile {profile}"));
    for mechanism in &mechanisms {
        let abs = absolute_inefficiency(&profile, &mechanism.run(&profile)?)?;
        let sample = sample_inefficiency_normalize(abs.clone(), n, width)?;
        let name = mechanism.name();
        report.line(format!("{name}: absolute {}, sample {}", describe(&abs), describe(&sample)));
        report.row(vec![Value::String(name), exact_cell(&abs), decimal_cell(&abs), exact_cell(&sample), exact_cell(&bound)]);
    }
    let target = match kind {
        GeneratorKind::Nrs => "sample inefficiency approaches",
        _ => "absolute loss at least",
    };
    report.line(format!("{target} {}", describe(&bound)));
    Ok(report)
}

pub fn verify(command: &VerifyCommand) -> CliResult<Report> {
    let args = match command {
        VerifyCommand::Sp(a) | VerifyCommand::Wmon(a) | VerifyCommand::Bb(a) | VerifyCommand::Neutral(a) | VerifyCommand::Anon(a) => a,
    };
    match args.numeric {
        Numeric::Exact => verify_with::<Rational>(command, args),
        Numeric::Float => verify_with::<f64>(command, args),
    }
}

fn verify_with<S: Scalar>(command: &VerifyCommand, args: &VerifyArgs) -> CliResult<Report> {
    let spec = grid::<S>(&args.grid)?;
    let mechanism = build_mechanism::<S>(&args.mechanism, spec.n, spec.m)?;
    if let VerifyCommand::Bb(_) = command {
        let b = check_budget_balance(&mechanism, &spec)?;
        let mut report = Report::new(&["mechanism", "max_abs_surplus", "decimal", "profile_index", "profile"]);
        report.line(format!("largest |surplus| {}", describe(&b.max_abs_surplus)));
        report.line(format!("attained at profile #{} {}", b.profile_index, b.profile));
        report.row(vec![
            Value::String(mechanism.name()),
            exact_cell(&b.max_abs_surplus),
            decimal_cell(&b.max_abs_surplus),
            Value::from(b.profile_index),
            Value::String(b.profile.rows().map(row_text).collect::<Vec<_>>().join(";")),
        ]);
        return Ok(report);
    }
    let found = match command {
        VerifyCommand::Sp(_) => check_strategyproof(&mechanism, &spec)?,
        VerifyCommand::Wmon(_) => check_weak_monotonicity(&mechanism, &spec)?,
        VerifyCommand::Neutral(_) => check_neutrality(&mechanism, &spec)?,
        VerifyCommand::Anon(_) => check_anonymity(&mechanism, &spec)?,
        VerifyCommand::Bb(_) => unreachable!("handled above"),
    };
    let shown = if args.limit == 0 { found.len() } else { args.limit.min(found.len()) };
    let mut report = Report::new(&["kind", "profile_index", "profile", "agent", "misreport", "permutation", "gain"]);
    report.line(format!("{}: {} violations", mechanism.name(), found.len()));
    for v in &found[..shown] {
        report.line(v.to_text());
        report.row(violation_cells(v));
    }
    if shown < found.len() {
        report.line(format!("... {} more (raise --limit to see them)", found.len() - shown));
    }
    Ok(report)
}

fn violation_cells<S: Scalar>(v: &ViolationReport<S>) -> Vec<Value> {
    vec![
        Value::String(v.kind.label().into()),
        Value::from(v.profile_index),
        Value::String(v.profile.rows().map(row_text).collect::<Vec<_>>().join(";")),
        v.agent.map_or(Value::Null, |a| Value::from(a + 1)),
        v.misreport.as_ref().map_or(Value::Null, |r| Value::String(row_text(r))),
        v.permutation
            .as_ref()
            .map_or(Value::Null, |p| Value::String(p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))),
        exact_cell(&v.gain),
    ]
}
