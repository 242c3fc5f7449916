//! `amd solve|sweep|cert-verify|det-search`.

use std::fs;

use serde_json::Value;
use sinkmech::{Mechanism, Rational, Scalar};
use sinkmech_amd::simplex::solve_with;
use sinkmech_amd::{
    build_lp, deterministic_exhaustive, solve_lp_with, sweep_levels, verify_dual_certificate, DualCertificate,
    MechanismClass, ProfileIndexing, SolverOptions, SweepOptions, SweepValue,
};

use crate::args::{AmdCommand, ClassName, DesignArgs, Numeric};
use crate::error::{CliError, CliResult};
use crate::output::{decimal_cell, describe, exact_cell, row_text, Report};

fn width(text: &str) -> CliResult<Rational> {
    Rational::parse_scalar(text).map_err(|e| CliError::Invalid(format!("--M: {e}")))
}

fn class(name: ClassName) -> MechanismClass {
    match name {
        ClassName::Randomized => MechanismClass::Unrestricted,
        ClassName::GeneralizedSink => MechanismClass::GeneralizedSink,
        ClassName::Deterministic => MechanismClass::Deterministic,
    }
}

pub fn amd(command: &AmdCommand) -> CliResult<Report> {
    match command {
        AmdCommand::Solve {
            k,
            design,
            show_mechanism,
            export,
        } => solve(*k, design, *show_mechanism, export.as_deref()),
        AmdCommand::Sweep { k_min, k_max, design } => sweep(*k_min, *k_max, design),
        AmdCommand::CertVerify { k, n, m, width: w, cert } => cert_verify(*n, *m, *k, &width(w)?, cert),
        AmdCommand::DetSearch { n, m, k, width: w } => det_search(&ProfileIndexing::new(*n, *m, *k, width(w)?)?),
    }
}

const SOLVE_COLUMNS: [&str; 10] = ["class", "n", "m", "k", "M", "value", "decimal", "variables", "rows", "pivots"];

fn solve(k: usize, args: &DesignArgs, show_mechanism: bool, export: Option<&std::path::Path>) -> CliResult<Report> {
    let indexing = ProfileIndexing::with_budget(args.n, args.m, k, width(&args.width)?, args.budget)?;
    let class = class(args.class);
    if class == MechanismClass::Deterministic {
        return det_search(&indexing);
    }
    let design = build_lp(class, &indexing, !args.no_symmetry)?;
    log::info!(
        "{} program: {} variables, {} rows",
        class.label(),
        design.lp.num_variables(),
        design.lp.num_rows()
    );
    if let Some(path) = export {
        fs::write(path, design.lp.to_lp_text()).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    }
    let options = SolverOptions {
        max_pivots: args.max_pivots,
        ..Default::default()
    };
    let mut report = Report::new(&SOLVE_COLUMNS);
    let (value, decimal, pivots) = match args.numeric {
        Numeric::Exact => {
            let s = solve_lp_with(&design.lp, options)?;
            report.line(describe(&s.value));
            if show_mechanism {
                let mechanism = design.mechanism(&s.primal)?;
                for v in 0..indexing.count() {
                    let profile = indexing.profile(v);
                    let lottery = mechanism.run(&profile)?;
                    report.line(format!(
                        "#{v} {profile}: alternatives ({}) payments ({})",
                        row_text(&lottery.alternative_distribution(indexing.m())),
                        row_text(&lottery.expected_payments())
                    ));
                }
            }
            (exact_cell(&s.value), decimal_cell(&s.value), s.pivots)
        }
        Numeric::Float => {
            if show_mechanism {
                return Err(CliError::Invalid("--show-mechanism needs exact arithmetic".into()));
            }
            let s = solve_with::<f64>(&design.lp, options)?;
            report.line(format!("{}", s.value));
            (Value::Null, decimal_cell(&s.value), s.pivots)
        }
    };
    report.row(vec![
        Value::String(class.label().into()),
        Value::from(args.n),
        Value::from(args.m),
        Value::from(k),
        exact_cell(&indexing.grid.width),
        value,
        decimal,
        Value::from(design.lp.num_variables()),
        Value::from(design.lp.num_rows()),
        Value::from(pivots),
    ]);
    Ok(report)
}

fn sweep(k_min: usize, k_max: usize, args: &DesignArgs) -> CliResult<Report> {
    let options = SweepOptions {
        n: args.n,
        m: args.m,
        width: width(&args.width)?,
        use_symmetry: !args.no_symmetry,
        exact: args.numeric == Numeric::Exact,
        max_pivots: args.max_pivots,
        profile_budget: args.budget,
    };
    let table = sweep_levels(class(args.class), k_min, k_max, &options)?;
    let mut report = Report::new(&SOLVE_COLUMNS);
    report.text = table.to_csv();
    for r in &table.rows {
        report.row(vec![
            Value::String(table.class.label().into()),
            Value::from(args.n),
            Value::from(args.m),
            Value::from(r.k),
            exact_cell(&options.width),
            match &r.value {
                SweepValue::Exact(q) => exact_cell(q),
                SweepValue::Float(_) => Value::Null,
            },
            decimal_cell(&r.value.to_f64()),
            Value::from(r.variables),
            Value::from(r.rows),
            Value::from(r.pivots),
        ]);
    }
    if let Some(t) = &table.truncated {
        log::warn!("sweep stopped at k = {}: {}", t.k, t.reason);
    }
    Ok(report)
}

fn cert_verify(n: usize, m: usize, k: usize, width: &Rational, source: &str) -> CliResult<Report> {
    let cert = if source == "bundled" {
        DualCertificate::appendix()
    } else {
        let text = fs::read_to_string(source).map_err(|e| CliError::Runtime(format!("{source}: {e}")))?;
        DualCertificate::parse(&text)?
    };
    let indexing = ProfileIndexing::new(n, m, k, width.clone())?;
    let design = build_lp(MechanismClass::Unrestricted, &indexing, true)?;
    let result = verify_dual_certificate(&design, &cert)?;
    let mut report = Report::new(&["feasible", "objective", "decimal", "sign_violations", "residuals"]);
    report.line(result.summary());
    report.row(vec![
        Value::Bool(result.feasible),
        exact_cell(&result.objective),
        decimal_cell(&result.objective),
        Value::from(result.sign_violations.len()),
        Value::from(result.residuals.len()),
    ]);
    if !result.feasible {
        return Err(CliError::Runtime(report.render(crate::output::Format::Text)));
    }
    Ok(report)
}

fn det_search(indexing: &ProfileIndexing) -> CliResult<Report> {
    let opt = deterministic_exhaustive(indexing)?;
    let mut report = Report::new(&["value", "decimal", "enumerated", "pruned", "programs_solved", "allocation"]);
    report.line(describe(&opt.value));
    report.line(format!(
        "{} allocations enumerated, {} pruned by weak monotonicity, {} payment programs solved",
        opt.enumerated, opt.pruned_by_monotonicity, opt.programs_solved
    ));
    let allocation = opt.allocation.iter().map(|a| (a + 1).to_string()).collect::<Vec<_>>().join(" ");
    report.line(format!("allocation by profile: {allocation}"));
    report.row(vec![
        exact_cell(&opt.value),
        decimal_cell(&opt.value),
        Value::from(opt.enumerated),
        Value::from(opt.pruned_by_monotonicity),
        Value::from(opt.programs_solved),
        Value::String(allocation),
    ]);
    Ok(report)
}
