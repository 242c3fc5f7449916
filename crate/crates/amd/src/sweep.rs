//! Optimal values of the design programs as the grid is refined.

use std::fmt::Write as _;

use rayon::prelude::*;
use sinkmech::{Rational, Scalar};

use crate::deterministic::deterministic_exhaustive;
use crate::design::{build_lp, MechanismClass};
use crate::error::{Error, Result};
use crate::indexing::ProfileIndexing;
use crate::simplex::{solve_lp_with, solve_with, SolverOptions};

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValue {
    Exact(Rational),
    Float(f64),
}

impl SweepValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            SweepValue::Exact(q) => Scalar::to_f64(q),
            SweepValue::Float(x) => *x,
        }
    }

    /// `p/q` for exact values, empty for floats.
    pub fn exact_text(&self) -> String {
        match self {
            SweepValue::Exact(q) => q.to_string(),
            SweepValue::Float(_) => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub value: SweepValue,
    pub variables: usize,
    pub rows: usize,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub k: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub class: MechanismClass,
    pub rows: Vec<SweepRow>,
    /// First level that could not be completed; later levels are omitted.
    pub truncated: Option<Truncation>,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub n: usize,
    pub m: usize,
    pub width: Rational,
    pub use_symmetry: bool,
    /// Exact rational solving; `false` switches to the floating-point mode.
    pub exact: bool,
    pub max_pivots: usize,
    /// Largest grid (in profiles) that may be built.
    pub profile_budget: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            n: 2,
            m: 2,
            width: Rational::from_int(1),
            use_symmetry: true,
            exact: true,
            max_pivots: SolverOptions::default().max_pivots,
            profile_budget: 4096,
        }
    }
}

fn solve_level(class: MechanismClass, k: usize, options: &SweepOptions) -> Result<SweepRow> {
    let indexing = ProfileIndexing::with_budget(options.n, options.m, k, options.width.clone(), options.profile_budget)?;
    if class == MechanismClass::Deterministic {
        if k != 2 {
            return Err(Error::Resource("exhaustive deterministic search covers k = 2 only".into()));
        }
        let opt = deterministic_exhaustive(&indexing)?;
        return Ok(SweepRow {
            k,
            value: SweepValue::Exact(opt.value),
            variables: 0,
            rows: 0,
            pivots: 0,
        });
    }
    let design = build_lp(class, &indexing, options.use_symmetry)?;
    let solver = SolverOptions {
        max_pivots: options.max_pivots,
        ..Default::default()
    };
    let (value, pivots) = if options.exact {
        let s = solve_lp_with(&design.lp, solver)?;
        (SweepValue::Exact(s.value), s.pivots)
    } else {
        let s = solve_with::<f64>(&design.lp, solver)?;
        (SweepValue::Float(s.value), s.pivots)
    };
    Ok(SweepRow {
        k,
        value,
        variables: design.lp.num_variables(),
        rows: design.lp.num_rows(),
        pivots,
    })
}

/// Solves the design program of `class` for every `k` in `k_min..=k_max`,
/// levels in parallel. A level that runs out of budget ends the table with a
/// truncation marker; any other failure is an error.
pub fn sweep_levels(class: MechanismClass, k_min: usize, k_max: usize, options: &SweepOptions) -> Result<SweepTable> {
    if k_min < 2 || k_max < k_min {
        return Err(Error::Argument(format!("need 2 <= k_min <= k_max, got {k_min}..={k_max}")));
    }
    let results: Vec<(usize, Result<SweepRow>)> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| (k, solve_level(class, k, options)))
        .collect();
    let mut table = SweepTable {
        class,
        rows: Vec::new(),
        truncated: None,
    };
    for (k, result) in results {
        match result {
            Ok(row) => table.rows.push(row),
            Err(Error::Resource(reason)) | Err(Error::Core(sinkmech::Error::Resource(reason))) => {
                table.truncated = Some(Truncation { k, reason });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(table)
}

impl SweepTable {
    /// `class,k,value,decimal,variables,rows,pivots`, plus a trailing
    /// `# truncated` comment line when the sweep stopped early.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,k,value,decimal,variables,rows,pivots\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:.12},{},{},{}",
                self.class.label(),
                r.k,
                r.value.exact_text(),
                r.value.to_f64(),
                r.variables,
                r.rows,
                r.pivots
            )
            .unwrap();
        }
        if let Some(t) = &self.truncated {
            writeln!(out, "# truncated at k={}: {}", t.k, t.reason).unwrap();
        }
        out
    }
}
