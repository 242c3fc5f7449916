//! Dual certificates for the symmetry-reduced randomized design program.
//!
//! A certificate assigns multipliers to rows: `lambda` to strategyproofness
//! rows, addressed by full profile indices, and `gamma`, `mu`, `delta` to the
//! simplex, budget-balance and inefficiency rows of an orbit, addressed by
//! reduced index. [`verify_dual_certificate`] maps the entries onto the rows
//! of a [`DesignLp`], checks `yᵀA ≤ c` column by column in exact arithmetic
//! and returns `bᵀy`, a lower bound on the program's optimum whenever the
//! check passes.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use sinkmech::{Rational, Scalar};

use crate::design::{DesignLp, FullRow, MechanismClass};
use crate::error::{Error, Result};
use crate::lp::Bound;

/// The certificate shipped with the crate (`n = m = 2`, `k = 3`, `M = 1`).
pub const APPENDIX_CERTIFICATE: &str = include_str!("../data/appendix_certificate.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LambdaKey {
    /// 1-based agent.
    pub agent: usize,
    pub truth: u64,
    pub lie: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DualCertificate {
    pub lambda: Vec<(LambdaKey, Rational)>,
    pub gamma: Vec<(usize, Rational)>,
    pub mu: Vec<(usize, Rational)>,
    pub delta: Vec<(usize, Rational)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Lambda,
    Gamma,
    Mu,
    Delta,
}

impl DualCertificate {
    pub fn appendix() -> Self {
        Self::parse(APPENDIX_CERTIFICATE).expect("bundled certificate parses")
    }

    /// Reads the text format: `[lambda]`, `[gamma]`, `[mu]`, `[delta]`
    /// section headers, one entry per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cert = Self::default();
        let mut section = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = Some(match name.trim() {
                    "lambda" => Section::Lambda,
                    "gamma" => Section::Gamma,
                    "mu" => Section::Mu,
                    "delta" => Section::Delta,
                    other => return Err(err(format!("unknown section {other:?}"))),
                });
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let int = |s: &str| s.parse::<u64>().map_err(|_| err(format!("expected an index, got {s:?}")));
            let value = |s: &str| Rational::parse_scalar(s).map_err(|e| err(e.to_string()));
            match section {
                None => return Err(err("entry before the first section header".into())),
                Some(Section::Lambda) => {
                    let [agent, truth, lie, y] = fields[..] else {
                        return Err(err(format!("lambda entries have 4 fields, found {}", fields.len())));
                    };
                    let key = LambdaKey {
                        agent: int(agent)? as usize,
                        truth: int(truth)?,
                        lie: int(lie)?,
                    };
                    cert.lambda.push((key, value(y)?));
                }
                Some(s) => {
                    let [r, y] = fields[..] else {
                        return Err(err(format!("entries have 2 fields, found {}", fields.len())));
                    };
                    let entry = (int(r)? as usize, value(y)?);
                    match s {
                        Section::Gamma => cert.gamma.push(entry),
                        Section::Mu => cert.mu.push(entry),
                        _ => cert.delta.push(entry),
                    }
                }
            }
        }
        Ok(cert)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("[lambda]\n");
        for (k, y) in &self.lambda {
            writeln!(out, "{} {} {} {y}", k.agent, k.truth, k.lie).unwrap();
        }
        for (name, entries) in [("gamma", &self.gamma), ("mu", &self.mu), ("delta", &self.delta)] {
            writeln!(out, "\n[{name}]").unwrap();
            for (r, y) in entries {
                writeln!(out, "{r} {y}").unwrap();
            }
        }
        out
    }

    /// Every multiplier multiplied by `t`.
    pub fn scaled(&self, t: &Rational) -> Self {
        let s = |v: &[(usize, Rational)]| v.iter().map(|(r, y)| (*r, y * t)).collect();
        Self {
            lambda: self.lambda.iter().map(|(k, y)| (*k, y * t)).collect(),
            gamma: s(&self.gamma),
            mu: s(&self.mu),
            delta: s(&self.delta),
        }
    }
}

/// A column whose dual constraint fails: `lhs = Σ_i a_ij y_i` against its
/// cost, with `≤` required for non-negative columns and `=` for free ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnResidual {
    pub column: usize,
    pub name: String,
    pub bound: Bound,
    pub lhs: Rational,
    pub cost: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub feasible: bool,
    pub objective: Rational,
    /// Entries with a multiplier of the wrong sign, as `(section, position)`.
    pub sign_violations: Vec<(&'static str, usize)>,
    pub residuals: Vec<ColumnResidual>,
}

impl CertificateReport {
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{}, objective {}",
            if self.feasible { "feasible" } else { "infeasible" },
            self.objective
        );
        for (section, pos) in &self.sign_violations {
            write!(out, "\n{section} entry {pos} has the wrong sign").unwrap();
        }
        for r in &self.residuals {
            let rel = if r.bound == Bound::Free { "=" } else { "<=" };
            write!(out, "\ncolumn {}: {} {rel} {} fails", r.name, r.lhs, r.cost).unwrap();
        }
        out
    }
}

/// Checks the anchor that fixes the reduced numbering of the `k = 3` program.
pub(crate) fn check_anchor(design: &DesignLp) -> Result<()> {
    let idx = &design.indexing;
    if design.class != MechanismClass::Unrestricted {
        return Ok(());
    }
    if let (Some(orbits), (2, 2, 3)) = (&design.orbits, (idx.n(), idx.m(), idx.k())) {
        let rep = orbits.representative(24)?;
        if rep != 52 {
            return Err(Error::Contract(format!(
                "reduced index 24 should represent full profile 52, found {rep}"
            )));
        }
    }
    Ok(())
}

/// Row multipliers `y` of `design.lp` encoded by `cert`.
pub fn certificate_multipliers(design: &DesignLp, cert: &DualCertificate) -> Result<Vec<Rational>> {
    let orbits = match (&design.orbits, design.class) {
        (Some(o), MechanismClass::Unrestricted) => o,
        _ => {
            return Err(Error::Argument(
                "certificates apply to the symmetry-reduced randomized program".into(),
            ))
        }
    };
    check_anchor(design)?;
    let idx = &design.indexing;
    let mut y = vec![Rational::zero(); design.lp.num_rows()];
    let mut add = |key: FullRow, value: &Rational| -> Result<()> {
        if let Some(r) = design.row_of(key)? {
            y[r] += value;
        }
        Ok(())
    };
    for (k, value) in &cert.lambda {
        if k.agent == 0 || k.agent > idx.n() || k.truth >= idx.count() || k.lie >= idx.count() {
            return Err(Error::Argument(format!("lambda entry {k:?} is outside the grid")));
        }
        let agent = k.agent - 1;
        let (rt, rl) = (idx.grid.rows_of(k.truth), idx.grid.rows_of(k.lie));
        let differs: Vec<usize> = (0..idx.n()).filter(|&i| rt[i] != rl[i]).collect();
        if differs != [agent] {
            return Err(Error::Argument(format!(
                "lambda entry {k:?} is not a unilateral misreport of agent {}",
                k.agent
            )));
        }
        add(
            FullRow::Strategyproof {
                agent,
                truth: k.truth,
                lie: k.lie,
            },
            value,
        )?;
    }
    let blocks: [(&[(usize, Rational)], fn(u64) -> FullRow); 3] = [
        (&cert.gamma, FullRow::Simplex),
        (&cert.mu, FullRow::BudgetBalance),
        (&cert.delta, FullRow::MaxInefficiency),
    ];
    for (entries, row) in blocks {
        for (r, value) in entries {
            add(row(orbits.representative(*r)?), value)?;
        }
    }
    Ok(y)
}

/// Exact dual-feasibility check of `cert` against the reduced program.
pub fn verify_dual_certificate(design: &DesignLp, cert: &DualCertificate) -> Result<CertificateReport> {
    let y = certificate_multipliers(design, cert)?;
    let lp = &design.lp;

    let mut sign_violations = Vec::new();
    for (pos, (_, v)) in cert.lambda.iter().enumerate() {
        if v.is_negative() {
            sign_violations.push(("lambda", pos));
        }
    }
    for (pos, (_, v)) in cert.delta.iter().enumerate() {
        if v.is_negative() {
            sign_violations.push(("delta", pos));
        }
    }
    let mut lhs = vec![Rational::zero(); lp.num_variables()];
    let mut objective = Rational::zero();
    for (row, yi) in lp.rows.iter().zip(&y) {
        if yi.is_zero() {
            continue;
        }
        for (j, a) in &row.coeffs {
            lhs[*j] += a * yi;
        }
        objective += &row.rhs * yi;
    }
    let residuals: Vec<ColumnResidual> = lp
        .variables
        .iter()
        .zip(lhs)
        .enumerate()
        .filter(|(_, (var, l))| match var.bound {
            Bound::NonNegative => *l > var.cost,
            Bound::Free => *l != var.cost,
        })
        .map(|(column, (var, l))| ColumnResidual {
            column,
            name: var.name.clone(),
            bound: var.bound,
            lhs: l,
            cost: var.cost.clone(),
        })
        .collect();
    Ok(CertificateReport {
        feasible: residuals.is_empty() && sign_violations.is_empty(),
        objective,
        sign_violations,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::build_lp;
    use crate::indexing::ProfileIndexing;

    fn reduced() -> DesignLp {
        let idx = ProfileIndexing::new(2, 2, 3, Rational::from_int(1)).unwrap();
        build_lp(MechanismClass::Unrestricted, &idx, true).unwrap()
    }

    #[test]
    fn appendix_certificate_is_one_seventh() {
        let report = verify_dual_certificate(&reduced(), &DualCertificate::appendix()).unwrap();
        assert!(report.feasible, "{}", report.summary());
        assert_eq!(report.objective, Rational::from_ratio(1, 7));
        assert_eq!(report.summary(), "feasible, objective 1/7");
    }

    #[test]
    fn zero_certificate() {
        let report = verify_dual_certificate(&reduced(), &DualCertificate::default()).unwrap();
        assert!(report.feasible);
        assert!(report.objective.is_zero());
    }

    #[test]
    fn text_round_trip() {
        let cert = DualCertificate::appendix();
        assert_eq!(DualCertificate::parse(&cert.to_text()).unwrap(), cert);
        assert_eq!(cert.lambda.len(), 12);
        assert_eq!((cert.gamma.len(), cert.mu.len(), cert.delta.len()), (9, 7, 3));
    }

    #[test]
    fn tampering_is_reported() {
        let design = reduced();
        let mut cert = DualCertificate::appendix();
        cert.delta[0].1 = Rational::from_ratio(-2, 7);
        let report = verify_dual_certificate(&design, &cert).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.sign_violations, vec![("delta", 0)]);

        let mut cert = DualCertificate::appendix();
        cert.mu[0].1 = Rational::zero();
        let report = verify_dual_certificate(&design, &cert).unwrap();
        assert!(!report.feasible);
        assert!(report.residuals.iter().any(|r| r.bound == Bound::Free));
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(DualCertificate::parse("1 2/7"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(DualCertificate::parse("[lambda]\n1 2 3"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(DualCertificate::parse("[sigma]"), Err(Error::Parse { .. })));
        let design = reduced();
        let out_of_range = DualCertificate {
            gamma: vec![(27, Rational::from_int(1))],
            ..Default::default()
        };
        assert!(matches!(verify_dual_certificate(&design, &out_of_range), Err(Error::Argument(_))));
        let not_unilateral = DualCertificate {
            lambda: vec![(LambdaKey { agent: 1, truth: 0, lie: 80 }, Rational::from_int(1))],
            ..Default::default()
        };
        assert!(matches!(verify_dual_certificate(&design, &not_unilateral), Err(Error::Argument(_))));
    }
}
