//! Sparse linear programs with exact rational data.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use sinkmech::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    NonNegative,
    Free,
}

/// Which constraint family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowKind {
    /// Truthful reporting beats one misreport for one agent.
    Strategyproof,
    /// Allocation probabilities sum to one.
    Simplex,
    /// Payments sum to zero.
    BudgetBalance,
    /// `ℓ` bounds the welfare loss at one profile.
    MaxInefficiency,
    /// Anything else (feasibility helpers, duals of other programs).
    Other,
}

impl RowKind {
    pub fn label(self) -> &'static str {
        match self {
            RowKind::Strategyproof => "sp",
            RowKind::Simplex => "scf",
            RowKind::BudgetBalance => "bb",
            RowKind::MaxInefficiency => "ineff",
            RowKind::Other => "row",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub bound: Bound,
    pub cost: Rational,
}

/// `Σ_j coeffs[j] · x_j  sense  rhs`, coefficients sorted by column with no
/// explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub kind: RowKind,
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl Row {
    pub fn new(
        name: impl Into<String>,
        kind: RowKind,
        coeffs: impl IntoIterator<Item = (usize, Rational)>,
        sense: Sense,
        rhs: Rational,
    ) -> Self {
        Self {
            name: name.into(),
            kind,
            coeffs: normalize(coeffs),
            sense,
            rhs,
        }
    }

    pub fn activity(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    /// `activity − rhs` when the row is violated, zero otherwise.
    pub fn violation(&self, x: &[Rational]) -> Rational {
        let gap = self.activity(x) - &self.rhs;
        let bad = match self.sense {
            Sense::Le => gap.is_positive(),
            Sense::Ge => gap.is_negative(),
            Sense::Eq => !gap.is_zero(),
        };
        if bad {
            gap
        } else {
            Rational::zero()
        }
    }
}

/// Merges repeated columns and drops zero coefficients.
pub fn normalize(coeffs: impl IntoIterator<Item = (usize, Rational)>) -> Vec<(usize, Rational)> {
    let mut sorted: Vec<(usize, Rational)> = coeffs.into_iter().collect();
    sorted.sort_by_key(|(j, _)| *j);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(sorted.len());
    for (j, a) in sorted {
        match out.last_mut() {
            Some((last, acc)) if *last == j => *acc += a,
            _ => out.push((j, a)),
        }
    }
    out.retain(|(_, a)| !a.is_zero());
    out
}

/// Minimise `Σ cost_j x_j` subject to the rows and variable bounds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub variables: Vec<Variable>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn add_variable(&mut self, name: impl Into<String>, bound: Bound, cost: Rational) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            bound,
            cost,
        });
        self.variables.len() - 1
    }

    pub fn add_row(&mut self, row: Row) -> usize {
        self.rows.push(row);
        self.rows.len() - 1
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn count_rows(&self, kind: RowKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }

    pub fn objective(&self, x: &[Rational]) -> Rational {
        self.variables.iter().zip(x).map(|(v, xj)| &v.cost * xj).sum()
    }

    /// Rows (by index) that `x` violates, including bound violations as
    /// `None`.
    pub fn violated_rows(&self, x: &[Rational]) -> Vec<Option<usize>> {
        let mut bad: Vec<Option<usize>> = self
            .variables
            .iter()
            .zip(x)
            .filter(|(v, xj)| v.bound == Bound::NonNegative && xj.is_negative())
            .map(|_| None)
            .collect();
        bad.extend(
            self.rows
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.violation(x).is_zero())
                .map(|(i, _)| Some(i)),
        );
        bad
    }

    /// The Lagrangian dual, written again as a minimisation: variables are
    /// one multiplier per row (`≥ 0` for `Ge`, `≤ 0` for `Le` stored negated,
    /// free for `Eq`); rows are one per primal column. The optimum of the
    /// dual equals minus the primal optimum.
    pub fn dual(&self) -> LinearProgram {
        let mut dual = LinearProgram::default();
        let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.variables.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let (bound, sign) = match row.sense {
                Sense::Ge => (Bound::NonNegative, Rational::from_integer(1.into())),
                Sense::Le => (Bound::NonNegative, Rational::from_integer((-1).into())),
                Sense::Eq => (Bound::Free, Rational::from_integer(1.into())),
            };
            let y = dual.add_variable(format!("y_{}", row.name), bound, -(&sign * &row.rhs));
            debug_assert_eq!(y, i);
            for (j, a) in &row.coeffs {
                columns[*j].push((i, &sign * a));
            }
        }
        for (j, (var, col)) in self.variables.iter().zip(columns).enumerate() {
            let sense = match var.bound {
                Bound::NonNegative => Sense::Le,
                Bound::Free => Sense::Eq,
            };
            let row = Row::new(format!("col_{}", var.name), RowKind::Other, col, sense, var.cost.clone());
            let r = dual.add_row(row);
            debug_assert_eq!(r, j);
        }
        dual
    }

    /// CPLEX-style LP text with rationals written as `p/q`.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::new();
        out.push_str("\\ rational coefficients are written as p/q\nMinimize\n obj:");
        let mut any = false;
        for v in &self.variables {
            if !v.cost.is_zero() {
                write_term(&mut out, &v.cost, &v.name, !any);
                any = true;
            }
        }
        if !any {
            out.push_str(" 0");
        }
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            write!(out, " {}:", row.name).unwrap();
            for (k, (j, a)) in row.coeffs.iter().enumerate() {
                write_term(&mut out, a, &self.variables[*j].name, k == 0);
            }
            if row.coeffs.is_empty() {
                out.push_str(" 0");
            }
            writeln!(out, " {} {}", row.sense.symbol(), row.rhs).unwrap();
        }
        out.push_str("Bounds\n");
        for v in self.variables.iter().filter(|v| v.bound == Bound::Free) {
            writeln!(out, " {} free", v.name).unwrap();
        }
        out.push_str("End\n");
        out
    }
}

fn write_term(out: &mut String, coeff: &Rational, name: &str, first: bool) {
    let sign = match (coeff.is_negative(), first) {
        (true, _) => " -",
        (false, true) => "",
        (false, false) => " +",
    };
    let mag = coeff.abs();
    if mag == Rational::from_integer(1.into()) {
        write!(out, "{sign} {name}").unwrap();
    } else {
        write!(out, "{sign} {mag} {name}").unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sinkmech::Scalar;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn normalize_merges_and_drops() {
        let row = normalize([(3, q(1, 2)), (1, q(1, 1)), (3, q(-1, 2)), (0, q(2, 1))]);
        assert_eq!(row, vec![(0, q(2, 1)), (1, q(1, 1))]);
    }

    #[test]
    fn lp_text_shape() {
        let mut lp = LinearProgram::default();
        let x = lp.add_variable("x", Bound::NonNegative, q(1, 1));
        let y = lp.add_variable("y", Bound::Free, q(0, 1));
        lp.add_row(Row::new("c1", RowKind::Other, [(x, q(1, 2)), (y, q(-1, 1))], Sense::Ge, q(1, 3)));
        let text = lp.to_lp_text();
        assert!(text.contains(" c1: 1/2 x - y >= 1/3"), "{text}");
        assert!(text.contains(" y free"));
        assert!(text.contains("obj: x"));
    }

    #[test]
    fn dual_shape() {
        let mut lp = LinearProgram::default();
        let x = lp.add_variable("x", Bound::NonNegative, q(1, 1));
        lp.add_row(Row::new("a", RowKind::Other, [(x, q(1, 1))], Sense::Ge, q(2, 1)));
        lp.add_row(Row::new("b", RowKind::Other, [(x, q(1, 1))], Sense::Le, q(5, 1)));
        let d = lp.dual();
        assert_eq!(d.num_variables(), 2);
        assert_eq!(d.num_rows(), 1);
        assert_eq!(d.variables[0].cost, q(-2, 1));
        assert_eq!(d.variables[1].cost, q(5, 1));
        assert_eq!(d.rows[0].coeffs, vec![(0, q(1, 1)), (1, q(-1, 1))]);
    }
}
