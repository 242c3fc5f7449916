//! Dense two-phase tableau simplex: least-index pricing with a
//! lexicographic ratio test.
//!
//! The solver is generic over [`Scalar`]: with exact rationals every pivot is
//! exact and optimality is decided without tolerances; with `f64` the
//! tolerance of the scalar mode (`1e-9`) is used for sign tests. Each row gets
//! an artificial column that is never removed, so the row duals can be read
//! off the final tableau as `c_B · B⁻¹`.
//!
//! Programs with many more rows than columns are solved through their dual,
//! which keeps the tableau small.

use num_traits::Zero;
use sinkmech::{Rational, Scalar};

use crate::error::{Error, Result};
use crate::hybrid::HybridRational;
use crate::lp::{Bound, LinearProgram, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Dual when the program has more rows than variables.
    #[default]
    Auto,
    Primal,
    Dual,
}

/// Optimal value, a primal optimum and row multipliers `y` with
/// `c − Aᵀy ≥ 0` on non-negative columns, `= 0` on free ones, `y ≥ 0` on
/// `≥` rows, `y ≤ 0` on `≤` rows, and `bᵀy` equal to the value.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<S> {
    pub value: S,
    pub primal: Vec<S>,
    pub dual: Vec<S>,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub orientation: Orientation,
    pub max_pivots: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            orientation: Orientation::Auto,
            max_pivots: 5_000_000,
        }
    }
}

/// Solves `lp` exactly. The returned solution is checked against every row
/// and against strong duality before it is handed back.
pub fn solve_lp(lp: &LinearProgram) -> Result<Solution<Rational>> {
    solve_lp_with(lp, SolverOptions::default())
}

/// [`solve_lp`] with explicit options.
pub fn solve_lp_with(lp: &LinearProgram, options: SolverOptions) -> Result<Solution<Rational>> {
    let s = solve_with::<HybridRational>(lp, options)?;
    let exact = |v: &[HybridRational]| v.iter().map(HybridRational::to_rational).collect();
    let solution = Solution {
        value: s.value.to_rational(),
        primal: exact(&s.primal),
        dual: exact(&s.dual),
        pivots: s.pivots,
    };
    certify(lp, &solution)?;
    Ok(solution)
}

/// Floating-point solve for instances too large for exact arithmetic.
pub fn solve_lp_float(lp: &LinearProgram) -> Result<Solution<f64>> {
    solve_with::<f64>(lp, SolverOptions::default())
}

pub fn solve_with<S: Scalar>(lp: &LinearProgram, options: SolverOptions) -> Result<Solution<S>> {
    let use_dual = match options.orientation {
        Orientation::Auto => lp.num_rows() > lp.num_variables(),
        Orientation::Primal => false,
        Orientation::Dual => true,
    };
    if !use_dual {
        return Tableau::<S>::build(lp).run(options.max_pivots);
    }
    let dual_lp = lp.dual();
    let inner = Tableau::<S>::build(&dual_lp)
        .run(options.max_pivots)
        .map_err(|e| match e {
            // A dual that is unbounded means an infeasible primal and vice
            // versa (the primal is never both infeasible and dual-infeasible
            // for the programs built here).
            Error::Unbounded(_) => Error::Infeasible("dual program is unbounded".into()),
            Error::Infeasible(_) => Error::Unbounded("dual program is infeasible".into()),
            other => other,
        })?;
    let primal = inner.dual.iter().map(|u| -u.clone()).collect();
    let dual = lp
        .rows
        .iter()
        .zip(&inner.primal)
        .map(|(row, w)| match row.sense {
            Sense::Le => -w.clone(),
            _ => w.clone(),
        })
        .collect();
    Ok(Solution {
        value: -inner.value,
        primal,
        dual,
        pivots: inner.pivots,
    })
}

/// Exact residual check: primal feasibility, dual feasibility and equal
/// objectives.
pub fn certify(lp: &LinearProgram, s: &Solution<Rational>) -> Result<()> {
    let bad = lp.violated_rows(&s.primal);
    if !bad.is_empty() {
        return Err(Error::Contract(format!("solution violates {} rows or bounds", bad.len())));
    }
    if lp.objective(&s.primal) != s.value {
        return Err(Error::Contract("primal objective differs from reported value".into()));
    }
    let mut reduced: Vec<Rational> = lp.variables.iter().map(|v| v.cost.clone()).collect();
    let mut bound = Rational::zero();
    for (row, y) in lp.rows.iter().zip(&s.dual) {
        let sign_ok = match row.sense {
            Sense::Ge => *y >= Rational::zero(),
            Sense::Le => *y <= Rational::zero(),
            Sense::Eq => true,
        };
        if !sign_ok {
            return Err(Error::Contract(format!("multiplier of row {} has the wrong sign", row.name)));
        }
        for (j, a) in &row.coeffs {
            reduced[*j] -= a * y;
        }
        bound += &row.rhs * y;
    }
    for (var, d) in lp.variables.iter().zip(&reduced) {
        let ok = match var.bound {
            Bound::NonNegative => *d >= Rational::zero(),
            Bound::Free => d.is_zero(),
        };
        if !ok {
            return Err(Error::Contract(format!("reduced cost of {} is {d}", var.name)));
        }
    }
    if bound != s.value {
        return Err(Error::Contract(format!("dual bound {bound} differs from value {}", s.value)));
    }
    Ok(())
}

/// Column of a standard-form variable in terms of the source program.
#[derive(Debug, Clone, Copy)]
enum Origin {
    Plus(usize),
    Minus(usize),
    Slack,
    Artificial(usize),
}

struct Tableau<S> {
    /// `rows × (cols + 1)`, right-hand side last.
    t: Vec<Vec<S>>,
    /// Reduced costs, with minus the objective value last.
    obj: Vec<S>,
    cost: Vec<S>,
    basis: Vec<usize>,
    origin: Vec<Origin>,
    flip: Vec<bool>,
    first_artificial: usize,
    num_source_vars: usize,
    pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.num_rows();
        let mut origin = Vec::new();
        let mut col_of_var = Vec::with_capacity(lp.num_variables());
        let mut cost = Vec::new();
        for (j, v) in lp.variables.iter().enumerate() {
            col_of_var.push(origin.len());
            origin.push(Origin::Plus(j));
            cost.push(S::from_rational(&v.cost));
            if v.bound == Bound::Free {
                origin.push(Origin::Minus(j));
                cost.push(-S::from_rational(&v.cost));
            }
        }
        let mut slack_of_row = vec![None; m];
        for (i, row) in lp.rows.iter().enumerate() {
            if row.sense != Sense::Eq {
                slack_of_row[i] = Some(origin.len());
                origin.push(Origin::Slack);
                cost.push(S::zero());
            }
        }
        let first_artificial = origin.len();
        for i in 0..m {
            origin.push(Origin::Artificial(i));
            cost.push(S::zero());
        }
        let width = origin.len() + 1;

        let mut t = Vec::with_capacity(m);
        let mut flip = Vec::with_capacity(m);
        for (i, row) in lp.rows.iter().enumerate() {
            let negate = row.rhs < Rational::zero();
            let signed = |x: S| if negate { -x } else { x };
            let mut r = vec![S::zero(); width];
            for (j, a) in &row.coeffs {
                let c = col_of_var[*j];
                let a = S::from_rational(a);
                if lp.variables[*j].bound == Bound::Free {
                    r[c + 1] = signed(-a.clone());
                }
                r[c] = signed(a);
            }
            if let Some(s) = slack_of_row[i] {
                r[s] = signed(if row.sense == Sense::Le { S::one() } else { -S::one() });
            }
            r[first_artificial + i] = S::one();
            r[width - 1] = signed(S::from_rational(&row.rhs));
            t.push(r);
            flip.push(negate);
        }

        // A slack with coefficient +1 starts in the basis; every other row
        // starts on its artificial. Phase one minimises the sum of the basic
        // artificials.
        let basis: Vec<usize> = (0..m)
            .map(|i| match slack_of_row[i] {
                Some(s) if t[i][s] == S::one() => s,
                _ => first_artificial + i,
            })
            .collect();
        let mut obj = vec![S::zero(); width];
        for (r, &b) in t.iter().zip(&basis) {
            if b < first_artificial {
                continue;
            }
            for (j, v) in r.iter().enumerate() {
                if (j < first_artificial || j == width - 1) && !v.is_zero() {
                    obj[j] = obj[j].clone() - v;
                }
            }
        }
        Self {
            t,
            obj,
            cost,
            basis,
            origin,
            flip,
            first_artificial,
            num_source_vars: lp.num_variables(),
            pivots: 0,
        }
    }

    fn rhs(&self) -> usize {
        self.origin.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = S::one() / self.t[r][c].clone();
        let mut prow: Vec<(usize, S)> = Vec::new();
        for (j, v) in self.t[r].iter_mut().enumerate() {
            if !v.is_zero() {
                *v = v.clone() * &inv;
                prow.push((j, v.clone()));
            }
        }
        self.t[r][c] = S::one();
        let eliminate = |row: &mut Vec<S>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (j, v) in &prow {
                let updated = row[*j].clone() - f.clone() * v;
                row[*j] = if !S::EXACT && updated.is_negligible() {
                    S::zero()
                } else {
                    updated
                };
            }
            row[c] = S::zero();
        };
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Minimum-ratio row for entering column `c`. Ties are resolved by
    /// comparing the rows of `B⁻¹` (the artificial block, which starts as the
    /// identity) divided by their pivot entries, lexicographically.
    fn ratio_test(&self, c: usize) -> Option<usize> {
        let tol = S::tolerance();
        let rhs = self.rhs();
        let mut min: Option<S> = None;
        let mut ties: Vec<usize> = Vec::new();
        for (i, row) in self.t.iter().enumerate() {
            if row[c] > tol {
                let ratio = row[rhs].clone() / row[c].clone();
                match &min {
                    Some(m) if (ratio.clone() - m).is_negligible() => ties.push(i),
                    Some(m) if ratio > *m => {}
                    _ => {
                        min = Some(ratio);
                        ties.clear();
                        ties.push(i);
                    }
                }
            }
        }
        min.as_ref()?;
        let mut col = self.first_artificial;
        while ties.len() > 1 && col < self.rhs() {
            let scaled: Vec<S> = ties.iter().map(|&i| self.t[i][col].clone() / self.t[i][c].clone()).collect();
            let lo = scaled.iter().fold(scaled[0].clone(), |a, b| if *b < a { b.clone() } else { a });
            ties = ties
                .into_iter()
                .zip(scaled)
                .filter(|(_, v)| (v.clone() - &lo).is_negligible())
                .map(|(i, _)| i)
                .collect();
            col += 1;
        }
        Some(ties[0])
    }

    /// Pivots until optimal. Columns at or beyond `limit` never enter.
    ///
    /// The entering column is the least-index one with a negative reduced
    /// cost; the leaving row comes from [`Self::ratio_test`], whose
    /// lexicographic tie-break keeps every basis distinct, so the method
    /// cannot cycle.
    fn optimize(&mut self, limit: usize, max_pivots: usize, stop_at_zero: bool) -> Result<()> {
        let neg_tol = -S::tolerance();
        let rhs = self.rhs();
        loop {
            if stop_at_zero && self.obj[rhs].is_negligible() {
                return Ok(());
            }
            let Some(c) = (0..limit).find(|&j| self.obj[j] < neg_tol) else {
                return Ok(());
            };
            let Some(r) = self.ratio_test(c) else {
                return Err(Error::Unbounded(format!("column {c} can grow without bound")));
            };
            if self.pivots >= max_pivots {
                return Err(Error::Resource(format!("pivot limit {max_pivots} reached")));
            }
            self.pivot(r, c);
        }
    }

    fn run(mut self, max_pivots: usize) -> Result<Solution<S>> {
        let rhs = self.rhs();
        let art = self.first_artificial;
        self.optimize(art, max_pivots, true)?;
        let infeasibility = -self.obj[rhs].clone();
        if infeasibility.exceeds(&S::zero()) {
            return Err(Error::Infeasible(format!("phase one ends at {infeasibility}")));
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..self.t.len() {
            if self.basis[r] >= art {
                if let Some(c) = (0..art).find(|&j| !self.t[r][j].is_negligible()) {
                    self.pivot(r, c);
                }
            }
        }
        // Phase two reduced costs.
        let mut obj: Vec<S> = self.cost.clone();
        obj.push(S::zero());
        for (r, row) in self.t.iter().enumerate() {
            let cb = &self.cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    obj[j] = obj[j].clone() - cb.clone() * v;
                }
            }
        }
        self.obj = obj;
        self.optimize(art, max_pivots, false)?;
        Ok(self.extract())
    }

    fn extract(&self) -> Solution<S> {
        let rhs = self.rhs();
        let mut primal = vec![S::zero(); self.num_source_vars];
        for (r, &col) in self.basis.iter().enumerate() {
            match self.origin[col] {
                Origin::Plus(j) => primal[j] = primal[j].clone() + &self.t[r][rhs],
                Origin::Minus(j) => primal[j] = primal[j].clone() - &self.t[r][rhs],
                Origin::Slack | Origin::Artificial(_) => {}
            }
        }
        let m = self.t.len();
        let mut dual = vec![S::zero(); m];
        for (r, row) in self.t.iter().enumerate() {
            let cb = &self.cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (i, y) in dual.iter_mut().enumerate() {
                let a = &row[self.first_artificial + i];
                if !a.is_zero() {
                    *y = y.clone() + cb.clone() * a;
                }
            }
        }
        for (y, flipped) in dual.iter_mut().zip(&self.flip) {
            if *flipped {
                *y = -y.clone();
            }
        }
        debug_assert!(matches!(self.origin[self.first_artificial], Origin::Artificial(0)) || m == 0);
        Solution {
            value: -self.obj[rhs].clone(),
            primal,
            dual,
            pivots: self.pivots,
        }
    }
}
