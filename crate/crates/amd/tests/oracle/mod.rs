//! A deliberately plain revised simplex used only as a cross-check: explicit
//! dense `B⁻¹`, primal orientation, Bland's rule throughout.

use num_traits::{One, Signed, Zero};
use sinkmech::Rational;
use sinkmech_amd::{Bound, LinearProgram, Sense};

#[derive(Debug, PartialEq)]
pub enum Outcome {
    Optimal(Rational, Vec<Rational>),
    Infeasible,
    Unbounded,
}

struct Standard {
    /// Dense columns of the equality system `A x = b`, `x ≥ 0`.
    cols: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    cost: Vec<Rational>,
    /// Source variable and sign for each structural column.
    source: Vec<Option<(usize, bool)>>,
    first_art: usize,
}

fn standardize(lp: &LinearProgram) -> Standard {
    let m = lp.num_rows();
    let mut dense = vec![vec![Rational::zero(); lp.num_variables()]; m];
    for (i, row) in lp.rows.iter().enumerate() {
        for (j, a) in &row.coeffs {
            dense[i][*j] = a.clone();
        }
    }
    let mut cols = Vec::new();
    let mut cost = Vec::new();
    let mut source = Vec::new();
    for (j, var) in lp.variables.iter().enumerate() {
        cols.push(dense.iter().map(|r| r[j].clone()).collect::<Vec<_>>());
        cost.push(var.cost.clone());
        source.push(Some((j, true)));
        if var.bound == Bound::Free {
            cols.push(dense.iter().map(|r| -r[j].clone()).collect());
            cost.push(-var.cost.clone());
            source.push(Some((j, false)));
        }
    }
    for (i, row) in lp.rows.iter().enumerate() {
        let s = match row.sense {
            Sense::Le => Rational::one(),
            Sense::Ge => -Rational::one(),
            Sense::Eq => continue,
        };
        let mut c = vec![Rational::zero(); m];
        c[i] = s;
        cols.push(c);
        cost.push(Rational::zero());
        source.push(None);
    }
    let mut b: Vec<Rational> = lp.rows.iter().map(|r| r.rhs.clone()).collect();
    for i in 0..m {
        if b[i].is_negative() {
            b[i] = -b[i].clone();
            for c in cols.iter_mut() {
                c[i] = -c[i].clone();
            }
        }
    }
    let first_art = cols.len();
    for i in 0..m {
        let mut c = vec![Rational::zero(); m];
        c[i] = Rational::one();
        cols.push(c);
        cost.push(Rational::zero());
        source.push(None);
    }
    Standard {
        cols,
        b,
        cost,
        source,
        first_art,
    }
}

struct Revised<'a> {
    s: &'a Standard,
    binv: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    xb: Vec<Rational>,
}

impl Revised<'_> {
    fn column(&self, j: usize) -> Vec<Rational> {
        self.binv
            .iter()
            .map(|row| row.iter().zip(&self.s.cols[j]).filter(|(_, a)| !a.is_zero()).map(|(x, a)| x * a).sum())
            .collect()
    }

    fn pivot(&mut self, r: usize, j: usize, d: &[Rational]) {
        let piv = d[r].clone();
        for x in self.binv[r].iter_mut() {
            *x /= &piv;
        }
        self.xb[r] /= &piv;
        let prow = self.binv[r].clone();
        let xr = self.xb[r].clone();
        for i in 0..self.binv.len() {
            if i != r && !d[i].is_zero() {
                for (x, p) in self.binv[i].iter_mut().zip(&prow) {
                    *x -= &d[i] * p;
                }
                self.xb[i] -= &d[i] * &xr;
            }
        }
        self.basis[r] = j;
    }

    /// Minimises `cost` over columns below `limit`. `Err(())` means unbounded.
    fn run(&mut self, cost: &[Rational], limit: usize) -> Result<(), ()> {
        loop {
            let m = self.basis.len();
            let y: Vec<Rational> = (0..m)
                .map(|k| (0..m).map(|i| &cost[self.basis[i]] * &self.binv[i][k]).sum())
                .collect();
            let entering = (0..limit).find(|&j| {
                !self.basis.contains(&j) && {
                    let reduced: Rational = cost[j].clone()
                        - self.s.cols[j].iter().zip(&y).map(|(a, yk)| a * yk).sum::<Rational>();
                    reduced.is_negative()
                }
            });
            let Some(j) = entering else { return Ok(()) };
            let d = self.column(j);
            let mut best: Option<(Rational, usize)> = None;
            for i in 0..m {
                let forced = self.basis[i] >= self.s.first_art && limit <= self.s.first_art && !d[i].is_zero();
                let ratio = if forced {
                    Rational::zero()
                } else if d[i].is_positive() {
                    &self.xb[i] / &d[i]
                } else {
                    continue;
                };
                let better = match &best {
                    None => true,
                    Some((br, bi)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((ratio, i));
                }
            }
            let Some((_, r)) = best else { return Err(()) };
            self.pivot(r, j, &d);
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Outcome {
    let s = standardize(lp);
    let m = s.b.len();
    let mut rev = Revised {
        s: &s,
        binv: (0..m)
            .map(|i| (0..m).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
            .collect(),
        basis: (s.first_art..s.first_art + m).collect(),
        xb: s.b.clone(),
    };
    let phase1: Vec<Rational> = (0..s.cols.len())
        .map(|j| if j >= s.first_art { Rational::one() } else { Rational::zero() })
        .collect();
    rev.run(&phase1, s.cols.len()).expect("phase one is bounded");
    let infeasibility: Rational = rev
        .basis
        .iter()
        .zip(&rev.xb)
        .filter(|(b, _)| **b >= s.first_art)
        .map(|(_, x)| x.clone())
        .sum();
    if infeasibility.is_positive() {
        return Outcome::Infeasible;
    }
    if rev.run(&s.cost, s.first_art).is_err() {
        return Outcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); lp.num_variables()];
    for (b, v) in rev.basis.iter().zip(&rev.xb) {
        if let Some((j, plus)) = s.source[*b] {
            if plus {
                x[j] += v;
            } else {
                x[j] -= v;
            }
        }
    }
    let value = lp.objective(&x);
    Outcome::Optimal(value, x)
}
