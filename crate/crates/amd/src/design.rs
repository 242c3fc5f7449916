//! Mechanism-design linear programs over a valuation grid.
//!
//! The unrestricted program has, per profile `v`, lottery variables
//! `f_a(v) ≥ 0`, free payments `p_i(v)` and one shared bound `ℓ ≥ 0` on the
//! absolute inefficiency, which is minimised:
//!
//! * SP: `v_i·f(v) − p_i(v) − v_i·f(v') + p_i(v') ≥ 0` for every agent and
//!   every grid misreport `v' ≠ v` of that agent,
//! * simplex: `Σ_a f_a(v) = 1`,
//! * budget balance: `Σ_i p_i(v) = 0`,
//! * inefficiency: `ℓ + Σ_a W_a(v) f_a(v) ≥ max_a W_a(v)`.
//!
//! The generalized-sink program (two agents) replaces `f` and `p` by sink
//! probabilities `g_s(v)`; the allocation is the single-sink choice for the
//! drawn sink and payments vanish.
//!
//! With symmetry enabled, variables in the same orbit are identified (their
//! columns summed), rows are mapped accordingly, and duplicate rows are
//! merged. Every full-instance row keeps a pointer to the reduced row it
//! became.

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;
use sinkmech::metrics::efficient_alternative;
use sinkmech::{
    Alternative, Mechanism, Outcome, RandomizedOutcome, Rational, Scalar, ValuationProfile,
};

use crate::error::{Error, Result};
use crate::indexing::{OrbitTable, ProfileIndexing, Symmetry};
use crate::lp::{normalize, Bound, LinearProgram, Row, RowKind, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismClass {
    /// Any randomized, budget-balanced, strategyproof mechanism.
    Unrestricted,
    /// Generalized sink mechanisms; two agents only.
    GeneralizedSink,
    /// Deterministic mechanisms; handled by exhaustive search, not an LP.
    Deterministic,
}

impl MechanismClass {
    pub fn label(self) -> &'static str {
        match self {
            MechanismClass::Unrestricted => "randomized",
            MechanismClass::GeneralizedSink => "generalized-sink",
            MechanismClass::Deterministic => "deterministic",
        }
    }
}

/// Identity of a row of the full (unreduced) program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FullRow {
    /// Agent (0-based), truthful profile, profile with that agent's misreport.
    Strategyproof { agent: usize, truth: u64, lie: u64 },
    Simplex(u64),
    BudgetBalance(u64),
    MaxInefficiency(u64),
}

/// A program together with the bookkeeping needed to read its solution back
/// as a mechanism and to map certificate entries onto its rows.
#[derive(Debug, Clone)]
pub struct DesignLp {
    pub class: MechanismClass,
    pub indexing: ProfileIndexing,
    pub orbits: Option<OrbitTable>,
    pub lp: LinearProgram,
    /// Program column of every full variable.
    pub column_of: Vec<usize>,
    /// Program column of `ℓ`.
    pub ell: usize,
    row_of: HashMap<FullRow, Option<usize>>,
}

struct Layout {
    class: MechanismClass,
    n: usize,
    m: usize,
    count: u64,
}

impl Layout {
    fn f(&self, v: u64, a: usize) -> usize {
        v as usize * self.m + a
    }

    fn p(&self, v: u64, i: usize) -> usize {
        self.count as usize * self.m + v as usize * self.n + i
    }

    fn g(&self, v: u64, s: usize) -> usize {
        v as usize * self.n + s
    }

    fn ell(&self) -> usize {
        match self.class {
            MechanismClass::Unrestricted => self.count as usize * (self.m + self.n),
            _ => self.count as usize * self.n,
        }
    }

    fn num_vars(&self) -> usize {
        self.ell() + 1
    }

    fn name(&self, j: usize) -> String {
        if j == self.ell() {
            return "l".into();
        }
        match self.class {
            MechanismClass::Unrestricted if j < self.count as usize * self.m => {
                format!("f_{}_{}", Alternative(j % self.m), j / self.m)
            }
            MechanismClass::Unrestricted => {
                let off = j - self.count as usize * self.m;
                format!("p_{}_{}", off % self.n + 1, off / self.n)
            }
            _ => format!("g_{}_{}", j % self.n + 1, j / self.n),
        }
    }

    /// Image of a full variable under a relabeling.
    fn image(&self, indexing: &ProfileIndexing, g: &crate::indexing::Relabeling, j: usize) -> usize {
        if j == self.ell() {
            return j;
        }
        match self.class {
            MechanismClass::Unrestricted if j < self.count as usize * self.m => {
                let (v, a) = ((j / self.m) as u64, j % self.m);
                self.f(g.apply(indexing, v), g.alternatives[a])
            }
            MechanismClass::Unrestricted => {
                let off = j - self.count as usize * self.m;
                let (v, i) = ((off / self.n) as u64, off % self.n);
                self.p(g.apply(indexing, v), g.agents[i])
            }
            _ => {
                let (v, s) = ((j / self.n) as u64, j % self.n);
                self.g(g.apply(indexing, v), g.agents[s])
            }
        }
    }
}

fn welfare(profile: &ValuationProfile<Rational>, a: usize) -> Rational {
    (0..profile.agents()).map(|i| profile.value(i, Alternative(a)).clone()).sum()
}

/// Alternative chosen by the single-sink mechanism with sink `s`.
fn sink_choice(profile: &ValuationProfile<Rational>, s: usize) -> usize {
    efficient_alternative(profile, &[s]).expect("two agents, one excluded").0
}

pub fn build_lp(class: MechanismClass, indexing: &ProfileIndexing, use_symmetry: bool) -> Result<DesignLp> {
    let (n, m) = (indexing.n(), indexing.m());
    match class {
        MechanismClass::Deterministic => {
            return Err(Error::Argument(
                "deterministic mechanisms are searched exhaustively, not by LP".into(),
            ))
        }
        MechanismClass::GeneralizedSink if n != 2 => {
            return Err(Error::Argument(format!("the generalized-sink program needs n = 2, got {n}")))
        }
        _ => {}
    }
    let layout = Layout {
        class,
        n,
        m,
        count: indexing.count(),
    };
    let orbits = use_symmetry.then(|| {
        let symmetry = match class {
            MechanismClass::Unrestricted => Symmetry::Full,
            // Ties in the sink's choice break towards the first alternative,
            // so relabeling alternatives is not a symmetry of this class.
            _ => Symmetry::AgentsOnly,
        };
        OrbitTable::new(indexing, symmetry)
    });

    // Variable identification.
    let num_full = layout.num_vars();
    let canonical: Vec<usize> = match &orbits {
        Some(o) => (0..num_full)
            .map(|j| o.group.iter().map(|g| layout.image(indexing, g, j)).min().unwrap_or(j))
            .collect(),
        None => (0..num_full).collect(),
    };
    let mut lp = LinearProgram::default();
    let mut column_of = vec![usize::MAX; num_full];
    for j in 0..num_full {
        if canonical[j] == j {
            let bound = match (class, j) {
                (MechanismClass::Unrestricted, j) if j >= layout.count as usize * m && j != layout.ell() => {
                    Bound::Free
                }
                _ => Bound::NonNegative,
            };
            let cost = if j == layout.ell() { Rational::from_int(1) } else { Rational::zero() };
            column_of[j] = lp.add_variable(layout.name(j), bound, cost);
        }
    }
    for j in 0..num_full {
        column_of[j] = column_of[canonical[j]];
    }
    let ell = column_of[layout.ell()];

    let full_rows = full_rows(&layout, indexing);
    let built: Vec<Row> = full_rows
        .par_iter()
        .map(|key| full_row(&layout, indexing, *key))
        .collect();

    let mut row_of = HashMap::with_capacity(full_rows.len());
    let mut seen: HashMap<(Sense, Rational, Vec<(usize, Rational)>), usize> = HashMap::new();
    for (key, row) in full_rows.into_iter().zip(built) {
        let coeffs = normalize(row.coeffs.iter().map(|(j, a)| (column_of[*j], a.clone())));
        if coeffs.is_empty() {
            let trivially_true = match row.sense {
                Sense::Ge => row.rhs <= Rational::zero(),
                Sense::Le => row.rhs >= Rational::zero(),
                Sense::Eq => row.rhs.is_zero(),
            };
            if !trivially_true {
                return Err(Error::Contract(format!("row {} reduces to an infeasible constant", row.name)));
            }
            row_of.insert(key, None);
            continue;
        }
        if orbits.is_none() {
            row_of.insert(key, Some(lp.add_row(Row { coeffs, ..row })));
            continue;
        }
        let signature = (row.sense, row.rhs.clone(), coeffs.clone());
        let target = match seen.get(&signature) {
            Some(&r) => r,
            None => {
                let r = lp.add_row(Row { coeffs, ..row });
                seen.insert(signature, r);
                r
            }
        };
        row_of.insert(key, Some(target));
    }

    let design = DesignLp {
        class,
        indexing: indexing.clone(),
        orbits,
        lp,
        column_of,
        ell,
        row_of,
    };
    crate::certificate::check_anchor(&design)?;
    Ok(design)
}

fn full_rows(layout: &Layout, indexing: &ProfileIndexing) -> Vec<FullRow> {
    let per_agent = indexing.grid.rows_per_agent().expect("enumerable grid");
    let mut keys = Vec::new();
    for agent in 0..layout.n {
        for truth in 0..layout.count {
            let cur = indexing.grid.rows_of(truth)[agent];
            for r in (0..per_agent).filter(|&r| r != cur) {
                keys.push(FullRow::Strategyproof {
                    agent,
                    truth,
                    lie: indexing.grid.replace_row(truth, agent, r),
                });
            }
        }
    }
    keys.extend((0..layout.count).map(FullRow::Simplex));
    if layout.class == MechanismClass::Unrestricted {
        keys.extend((0..layout.count).map(FullRow::BudgetBalance));
    }
    keys.extend((0..layout.count).map(FullRow::MaxInefficiency));
    keys
}

fn full_row(layout: &Layout, indexing: &ProfileIndexing, key: FullRow) -> Row {
    let one = Rational::from_int(1);
    let zero = Rational::zero();
    match (layout.class, key) {
        (MechanismClass::Unrestricted, FullRow::Strategyproof { agent, truth, lie }) => {
            let values = indexing.profile(truth).row(agent).to_vec();
            let mut coeffs = Vec::with_capacity(2 * layout.m + 2);
            for (a, x) in values.iter().enumerate() {
                coeffs.push((layout.f(truth, a), x.clone()));
                coeffs.push((layout.f(lie, a), -x.clone()));
            }
            coeffs.push((layout.p(truth, agent), -one.clone()));
            coeffs.push((layout.p(lie, agent), one));
            Row::new(sp_name(agent, truth, lie), RowKind::Strategyproof, coeffs, Sense::Ge, zero)
        }
        (MechanismClass::Unrestricted, FullRow::Simplex(v)) => Row::new(
            format!("scf_{v}"),
            RowKind::Simplex,
            (0..layout.m).map(|a| (layout.f(v, a), one.clone())),
            Sense::Eq,
            one.clone(),
        ),
        (MechanismClass::Unrestricted, FullRow::BudgetBalance(v)) => Row::new(
            format!("bb_{v}"),
            RowKind::BudgetBalance,
            (0..layout.n).map(|i| (layout.p(v, i), one.clone())),
            Sense::Eq,
            zero,
        ),
        (MechanismClass::Unrestricted, FullRow::MaxInefficiency(v)) => {
            let profile = indexing.profile(v);
            let w: Vec<Rational> = (0..layout.m).map(|a| welfare(&profile, a)).collect();
            let best = w.iter().cloned().fold(w[0].clone(), Scalar::max_of);
            let mut coeffs: Vec<(usize, Rational)> =
                w.into_iter().enumerate().map(|(a, x)| (layout.f(v, a), x)).collect();
            coeffs.push((layout.ell(), one));
            Row::new(format!("ineff_{v}"), RowKind::MaxInefficiency, coeffs, Sense::Ge, best)
        }
        (_, FullRow::Strategyproof { agent, truth, lie }) => {
            let honest = indexing.profile(truth);
            let values = honest.row(agent);
            let deviated = indexing.profile(lie);
            let mut coeffs = Vec::with_capacity(2 * layout.n);
            for s in 0..layout.n {
                coeffs.push((layout.g(truth, s), values[sink_choice(&honest, s)].clone()));
                coeffs.push((layout.g(lie, s), -values[sink_choice(&deviated, s)].clone()));
            }
            Row::new(sp_name(agent, truth, lie), RowKind::Strategyproof, coeffs, Sense::Ge, zero)
        }
        (_, FullRow::Simplex(v)) => Row::new(
            format!("scf_{v}"),
            RowKind::Simplex,
            (0..layout.n).map(|s| (layout.g(v, s), one.clone())),
            Sense::Eq,
            one.clone(),
        ),
        (_, FullRow::MaxInefficiency(v)) => {
            let profile = indexing.profile(v);
            let w: Vec<Rational> = (0..layout.m).map(|a| welfare(&profile, a)).collect();
            let best = w.iter().cloned().fold(w[0].clone(), Scalar::max_of);
            let mut coeffs: Vec<(usize, Rational)> = (0..layout.n)
                .map(|s| (layout.g(v, s), w[sink_choice(&profile, s)].clone()))
                .collect();
            coeffs.push((layout.ell(), one));
            Row::new(format!("ineff_{v}"), RowKind::MaxInefficiency, coeffs, Sense::Ge, best)
        }
        (_, FullRow::BudgetBalance(_)) => unreachable!("sink programs have no payment rows"),
    }
}

fn sp_name(agent: usize, truth: u64, lie: u64) -> String {
    format!("sp_{}_{truth}_{lie}", agent + 1)
}

impl DesignLp {
    /// Row of the program that a full-instance row was mapped to; `None`
    /// when it reduced to `0 ≥ 0`.
    pub fn row_of(&self, key: FullRow) -> Result<Option<usize>> {
        self.row_of
            .get(&key)
            .copied()
            .ok_or_else(|| Error::Argument(format!("{key:?} is not a row of this program")))
    }

    /// Values of every full variable given a solution of the program.
    pub fn expand<S: Clone>(&self, solution: &[S]) -> Vec<S> {
        self.column_of.iter().map(|&c| solution[c].clone()).collect()
    }

    /// Reads an exact solution back as a mechanism defined on grid profiles.
    pub fn mechanism(&self, solution: &[Rational]) -> Result<GridMechanism> {
        if solution.len() != self.lp.num_variables() {
            return Err(Error::Argument(format!(
                "solution has {} entries, program has {} variables",
                solution.len(),
                self.lp.num_variables()
            )));
        }
        Ok(GridMechanism {
            class: self.class,
            indexing: self.indexing.clone(),
            values: self.expand(solution),
        })
    }
}

/// A mechanism tabulated on a grid, as produced by a design program.
#[derive(Debug, Clone)]
pub struct GridMechanism {
    class: MechanismClass,
    indexing: ProfileIndexing,
    values: Vec<Rational>,
}

impl Mechanism<Rational> for GridMechanism {
    fn name(&self) -> String {
        format!("lp-{}", self.class.label())
    }

    fn run(&self, profile: &ValuationProfile<Rational>) -> sinkmech::Result<RandomizedOutcome<Rational>> {
        let v = self
            .indexing
            .index_of(profile)
            .ok_or_else(|| sinkmech::Error::Instance("profile is not on the design grid".into()))?;
        let (n, m, count) = (self.indexing.n(), self.indexing.m(), self.indexing.count() as usize);
        let v = v as usize;
        match self.class {
            MechanismClass::Unrestricted => {
                let payments = self.values[count * m + v * n..count * m + (v + 1) * n].to_vec();
                let support = (0..m)
                    .filter(|&a| !self.values[v * m + a].is_zero())
                    .map(|a| (self.values[v * m + a].clone(), Outcome::new(Alternative(a), payments.clone())))
                    .collect();
                RandomizedOutcome::new(support)
            }
            _ => {
                let dist = sinkmech::randomized::SinkDistribution::new(self.values[v * n..(v + 1) * n].to_vec())?;
                sinkmech::randomized::generalized_sink_outcome(&dist, profile)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indexing(k: usize) -> ProfileIndexing {
        ProfileIndexing::new(2, 2, k, Rational::from_int(1)).unwrap()
    }

    #[test]
    fn full_instance_dimensions() {
        let d = build_lp(MechanismClass::Unrestricted, &indexing(3), false).unwrap();
        assert_eq!(d.lp.num_variables(), 325);
        assert_eq!(d.lp.count_rows(RowKind::Strategyproof), 2 * 648);
        assert_eq!(d.lp.count_rows(RowKind::Simplex), 81);
        assert_eq!(d.lp.count_rows(RowKind::BudgetBalance), 81);
        assert_eq!(d.lp.count_rows(RowKind::MaxInefficiency), 81);
    }

    #[test]
    fn reduced_instance_merges_rows() {
        let d = build_lp(MechanismClass::Unrestricted, &indexing(3), true).unwrap();
        assert!(d.lp.num_variables() < 325);
        // Zero-welfare profiles all reduce to `l >= 0`.
        assert_eq!(d.lp.count_rows(RowKind::MaxInefficiency), 24);
        assert_eq!(d.lp.count_rows(RowKind::Simplex), 27);
        let a = d.row_of(FullRow::MaxInefficiency(52)).unwrap();
        let b = d.row_of(FullRow::MaxInefficiency(68)).unwrap();
        assert!(a.is_some());
        assert_eq!(a, b);
    }

    #[test]
    fn sink_program_needs_two_agents() {
        let three = ProfileIndexing::new(3, 2, 2, Rational::from_int(1)).unwrap();
        assert!(build_lp(MechanismClass::GeneralizedSink, &three, false).is_err());
        assert!(build_lp(MechanismClass::Deterministic, &indexing(2), false).is_err());
    }
}
