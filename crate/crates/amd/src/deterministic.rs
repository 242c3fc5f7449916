//! Exhaustive search over deterministic mechanisms on the two-level grid.
//!
//! With `n = m = 2` and `k = 2` there are 16 profiles and therefore `2^16`
//! allocation functions. Each one is scored by its worst-case absolute
//! inefficiency; candidates are visited in increasing score, discarded
//! quickly when weak monotonicity fails, and otherwise tested for payments
//! that make them strategyproof and budget balanced by solving a feasibility
//! program. The first feasible candidate is optimal.

use num_traits::Zero;
use sinkmech::{Alternative, Rational, Scalar, ValuationProfile};

use crate::error::{Error, Result};
use crate::indexing::ProfileIndexing;
use crate::lp::{Bound, LinearProgram, Row, RowKind, Sense};
use crate::simplex::solve_lp;

#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicOptimum {
    pub value: Rational,
    /// Chosen alternative per profile index.
    pub allocation: Vec<usize>,
    /// `payments[v][i]`.
    pub payments: Vec<Vec<Rational>>,
    pub enumerated: u64,
    pub pruned_by_monotonicity: u64,
    pub programs_solved: u64,
}

fn welfare(profile: &ValuationProfile<Rational>, a: usize) -> Rational {
    (0..profile.agents()).map(|i| profile.value(i, Alternative(a)).clone()).sum()
}

/// Worst-case absolute inefficiency of a deterministic allocation.
pub fn allocation_inefficiency(profiles: &[ValuationProfile<Rational>], allocation: &[usize]) -> Rational {
    profiles
        .iter()
        .zip(allocation)
        .map(|(p, &a)| {
            let best = (0..p.alternatives()).map(|b| welfare(p, b)).fold(welfare(p, 0), Scalar::max_of);
            best - welfare(p, a)
        })
        .fold(Rational::zero(), Scalar::max_of)
}

/// Unilateral misreports `(agent, truth, lie)` over the grid, each unordered
/// pair listed once per direction.
fn deviations(indexing: &ProfileIndexing) -> Vec<(usize, u64, u64)> {
    let per_agent = indexing.grid.rows_per_agent().expect("enumerable grid");
    let mut out = Vec::new();
    for agent in 0..indexing.n() {
        for truth in 0..indexing.count() {
            let cur = indexing.grid.rows_of(truth)[agent];
            for r in (0..per_agent).filter(|&r| r != cur) {
                out.push((agent, truth, indexing.grid.replace_row(truth, agent, r)));
            }
        }
    }
    out
}

/// Weak monotonicity: `v_i(f(v)) − v_i(f(v')) ≥ v'_i(f(v)) − v'_i(f(v'))`.
pub fn is_weakly_monotone(
    profiles: &[ValuationProfile<Rational>],
    deviations: &[(usize, u64, u64)],
    allocation: &[usize],
) -> bool {
    deviations.iter().all(|&(i, v, w)| {
        let (a, b) = (Alternative(allocation[v as usize]), Alternative(allocation[w as usize]));
        let (pv, pw) = (&profiles[v as usize], &profiles[w as usize]);
        pv.value(i, a) - pv.value(i, b) >= pw.value(i, a) - pw.value(i, b)
    })
}

/// Payments making `allocation` strategyproof and budget balanced, if any.
pub fn payment_feasibility(
    indexing: &ProfileIndexing,
    allocation: &[usize],
) -> Result<Option<Vec<Vec<Rational>>>> {
    let n = indexing.n();
    let count = indexing.count() as usize;
    if allocation.len() != count {
        return Err(Error::Argument(format!("allocation has {} entries for {count} profiles", allocation.len())));
    }
    let profiles: Vec<_> = (0..count as u64).map(|v| indexing.profile(v)).collect();
    let mut lp = LinearProgram::default();
    for v in 0..count {
        for i in 0..n {
            lp.add_variable(format!("p_{}_{v}", i + 1), Bound::Free, Rational::zero());
        }
    }
    let p = |v: u64, i: usize| v as usize * n + i;
    let one = Rational::from_int(1);
    for (i, v, w) in deviations(indexing) {
        let honest = &profiles[v as usize];
        let gain = honest.value(i, Alternative(allocation[w as usize])) - honest.value(i, Alternative(allocation[v as usize]));
        lp.add_row(Row::new(
            format!("sp_{}_{v}_{w}", i + 1),
            RowKind::Strategyproof,
            [(p(w, i), one.clone()), (p(v, i), -one.clone())],
            Sense::Ge,
            gain,
        ));
    }
    for v in 0..count as u64 {
        lp.add_row(Row::new(
            format!("bb_{v}"),
            RowKind::BudgetBalance,
            (0..n).map(|i| (p(v, i), one.clone())),
            Sense::Eq,
            Rational::zero(),
        ));
    }
    match solve_lp(&lp) {
        Ok(s) => Ok(Some(s.primal.chunks(n).map(<[Rational]>::to_vec).collect())),
        Err(Error::Infeasible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Optimal deterministic worst-case absolute inefficiency for `n = m = 2`,
/// `k = 2`.
pub fn deterministic_exhaustive(indexing: &ProfileIndexing) -> Result<DeterministicOptimum> {
    if (indexing.n(), indexing.m(), indexing.k()) != (2, 2, 2) {
        return Err(Error::Argument(format!(
            "exhaustive deterministic search supports n = m = k = 2 only, got n = {}, m = {}, k = {}",
            indexing.n(),
            indexing.m(),
            indexing.k()
        )));
    }
    let count = indexing.count() as usize;
    let profiles: Vec<_> = (0..count as u64).map(|v| indexing.profile(v)).collect();
    let devs = deviations(indexing);
    let decode = |mask: u32| -> Vec<usize> { (0..count).map(|v| (mask >> v & 1) as usize).collect() };

    let total = 1u32 << count;
    let mut scored: Vec<(Rational, u32)> = (0..total)
        .map(|mask| (allocation_inefficiency(&profiles, &decode(mask)), mask))
        .collect();
    scored.sort();

    let (mut pruned, mut solved) = (0u64, 0u64);
    for (value, mask) in scored {
        let allocation = decode(mask);
        if !is_weakly_monotone(&profiles, &devs, &allocation) {
            pruned += 1;
            continue;
        }
        solved += 1;
        if let Some(payments) = payment_feasibility(indexing, &allocation)? {
            return Ok(DeterministicOptimum {
                value,
                allocation,
                payments,
                enumerated: total as u64,
                pruned_by_monotonicity: pruned,
                programs_solved: solved,
            });
        }
    }
    Err(Error::Contract("no deterministic allocation is implementable".into()))
}
