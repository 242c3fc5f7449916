//! Brute-force property checks over a valuation grid.
//!
//! Every check evaluates the mechanism once per grid profile (in parallel),
//! then scans deviations or permutations against the cached summaries.
//! Reports come back sorted by profile index, then agent, then misreport or
//! permutation, independent of thread scheduling.

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{par_argmax, GridSpec};
use crate::mechanisms::Mechanism;
use crate::metrics::argmax_without;
use crate::profile::{Alternative, ValuationProfile};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    Strategyproofness,
    WeakMonotonicity,
    Neutrality,
    Anonymity,
}

impl ViolationKind {
    pub fn label(self) -> &'static str {
        match self {
            ViolationKind::Strategyproofness => "sp",
            ViolationKind::WeakMonotonicity => "wmon",
            ViolationKind::Neutrality => "neutrality",
            ViolationKind::Anonymity => "anonymity",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One counterexample. `gain` is the deviating agent's utility improvement
/// for strategyproofness, the size of the negative dot product for weak
/// monotonicity, and the largest discrepancy for the symmetry checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport<S> {
    pub kind: ViolationKind,
    pub profile_index: u64,
    pub profile: ValuationProfile<S>,
    pub agent: Option<usize>,
    pub misreport: Option<Vec<S>>,
    pub permutation: Option<Vec<usize>>,
    pub gain: S,
}

fn join<S: fmt::Display>(values: &[S]) -> String {
    values.iter().map(|v| v.to_string()).join(", ")
}

impl<S: Scalar> ViolationReport<S> {
    pub fn to_text(&self) -> String {
        let mut line = format!("{} profile #{} {}", self.kind, self.profile_index, self.profile);
        if let Some(agent) = self.agent {
            line.push_str(&format!(" agent {}", agent + 1));
        }
        if let Some(row) = &self.misreport {
            line.push_str(&format!(" misreport ({})", join(row)));
        }
        if let Some(perm) = &self.permutation {
            line.push_str(&format!(" permutation [{}]", join(perm)));
        }
        line.push_str(&format!(" gain {}", self.gain));
        line
    }
}

/// Line-oriented text, one report per line.
pub fn reports_to_text<S: Scalar>(reports: &[ViolationReport<S>]) -> String {
    reports.iter().map(|r| r.to_text() + "\n").collect()
}

/// Comma-separated records with a header row. Agents are 1-based; rows and
/// permutations use `;` between entries.
pub fn reports_to_csv<S: Scalar>(reports: &[ViolationReport<S>]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header = ["kind", "profile_index", "profile", "agent", "misreport", "permutation", "gain"];
    writer.write_record(header).expect("writing to memory");
    for r in reports {
        let profile = r
            .profile
            .rows()
            .map(|row| row.iter().map(|v| v.to_string()).join(" "))
            .join(";");
        writer
            .write_record([
                r.kind.label().to_string(),
                r.profile_index.to_string(),
                profile,
                r.agent.map(|a| (a + 1).to_string()).unwrap_or_default(),
                r.misreport.as_ref().map(|row| row.iter().join(";")).unwrap_or_default(),
                r.permutation.as_ref().map(|p| p.iter().join(";")).unwrap_or_default(),
                r.gain.to_string(),
            ])
            .expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flushing to memory")).expect("utf-8 output")
}

/// Allocation marginals and expected payments of one profile's lottery.
struct Summary<S> {
    dist: Vec<S>,
    pay: Vec<S>,
}

fn summarize<S: Scalar>(
    mechanism: &(impl Mechanism<S> + ?Sized),
    grid: &GridSpec<S>,
) -> Result<Vec<Summary<S>>> {
    let count = grid.enumerable_count()?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let profile = grid.profile(i);
            let lottery = mechanism.run(&profile)?;
            lottery.check_against(&profile)?;
            Ok(Summary {
                dist: lottery.alternative_distribution(grid.m),
                pay: lottery.expected_payments(),
            })
        })
        .collect()
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(x, y)| x.clone() * y).sum()
}

fn row_table<S: Scalar>(grid: &GridSpec<S>) -> Result<Vec<Vec<S>>> {
    Ok((0..grid.rows_per_agent()?).map(|r| grid.row_values(r)).collect())
}

fn collect_per_profile<S, F>(count: u64, f: F) -> Vec<ViolationReport<S>>
where
    S: Scalar,
    F: Fn(u64) -> Vec<ViolationReport<S>> + Sync + Send,
{
    let chunks: Vec<Vec<ViolationReport<S>>> = (0..count).into_par_iter().map(f).collect();
    chunks.into_iter().flatten().collect()
}

/// Every unilateral grid misreport that strictly raises the deviator's
/// expected utility.
pub fn check_strategyproof<S: Scalar>(
    mechanism: &(impl Mechanism<S> + ?Sized),
    grid: &GridSpec<S>,
) -> Result<Vec<ViolationReport<S>>> {
    let summaries = summarize(mechanism, grid)?;
    let rows = row_table(grid)?;
    let zero = S::zero();
    Ok(collect_per_profile(summaries.len() as u64, |v| {
        let mut found = Vec::new();
        let own = grid.rows_of(v);
        for (i, &cur) in own.iter().enumerate() {
            let truth = &rows[cur as usize];
            let base = &summaries[v as usize];
            let honest = dot(&base.dist, truth) - &base.pay[i];
            for r in (0..rows.len() as u64).filter(|&r| r != cur) {
                let lie = &summaries[grid.replace_row(v, i, r) as usize];
                let gain = dot(&lie.dist, truth) - &lie.pay[i] - &honest;
                if gain.exceeds(&zero) {
                    found.push(ViolationReport {
                        kind: ViolationKind::Strategyproofness,
                        profile_index: v,
                        profile: grid.profile(v),
                        agent: Some(i),
                        misreport: Some(rows[r as usize].clone()),
                        permutation: None,
                        gain,
                    });
                }
            }
        }
        found
    }))
}

/// Unordered pairs `(v_i, v_i')` with `(f(v) − f(v')) · (v_i − v_i') < 0`,
/// each reported once from the lower-indexed row.
pub fn check_weak_monotonicity<S: Scalar>(
    mechanism: &(impl Mechanism<S> + ?Sized),
    grid: &GridSpec<S>,
) -> Result<Vec<ViolationReport<S>>> {
    let summaries = summarize(mechanism, grid)?;
    let rows = row_table(grid)?;
    let zero = S::zero();
    Ok(collect_per_profile(summaries.len() as u64, |v| {
        let mut found = Vec::new();
        let own = grid.rows_of(v);
        for (i, &cur) in own.iter().enumerate() {
            for r in cur + 1..rows.len() as u64 {
                let other = &summaries[grid.replace_row(v, i, r) as usize];
                let score: S = summaries[v as usize]
                    .dist
                    .iter()
                    .zip(&other.dist)
                    .zip(rows[cur as usize].iter().zip(&rows[r as usize]))
                    .map(|((f, g), (x, y))| (f.clone() - g) * (x.clone() - y))
                    .sum();
                if zero.exceeds(&score) {
                    found.push(ViolationReport {
                        kind: ViolationKind::WeakMonotonicity,
                        profile_index: v,
                        profile: grid.profile(v),
                        agent: Some(i),
                        misreport: Some(rows[r as usize].clone()),
                        permutation: None,
                        gain: -score,
                    });
                }
            }
        }
        found
    }))
}

/// Worst `|Σ_i p_i|` over every realized outcome on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport<S> {
    pub max_abs_surplus: S,
    pub profile_index: u64,
    pub profile: ValuationProfile<S>,
}

pub fn check_budget_balance<S: Scalar>(
    mechanism: &(impl Mechanism<S> + ?Sized),
    grid: &GridSpec<S>,
) -> Result<BudgetReport<S>> {
    let count = grid.enumerable_count()?;
    let (max_abs_surplus, profile_index) =
        par_argmax(count, |i| Ok(mechanism.run(&grid.profile(i))?.max_abs_surplus()))?;
    Ok(BudgetReport {
        max_abs_surplus,
        profile_index,
        profile: grid.profile(profile_index),
    })
}

/// Whether the welfare argmax is unique for every non-empty sub-population,
/// so that tie-breaking cannot masquerade as a symmetry violation.
fn argmaxes_unique<S: Scalar>(profile: &ValuationProfile<S>) -> bool {
    let n = profile.agents();
    (0u64..(1 << n) - 1).all(|mask| {
        let excluded: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let (best, value) = argmax_without(profile, &excluded);
        (0..profile.alternatives()).filter(|&a| a != best.0).all(|a| {
            value.exceeds(&crate::metrics::welfare_without(profile, Alternative(a), &excluded))
        })
    })
}

fn largest_gap<'a, S: Scalar>(pairs: impl Iterator<Item = (&'a S, &'a S)>) -> S {
    pairs
        .map(|(x, y)| (x.clone() - y).magnitude())
        .fold(S::zero(), S::max_of)
}

/// Relabeling alternatives must relabel the lottery and leave payments
/// unchanged. Only profiles with unique argmaxes for every sub-population
/// are checked.
pub fn check_neutrality<S: Scalar>(
    mechanism: &(impl Mechanism<S> + ?Sized),
    grid: &GridSpec<S>,
) -> Result<Vec<ViolationReport<S>>> {
    let summaries = summarize(mechanism, grid)?;
    let perms: Vec<Vec<usize>> = (0..grid.m).permutations(grid.m).skip(1).collect();
    let zero = S::zero();
    Ok(collect_per_profile(summaries.len() as u64, |v| {
        let profile = grid.profile(v);
        if !argmaxes_unique(&profile) {
            return Vec::new();
        }
        let base = &summaries[v as usize];
        perms
            .iter()
            .filter_map(|perm| {
                let image = grid
                    .index_of(&profile.relabel_alternatives(perm))
                    .expect("relabeling stays on the grid");
                let moved = &summaries[image as usize];
                let alloc_gap = largest_gap((0..grid.m).map(|a| (&moved.dist[perm[a]], &base.dist[a])));
                let pay_gap = largest_gap(moved.pay.iter().zip(&base.pay));
                let gap = alloc_gap.max_of(pay_gap);
                gap.exceeds(&zero).then(|| ViolationReport {
                    kind: ViolationKind::Neutrality,
                    profile_index: v,
                    profile: profile.clone(),
                    agent: None,
                    misreport: None,
                    permutation: Some(perm.clone()),
                    gain: gap,
                })
            })
            .collect()
    }))
}

/// Permuting agents must leave the lottery unchanged and permute expected
/// payments along with the agents.
pub fn check_anonymity<S: Scalar>(
    mechanism: &(impl Mechanism<S> + ?Sized),
    grid: &GridSpec<S>,
) -> Result<Vec<ViolationReport<S>>> {
    let summaries = summarize(mechanism, grid)?;
    let perms: Vec<Vec<usize>> = (0..grid.n).permutations(grid.n).skip(1).collect();
    let zero = S::zero();
    Ok(collect_per_profile(summaries.len() as u64, |v| {
        let profile = grid.profile(v);
        let base = &summaries[v as usize];
        perms
            .iter()
            .filter_map(|perm| {
                let image = grid
                    .index_of(&profile.permute_agents(perm))
                    .expect("permuting agents stays on the grid");
                let moved = &summaries[image as usize];
                let alloc_gap = largest_gap(moved.dist.iter().zip(&base.dist));
                let pay_gap = largest_gap((0..grid.n).map(|i| (&moved.pay[i], &base.pay[perm[i]])));
                let gap = alloc_gap.max_of(pay_gap);
                gap.exceeds(&zero).then(|| ViolationReport {
                    kind: ViolationKind::Anonymity,
                    profile_index: v,
                    profile: profile.clone(),
                    agent: None,
                    misreport: None,
                    permutation: Some(perm.clone()),
                    gain: gap,
                })
            })
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{ConstantMechanism, SingleSink, Vcg};
    use crate::randomized::{GeneralizedSink, IrrelevantSink, NaiveRandomSink};
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn grid(n: usize, m: usize, k: usize) -> GridSpec<Rational> {
        GridSpec::new(n, m, k, q(1, 1)).unwrap()
    }

    #[test]
    fn vcg_and_single_sink_are_strategyproof() {
        let g = grid(2, 2, 3);
        assert!(check_strategyproof(&Vcg, &g).unwrap().is_empty());
        assert!(check_strategyproof(&SingleSink::new(0), &g).unwrap().is_empty());
        assert!(check_weak_monotonicity(&Vcg, &g).unwrap().is_empty());
    }

    #[test]
    fn constant_mechanism_is_weakly_monotone() {
        let g = grid(2, 3, 2);
        assert!(check_weak_monotonicity(&ConstantMechanism(Alternative(0)), &g)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn irrelevant_sink_violation_on_the_example_pair() {
        let g = grid(3, 3, 3);
        let mech = GeneralizedSink::new(IrrelevantSink);
        let first = ValuationProfile::from_ratios(
            q(1, 1),
            &[&[(1, 2), (0, 1), (-1, 2)], &[(-1, 2), (0, 1), (1, 2)], &[(0, 1), (-1, 2), (1, 2)]],
        )
        .unwrap();
        let second = first.with_row(2, &[q(-1, 2), q(0, 1), q(1, 2)]).unwrap();
        let sp = check_strategyproof(&mech, &g).unwrap();
        // With true row (-1/2, 0, 1/2) agent 3 gets 1/6 in expectation; claiming
        // (0, -1/2, 1/2) makes agent 1 irrelevant and yields c for free.
        let hit = sp
            .iter()
            .find(|r| {
                r.profile == second && r.agent == Some(2) && r.misreport.as_deref() == Some(first.row(2))
            })
            .expect("the example deviation is reported");
        assert_eq!(hit.gain, q(1, 3));
        let wmon = check_weak_monotonicity(&mech, &g).unwrap();
        let low = g.index_of(&first).unwrap().min(g.index_of(&second).unwrap());
        assert!(wmon.iter().any(|r| r.agent == Some(2) && r.profile_index == low
            && (r.profile == first || r.profile == second)
            && r.misreport.is_some()));
    }

    #[test]
    fn budget_balance() {
        let g = grid(2, 2, 3);
        assert_eq!(check_budget_balance(&SingleSink::new(0), &g).unwrap().max_abs_surplus, q(0, 1));
        assert_eq!(
            check_budget_balance(&GeneralizedSink::new(NaiveRandomSink), &g)
                .unwrap()
                .max_abs_surplus,
            q(0, 1)
        );
        let vcg = check_budget_balance(&Vcg, &g).unwrap();
        assert_eq!(vcg.max_abs_surplus, q(1, 1));
        let opposed =
            ValuationProfile::from_ratios(q(1, 1), &[&[(1, 2), (-1, 2)], &[(-1, 2), (1, 2)]]).unwrap();
        assert_eq!(crate::mechanisms::vcg(&opposed).surplus(), q(1, 1));
    }

    #[test]
    fn symmetry_checks() {
        let g = grid(2, 2, 3);
        assert!(check_neutrality(&Vcg, &g).unwrap().is_empty());
        assert!(check_anonymity(&Vcg, &g).unwrap().is_empty());
        assert!(!check_anonymity(&SingleSink::new(0), &g).unwrap().is_empty());
        assert!(check_anonymity(&GeneralizedSink::new(NaiveRandomSink), &g).unwrap().is_empty());
    }

    #[test]
    fn emitters() {
        let g = grid(3, 3, 3);
        let reports = check_strategyproof(&GeneralizedSink::new(IrrelevantSink), &g).unwrap();
        let text = reports_to_text(&reports[..2]);
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("sp profile #"));
        let csv = reports_to_csv(&reports[..2]);
        assert_eq!(csv.lines().next().unwrap(), "kind,profile_index,profile,agent,misreport,permutation,gain");
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn float_mode_agrees_with_exact_mode() {
        let exact = check_strategyproof(&GeneralizedSink::new(IrrelevantSink), &grid(3, 2, 3)).unwrap();
        let g = GridSpec::new(3, 2, 3, 1.0).unwrap();
        let float = check_strategyproof(&GeneralizedSink::new(IrrelevantSink), &g).unwrap();
        let exact: Vec<_> = exact.iter().map(|r| (r.profile_index, r.agent)).collect();
        let float: Vec<_> = float.iter().map(|r| (r.profile_index, r.agent)).collect();
        assert_eq!(exact, float);
    }
}
