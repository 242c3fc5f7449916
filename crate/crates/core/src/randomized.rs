//! Generalized sink mechanisms: draw a sink agent from a profile-dependent
//! distribution, then run the single-sink mechanism with that sink.
//!
//! Agents are 0-based here; display names (`single-sink(1)`) are 1-based.

use crate::error::{Error, Result};
use crate::mechanisms::{single_sink, Mechanism, SinkSpec};
use crate::metrics::{argmax_without, welfare_without};
use crate::outcome::RandomizedOutcome;
use crate::profile::{Alternative, ValuationProfile};
use crate::scalar::{self, Scalar};

/// Probability of each agent being the sink.
#[derive(Debug, Clone, PartialEq)]
pub struct SinkDistribution<S> {
    probs: Vec<S>,
}

impl<S: Scalar> SinkDistribution<S> {
    pub fn new(probs: Vec<S>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Contract("sink distribution over zero agents".into()));
        }
        if let Some(p) = probs.iter().find(|p| **p < S::zero()) {
            return Err(Error::Contract(format!("negative sink probability {p}")));
        }
        let total = scalar::sum(&probs);
        if !scalar::is_one(&total) {
            return Err(Error::Contract(format!("sink probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("uniform distribution over zero agents".into()));
        }
        Ok(Self {
            probs: vec![S::from_ratio(1, n as i64); n],
        })
    }

    pub fn point_mass(n: usize, agent: usize) -> Result<Self> {
        if agent >= n {
            return Err(Error::Argument(format!("agent {agent} out of range for n = {n}")));
        }
        let mut probs = vec![S::zero(); n];
        probs[agent] = S::one();
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn agents(&self) -> usize {
        self.probs.len()
    }
}

/// A deterministic map from profiles to sink distributions.
pub trait SinkRule<S: Scalar>: Sync {
    fn name(&self) -> String;

    fn distribution(&self, profile: &ValuationProfile<S>) -> Result<SinkDistribution<S>>;
}

/// Runs the single-sink mechanism with a sink drawn from `dist`.
pub fn generalized_sink_outcome<S: Scalar>(
    dist: &SinkDistribution<S>,
    profile: &ValuationProfile<S>,
) -> Result<RandomizedOutcome<S>> {
    if dist.agents() != profile.agents() {
        return Err(Error::Contract(format!(
            "sink distribution has {} entries for {} agents",
            dist.agents(),
            profile.agents()
        )));
    }
    let mut support = Vec::new();
    for (i, p) in dist.probs().iter().enumerate() {
        if *p > S::zero() {
            support.push((p.clone(), single_sink(SinkSpec::new(i), profile)?));
        }
    }
    RandomizedOutcome::new(support)
}

/// Wraps a [`SinkRule`] as a [`Mechanism`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedSink<R> {
    pub rule: R,
}

impl<R> GeneralizedSink<R> {
    pub fn new(rule: R) -> Self {
        Self { rule }
    }
}

impl<S: Scalar, R: SinkRule<S>> Mechanism<S> for GeneralizedSink<R> {
    fn name(&self) -> String {
        self.rule.name()
    }

    fn run(&self, profile: &ValuationProfile<S>) -> Result<RandomizedOutcome<S>> {
        if profile.agents() < 2 {
            return Err(Error::Argument("generalized sink mechanisms need n >= 2".into()));
        }
        let dist = self.rule.distribution(profile)?;
        generalized_sink_outcome(&dist, profile)
    }
}

/// The same distribution on every profile.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedSink<S>(pub SinkDistribution<S>);

impl<S: Scalar> SinkRule<S> for FixedSink<S> {
    fn name(&self) -> String {
        let probs: Vec<String> = self.0.probs().iter().map(|p| p.to_string()).collect();
        format!("fixed-sink({})", probs.join(","))
    }

    fn distribution(&self, _: &ValuationProfile<S>) -> Result<SinkDistribution<S>> {
        Ok(self.0.clone())
    }
}

/// Each agent is the sink with probability `1/n`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NaiveRandomSink;

pub fn nrs_rule<S: Scalar>(profile: &ValuationProfile<S>) -> SinkDistribution<S> {
    SinkDistribution::uniform(profile.agents()).expect("profiles have at least one agent")
}

impl<S: Scalar> SinkRule<S> for NaiveRandomSink {
    fn name(&self) -> String {
        "nrs".into()
    }

    fn distribution(&self, profile: &ValuationProfile<S>) -> Result<SinkDistribution<S>> {
        Ok(nrs_rule(profile))
    }
}

/// Agents `i ∉ excluded` whose removal leaves an argmax, among the agents
/// outside `excluded ∪ {i}`, that beats every other alternative by more than
/// `width`. No report of `i` could then change the outcome.
pub fn find_irrelevant_agents<S: Scalar>(
    profile: &ValuationProfile<S>,
    width: &S,
    excluded: &[usize],
) -> Vec<usize> {
    let mut found = Vec::new();
    for i in (0..profile.agents()).filter(|i| !excluded.contains(i)) {
        let mut without = excluded.to_vec();
        without.push(i);
        let (best, best_welfare) = argmax_without(profile, &without);
        let decisive = (0..profile.alternatives())
            .filter(|&a| a != best.0)
            .all(|a| best_welfare.clone() - welfare_without(profile, Alternative(a), &without) > *width);
        if decisive {
            found.push(i);
        }
    }
    found
}

/// Point mass on the lowest-index irrelevant agent, otherwise uniform.
pub fn irrelevant_sink_rule<S: Scalar>(
    profile: &ValuationProfile<S>,
    width: &S,
) -> Result<SinkDistribution<S>> {
    let n = profile.agents();
    match find_irrelevant_agents(profile, width, &[]).first() {
        Some(&i) => SinkDistribution::point_mass(n, i),
        None => SinkDistribution::uniform(n),
    }
}

/// Picks an irrelevant agent as sink when one exists. Not strategyproof:
/// an agent can make someone else irrelevant by misreporting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IrrelevantSink;

impl<S: Scalar> SinkRule<S> for IrrelevantSink {
    fn name(&self) -> String {
        "irrelevant-sink".into()
    }

    fn distribution(&self, profile: &ValuationProfile<S>) -> Result<SinkDistribution<S>> {
        irrelevant_sink_rule(profile, profile.width())
    }
}

/// For each default sink `i`, switch to the lowest-index agent that is
/// irrelevant within `N ∖ {i}` if there is one. Returns the induced
/// distribution over realized sinks.
pub fn mis_rule<S: Scalar>(
    profile: &ValuationProfile<S>,
    width: &S,
    default: &SinkDistribution<S>,
) -> Result<SinkDistribution<S>> {
    let n = profile.agents();
    if default.agents() != n {
        return Err(Error::Contract(format!(
            "default sink distribution has {} entries for {n} agents",
            default.agents()
        )));
    }
    let mut probs = vec![S::zero(); n];
    for (i, p) in default.probs().iter().enumerate() {
        if *p == S::zero() {
            continue;
        }
        let sink = find_irrelevant_agents(profile, width, &[i])
            .first()
            .copied()
            .unwrap_or(i);
        probs[sink] = probs[sink].clone() + p;
    }
    SinkDistribution::new(probs)
}

/// Strategyproof variant of [`IrrelevantSink`]; the default draw is uniform
/// unless overridden.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedIrrelevantSink<S> {
    pub default: Option<SinkDistribution<S>>,
}

impl<S> Default for ModifiedIrrelevantSink<S> {
    fn default() -> Self {
        Self { default: None }
    }
}

impl<S: Scalar> ModifiedIrrelevantSink<S> {
    pub fn with_default(default: SinkDistribution<S>) -> Self {
        Self {
            default: Some(default),
        }
    }
}

impl<S: Scalar> SinkRule<S> for ModifiedIrrelevantSink<S> {
    fn name(&self) -> String {
        "mis".into()
    }

    fn distribution(&self, profile: &ValuationProfile<S>) -> Result<SinkDistribution<S>> {
        let default = match &self.default {
            Some(d) => d.clone(),
            None => SinkDistribution::uniform(profile.agents())?,
        };
        mis_rule(profile, profile.width(), &default)
    }
}

/// Profile with `m > n` on which every choice of sink loses exactly
/// `M − ε`: agent `i` dislikes alternative `i`, everyone mildly prefers
/// alternative `n`, and removing agent `i` makes alternative `i` win.
/// Alternatives beyond `n` are valued `-M/2` by all.
pub fn gen_sink_worst_profile_m_gt_n<S: Scalar>(
    n: usize,
    m: usize,
    width: S,
    eps: S,
) -> Result<ValuationProfile<S>> {
    if n < 2 {
        return Err(Error::Argument("need n >= 2".into()));
    }
    if m <= n {
        return Err(Error::Argument(format!("need m > n, got n = {n}, m = {m}")));
    }
    if eps <= S::zero() || eps >= width {
        return Err(Error::Argument(format!("margin must lie in (0, M), got {eps}")));
    }
    let h = width.clone() / S::from_int(2);
    // Loss per sink is M − (n+2)e/2, so e = 2ε/(n+2) makes it M − ε.
    let e = eps * S::from_ratio(2, n as i64 + 2);
    let half_e = e.clone() / S::from_int(2);
    let rows = (0..n)
        .map(|i| {
            let mut row = vec![-h.clone(); m];
            for (a, v) in row.iter_mut().enumerate().take(n) {
                *v = if a == i {
                    -h.clone() + &half_e
                } else {
                    h.clone() - &half_e
                };
            }
            row[n] = h.clone() - &e;
            row
        })
        .collect();
    ValuationProfile::new(width, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::SingleSink;
    use crate::metrics::absolute_inefficiency;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn first_profile() -> ValuationProfile<Rational> {
        ValuationProfile::from_ratios(
            q(1, 1),
            &[
                &[(1, 2), (0, 1), (-1, 2)],
                &[(-1, 2), (0, 1), (1, 2)],
                &[(0, 1), (-1, 2), (1, 2)],
            ],
        )
        .unwrap()
    }

    fn second_profile() -> ValuationProfile<Rational> {
        first_profile().with_row(2, &[q(-1, 2), q(0, 1), q(1, 2)]).unwrap()
    }

    #[test]
    fn distribution_validation() {
        assert!(SinkDistribution::new(vec![q(1, 2), q(1, 3)]).is_err());
        assert!(SinkDistribution::new(vec![q(3, 2), q(-1, 2)]).is_err());
        assert!(SinkDistribution::<Rational>::new(vec![]).is_err());
        assert!(SinkDistribution::<Rational>::point_mass(2, 2).is_err());
        assert_eq!(SinkDistribution::<Rational>::uniform(5).unwrap().probs(), vec![q(1, 5); 5].as_slice());
    }

    #[test]
    fn point_mass_rule_is_single_sink() {
        let p = first_profile();
        let rule = FixedSink(SinkDistribution::point_mass(3, 0).unwrap());
        let lottery = GeneralizedSink::new(rule).run(&p).unwrap();
        assert_eq!(lottery, SingleSink::new(0).run(&p).unwrap());
    }

    #[test]
    fn nrs_mixture_example() {
        let p = ValuationProfile::from_ratios(q(1, 1), &[&[(499, 1000), (-499, 1000)], &[(0, 1), (1, 1000)]])
            .unwrap();
        let lottery = GeneralizedSink::new(NaiveRandomSink).run(&p).unwrap();
        assert_eq!(lottery.support().len(), 2);
        assert_eq!(absolute_inefficiency(&p, &lottery).unwrap(), q(4985, 10000));
        for (_, o) in lottery.support() {
            assert_eq!(o.surplus(), q(0, 1));
        }
    }

    #[test]
    fn irrelevant_agents_in_the_three_agent_example() {
        assert_eq!(find_irrelevant_agents(&first_profile(), &q(1, 1), &[]), vec![0]);
        assert!(find_irrelevant_agents(&second_profile(), &q(1, 1), &[]).is_empty());
        let flat = ValuationProfile::new(q(1, 1), vec![vec![q(0, 1); 3]; 3]).unwrap();
        assert!(find_irrelevant_agents(&flat, &q(1, 1), &[]).is_empty());
    }

    #[test]
    fn irrelevant_sink_lotteries() {
        let first = GeneralizedSink::new(IrrelevantSink).run(&first_profile()).unwrap();
        assert_eq!(first.alternative_distribution(3), vec![q(0, 1), q(0, 1), q(1, 1)]);
        let second = GeneralizedSink::new(IrrelevantSink).run(&second_profile()).unwrap();
        assert_eq!(second.alternative_distribution(3), vec![q(2, 3), q(0, 1), q(1, 3)]);
    }

    #[test]
    fn irrelevant_sink_prefers_lowest_index() {
        // A threshold below the lone remaining agent's spread makes both
        // agents irrelevant.
        let p = ValuationProfile::from_ratios(q(1, 1), &[&[(1, 2), (-1, 2)], &[(1, 2), (-1, 2)]]).unwrap();
        let d = irrelevant_sink_rule(&p, &q(1, 2)).unwrap();
        assert_eq!(d.probs(), &[q(1, 1), q(0, 1)]);
    }

    #[test]
    fn mis_first_profile_by_enumeration() {
        // With n = 3 a single remaining agent never clears a gap above M, so
        // every default draw stays put.
        let d = mis_rule(&first_profile(), &q(1, 1), &SinkDistribution::uniform(3).unwrap()).unwrap();
        assert_eq!(d.probs(), vec![q(1, 3); 3].as_slice());
    }

    #[test]
    fn mis_switches_to_an_irrelevant_agent() {
        // Four agents: agents 2 and 3 overwhelmingly want c, so after setting
        // aside default sink 1 agent 0 is irrelevant.
        let p = ValuationProfile::from_ratios(
            q(1, 1),
            &[
                &[(1, 2), (0, 1), (-1, 2)],
                &[(0, 1), (0, 1), (0, 1)],
                &[(-1, 2), (-1, 2), (1, 2)],
                &[(-1, 2), (-1, 2), (1, 2)],
            ],
        )
        .unwrap();
        let d = mis_rule(&p, &q(1, 1), &SinkDistribution::point_mass(4, 1).unwrap()).unwrap();
        assert_eq!(d.probs(), &[q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn gen_sink_worst_profile_every_sink_loses() {
        let eps = q(1, 100);
        let p = gen_sink_worst_profile_m_gt_n(2, 3, q(1, 1), eps.clone()).unwrap();
        for i in 0..2 {
            let o = single_sink(SinkSpec::new(i), &p).unwrap();
            assert!(absolute_inefficiency(&p, &o).unwrap() >= q(99, 100));
        }
        for (n, m) in [(3, 4), (4, 6), (5, 6)] {
            let p = gen_sink_worst_profile_m_gt_n(n, m, q(1, 1), eps.clone()).unwrap();
            for i in 0..n {
                let o = single_sink(SinkSpec::new(i), &p).unwrap();
                assert_eq!(absolute_inefficiency(&p, &o).unwrap(), q(1, 1) - eps.clone());
            }
        }
        assert!(gen_sink_worst_profile_m_gt_n(2, 2, q(1, 1), eps).is_err());
    }
}
