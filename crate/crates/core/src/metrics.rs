//! Welfare, inefficiency and efficiency-budget spillover.

use crate::error::{Error, Result};
use crate::grid::{par_argmax, GridSpec};
use crate::mechanisms::Mechanism;
use crate::outcome::{Outcome, RandomizedOutcome};
use crate::profile::{Alternative, ValuationProfile};
use crate::scalar::Scalar;

/// `Σ_i v_i(a)`.
pub fn social_welfare<S: Scalar>(profile: &ValuationProfile<S>, a: Alternative) -> Result<S> {
    profile.alternative(a.0)?;
    Ok(welfare_without(profile, a, &[]))
}

/// `Σ_{i ∉ excluded} v_i(a)`; `a` must be valid.
pub(crate) fn welfare_without<S: Scalar>(
    profile: &ValuationProfile<S>,
    a: Alternative,
    excluded: &[usize],
) -> S {
    (0..profile.agents())
        .filter(|i| !excluded.contains(i))
        .fold(S::zero(), |acc, i| acc + profile.value(i, a))
}

/// Welfare-maximising alternative among agents not in `excluded`, ties going
/// to the smallest alternative index.
pub fn efficient_alternative<S: Scalar>(
    profile: &ValuationProfile<S>,
    excluded: &[usize],
) -> Result<Alternative> {
    for &i in excluded {
        profile.check_agent(i)?;
    }
    let mut distinct = excluded.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() >= profile.agents() {
        return Err(Error::Argument("every agent is excluded".into()));
    }
    Ok(argmax_without(profile, excluded).0)
}

/// Argmax and max of `Σ_{i ∉ excluded} v_i(a)`; an empty population yields
/// alternative 0 with welfare 0.
pub(crate) fn argmax_without<S: Scalar>(
    profile: &ValuationProfile<S>,
    excluded: &[usize],
) -> (Alternative, S) {
    let mut best = Alternative(0);
    let mut best_welfare = welfare_without(profile, best, excluded);
    for a in 1..profile.alternatives() {
        let w = welfare_without(profile, Alternative(a), excluded);
        if w > best_welfare {
            best = Alternative(a);
            best_welfare = w;
        }
    }
    (best, best_welfare)
}

pub(crate) fn max_welfare<S: Scalar>(profile: &ValuationProfile<S>) -> S {
    argmax_without(profile, &[]).1
}

/// Anything that induces a lottery over alternatives.
pub trait Lottery<S> {
    fn weighted_alternatives(&self) -> Vec<(S, Alternative)>;
    fn agents(&self) -> usize;
}

impl<S: Scalar> Lottery<S> for Outcome<S> {
    fn weighted_alternatives(&self) -> Vec<(S, Alternative)> {
        vec![(S::one(), self.alternative)]
    }

    fn agents(&self) -> usize {
        self.payments.len()
    }
}

impl<S: Scalar> Lottery<S> for RandomizedOutcome<S> {
    fn weighted_alternatives(&self) -> Vec<(S, Alternative)> {
        self.support()
            .iter()
            .map(|(p, o)| (p.clone(), o.alternative))
            .collect()
    }

    fn agents(&self) -> usize {
        RandomizedOutcome::agents(self)
    }
}

/// `max_a Σ v_i(a) − E[Σ v_i(f(v))]`, always non-negative.
pub fn absolute_inefficiency<S: Scalar, L: Lottery<S>>(
    profile: &ValuationProfile<S>,
    outcome: &L,
) -> Result<S> {
    if outcome.agents() != profile.agents() {
        return Err(Error::Instance(format!(
            "outcome has {} agents, profile has {}",
            outcome.agents(),
            profile.agents()
        )));
    }
    let best = max_welfare(profile);
    let mut expected = S::zero();
    for (p, a) in outcome.weighted_alternatives() {
        expected = expected + p * social_welfare(profile, a)?;
    }
    Ok(best - expected)
}

/// Divides an absolute inefficiency by `n·M`.
pub fn sample_inefficiency_normalize<S: Scalar>(abs_ineff: S, n: usize, width: &S) -> Result<S> {
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    if *width <= S::zero() {
        return Err(Error::Argument(format!("M must be positive, got {width}")));
    }
    Ok(abs_ineff / (S::from_int(n as i64) * width))
}

/// `(λ·T1 + (1−λ)·T2) / (nM)` on one profile, with `T1` the expected
/// welfare loss and `T2` the expected `|Σ_i p_i|`.
pub fn spillover<S: Scalar>(
    profile: &ValuationProfile<S>,
    mechanism: &(impl Mechanism<S> + ?Sized),
    lambda: &S,
) -> Result<S> {
    if *lambda < S::zero() || *lambda > S::one() {
        return Err(Error::Argument(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let outcome = mechanism.run(profile)?;
    let t1 = absolute_inefficiency(profile, &outcome)?;
    let t2 = outcome.expected_abs_surplus();
    let mixed = lambda.clone() * t1 + (S::one() - lambda) * t2;
    sample_inefficiency_normalize(mixed, profile.agents(), profile.width())
}

/// Per-profile quantity maximised by [`grid_supremum`].
#[derive(Debug, Clone, PartialEq)]
pub enum Metric<S> {
    /// Expected welfare loss, unnormalised.
    AbsoluteInefficiency,
    /// Expected welfare loss divided by `n·M`.
    SampleInefficiency,
    Spillover(S),
}

pub fn evaluate<S: Scalar>(
    metric: &Metric<S>,
    profile: &ValuationProfile<S>,
    mechanism: &(impl Mechanism<S> + ?Sized),
) -> Result<S> {
    match metric {
        Metric::AbsoluteInefficiency => absolute_inefficiency(profile, &mechanism.run(profile)?),
        Metric::SampleInefficiency => {
            let abs = absolute_inefficiency(profile, &mechanism.run(profile)?)?;
            sample_inefficiency_normalize(abs, profile.agents(), profile.width())
        }
        Metric::Spillover(lambda) => spillover(profile, mechanism, lambda),
    }
}

/// Maximum of `metric` over every profile of `grid`, with the smallest-index
/// maximiser.
pub fn grid_supremum<S: Scalar>(
    metric: &Metric<S>,
    grid: &GridSpec<S>,
    mechanism: &(impl Mechanism<S> + ?Sized),
) -> Result<(S, ValuationProfile<S>)> {
    let count = grid.enumerable_count()?;
    let (value, index) = par_argmax(count, |i| evaluate(metric, &grid.profile(i), mechanism))?;
    Ok((value, grid.profile(index)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::Vcg;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn three_agent_profile() -> ValuationProfile<Rational> {
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

    fn two_agent_profile() -> ValuationProfile<Rational> {
        ValuationProfile::from_ratios(q(1, 1), &[&[(4, 10), (-4, 10)], &[(-1, 10), (2, 10)]]).unwrap()
    }

    #[test]
    fn welfare_examples() {
        assert_eq!(social_welfare(&three_agent_profile(), Alternative(2)).unwrap(), q(1, 2));
        assert_eq!(social_welfare(&two_agent_profile(), Alternative(0)).unwrap(), q(3, 10));
        let zeros = ValuationProfile::new(q(1, 1), vec![vec![q(0, 1); 3]; 2]).unwrap();
        for a in 0..3 {
            assert_eq!(social_welfare(&zeros, Alternative(a)).unwrap(), q(0, 1));
        }
        assert!(social_welfare(&zeros, Alternative(3)).is_err());
    }

    #[test]
    fn efficient_alternative_examples() {
        assert_eq!(efficient_alternative(&three_agent_profile(), &[]).unwrap(), Alternative(2));
        let flat = ValuationProfile::new(q(1, 1), vec![vec![q(1, 4); 3]; 3]).unwrap();
        assert_eq!(efficient_alternative(&flat, &[]).unwrap(), Alternative(0));
        assert_eq!(efficient_alternative(&two_agent_profile(), &[0]).unwrap(), Alternative(1));
        assert!(matches!(
            efficient_alternative(&two_agent_profile(), &[0, 1]),
            Err(Error::Argument(_))
        ));
        assert!(efficient_alternative(&two_agent_profile(), &[5]).is_err());
    }

    #[test]
    fn inefficiency_examples() {
        let p = ValuationProfile::from_ratios(q(1, 1), &[&[(499, 1000), (-499, 1000)], &[(0, 1), (1, 1000)]])
            .unwrap();
        let zero = vec![q(0, 1), q(0, 1)];
        let at_a = Outcome::new(Alternative(0), zero.clone());
        let at_b = Outcome::new(Alternative(1), zero);
        assert_eq!(absolute_inefficiency(&p, &at_a).unwrap(), q(0, 1));
        assert_eq!(absolute_inefficiency(&p, &at_b).unwrap(), q(997, 1000));
        let half = RandomizedOutcome::new(vec![(q(1, 2), at_a), (q(1, 2), at_b)]).unwrap();
        let abs = absolute_inefficiency(&p, &half).unwrap();
        assert_eq!(abs, q(4985, 10000));
        assert_eq!(sample_inefficiency_normalize(abs, 2, &q(1, 1)).unwrap(), q(24925, 100000));
    }

    #[test]
    fn normalization_edge_cases() {
        assert_eq!(sample_inefficiency_normalize(q(0, 1), 3, &q(1, 1)).unwrap(), q(0, 1));
        assert_eq!(sample_inefficiency_normalize(q(2, 1), 1, &q(2, 1)).unwrap(), q(1, 1));
        assert!(sample_inefficiency_normalize(q(1, 1), 0, &q(1, 1)).is_err());
        assert!(sample_inefficiency_normalize(q(1, 1), 1, &q(0, 1)).is_err());
    }

    #[test]
    fn vcg_spillover_examples() {
        let p = two_agent_profile();
        assert_eq!(spillover(&p, &Vcg, &q(0, 1)).unwrap(), q(15, 100));
        assert_eq!(spillover(&p, &Vcg, &q(1, 1)).unwrap(), q(0, 1));
        assert!(spillover(&p, &Vcg, &q(2, 1)).is_err());
    }
}
