use crate::error::{Error, Result};
use crate::profile::{Alternative, ValuationProfile};
use crate::scalar::{self, Scalar};

/// A chosen alternative plus per-agent payments (positive = agent pays).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<S> {
    pub alternative: Alternative,
    pub payments: Vec<S>,
}

impl<S: Scalar> Outcome<S> {
    pub fn new(alternative: Alternative, payments: Vec<S>) -> Self {
        Self {
            alternative,
            payments,
        }
    }

    /// Net money collected, `Σ_i p_i`.
    pub fn surplus(&self) -> S {
        scalar::sum(&self.payments)
    }

    /// Quasi-linear utility of `agent` whose true valuation row is `row`.
    pub fn utility(&self, agent: usize, row: &[S]) -> S {
        row[self.alternative.0].clone() - &self.payments[agent]
    }
}

/// A finite lottery over outcomes, kept as an explicit mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedOutcome<S> {
    support: Vec<(S, Outcome<S>)>,
}

impl<S: Scalar> RandomizedOutcome<S> {
    pub fn new(support: Vec<(S, Outcome<S>)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Contract("lottery with empty support".into()));
        }
        if let Some((p, _)) = support.iter().find(|(p, _)| *p < S::zero()) {
            return Err(Error::Contract(format!("negative probability {p}")));
        }
        let n = support[0].1.payments.len();
        if support.iter().any(|(_, o)| o.payments.len() != n) {
            return Err(Error::Contract("outcomes disagree on agent count".into()));
        }
        let total: S = support.iter().map(|(p, _)| p.clone()).sum();
        if !scalar::is_one(&total) {
            return Err(Error::Contract(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { support })
    }

    pub fn certain(outcome: Outcome<S>) -> Self {
        Self {
            support: vec![(S::one(), outcome)],
        }
    }

    pub fn support(&self) -> &[(S, Outcome<S>)] {
        &self.support
    }

    pub fn agents(&self) -> usize {
        self.support[0].1.payments.len()
    }

    /// Marginal probability of each alternative.
    pub fn alternative_distribution(&self, m: usize) -> Vec<S> {
        let mut dist = vec![S::zero(); m];
        for (p, o) in &self.support {
            dist[o.alternative.0] = dist[o.alternative.0].clone() + p;
        }
        dist
    }

    pub fn expected_payments(&self) -> Vec<S> {
        let mut pay = vec![S::zero(); self.agents()];
        for (p, o) in &self.support {
            for (acc, x) in pay.iter_mut().zip(&o.payments) {
                *acc = acc.clone() + p.clone() * x;
            }
        }
        pay
    }

    /// Expected quasi-linear utility of `agent` with true valuation `row`.
    pub fn expected_utility(&self, agent: usize, row: &[S]) -> S {
        self.support
            .iter()
            .map(|(p, o)| p.clone() * o.utility(agent, row))
            .sum()
    }

    /// Largest `|Σ_i p_i|` over realized outcomes.
    pub fn max_abs_surplus(&self) -> S {
        self.support
            .iter()
            .map(|(_, o)| o.surplus().magnitude())
            .fold(S::zero(), S::max_of)
    }

    /// `E |Σ_i p_i|` over the lottery.
    pub fn expected_abs_surplus(&self) -> S {
        self.support
            .iter()
            .map(|(p, o)| p.clone() * o.surplus().magnitude())
            .sum()
    }

    pub fn is_deterministic(&self) -> bool {
        self.support.len() == 1
    }

    pub fn check_against(&self, profile: &ValuationProfile<S>) -> Result<()> {
        if self.agents() != profile.agents() {
            return Err(Error::Instance(format!(
                "outcome has {} payments, profile has {} agents",
                self.agents(),
                profile.agents()
            )));
        }
        for (_, o) in &self.support {
            profile.alternative(o.alternative.0)?;
        }
        Ok(())
    }
}

impl<S: Scalar> From<Outcome<S>> for RandomizedOutcome<S> {
    fn from(outcome: Outcome<S>) -> Self {
        Self::certain(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn rejects_bad_probabilities() {
        let o = Outcome::new(Alternative(0), vec![q(0, 1)]);
        assert!(RandomizedOutcome::new(vec![(q(1, 2), o.clone())]).is_err());
        assert!(RandomizedOutcome::new(vec![(q(3, 2), o.clone()), (q(-1, 2), o.clone())]).is_err());
        assert!(RandomizedOutcome::<Rational>::new(vec![]).is_err());
        assert!(RandomizedOutcome::new(vec![(q(1, 3), o.clone()), (q(2, 3), o)]).is_ok());
    }

    #[test]
    fn float_sum_within_tolerance() {
        let o = Outcome::new(Alternative(0), vec![0.0]);
        let third = 1.0 / 3.0;
        assert!(RandomizedOutcome::new(vec![(third, o.clone()), (third, o.clone()), (third, o)]).is_ok());
    }

    #[test]
    fn marginals_and_expectations() {
        let a = Outcome::new(Alternative(0), vec![q(1, 2), q(-1, 2)]);
        let b = Outcome::new(Alternative(1), vec![q(0, 1), q(0, 1)]);
        let lottery = RandomizedOutcome::new(vec![(q(1, 4), a), (q(3, 4), b)]).unwrap();
        assert_eq!(lottery.alternative_distribution(3), vec![q(1, 4), q(3, 4), q(0, 1)]);
        assert_eq!(lottery.expected_payments(), vec![q(1, 8), q(-1, 8)]);
        // agent 0 values (1, 0): 1/4 * (1 - 1/2) + 3/4 * 0
        assert_eq!(lottery.expected_utility(0, &[q(1, 1), q(0, 1)]), q(1, 8));
        assert_eq!(lottery.max_abs_surplus(), q(0, 1));
    }
}
