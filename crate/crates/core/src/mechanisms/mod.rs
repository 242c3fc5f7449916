//! Deterministic mechanisms: VCG with Clarke payments, affine maximizers and
//! the single-sink budget-balanced mechanism.

pub mod adversarial;

use crate::error::{Error, Result};
use crate::metrics::{argmax_without, welfare_without};
use crate::outcome::{Outcome, RandomizedOutcome};
use crate::profile::{Alternative, ValuationProfile};
use crate::scalar::Scalar;

/// Maps a reported profile to a (possibly degenerate) lottery over outcomes.
pub trait Mechanism<S: Scalar>: Sync {
    fn name(&self) -> String;

    fn run(&self, profile: &ValuationProfile<S>) -> Result<RandomizedOutcome<S>>;
}

impl<S: Scalar, M: Mechanism<S> + ?Sized + Send> Mechanism<S> for Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn run(&self, profile: &ValuationProfile<S>) -> Result<RandomizedOutcome<S>> {
        (**self).run(profile)
    }
}

/// Clarke payment of `agent` in the world without `absent`:
/// `max_a Σ_{j ∉ absent ∪ {agent}} v_j(a) − Σ_{j ∉ absent ∪ {agent}} v_j(chosen)`.
fn clarke_payment<S: Scalar>(
    profile: &ValuationProfile<S>,
    agent: usize,
    absent: &[usize],
    chosen: Alternative,
) -> S {
    let mut without = absent.to_vec();
    without.push(agent);
    let (_, best) = argmax_without(profile, &without);
    best - welfare_without(profile, chosen, &without)
}

/// Efficient alternative with Clarke (pivot) payments. Never runs a deficit.
pub fn vcg<S: Scalar>(profile: &ValuationProfile<S>) -> Outcome<S> {
    let (chosen, _) = argmax_without(profile, &[]);
    let payments = (0..profile.agents())
        .map(|i| clarke_payment(profile, i, &[], chosen))
        .collect();
    Outcome::new(chosen, payments)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Vcg;

impl<S: Scalar> Mechanism<S> for Vcg {
    fn name(&self) -> String {
        "vcg".into()
    }

    fn run(&self, profile: &ValuationProfile<S>) -> Result<RandomizedOutcome<S>> {
        Ok(vcg(profile).into())
    }
}

/// Which agent is the sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SinkSpec {
    pub sink: usize,
}

impl SinkSpec {
    pub fn new(sink: usize) -> Self {
        Self { sink }
    }
}

/// The sink's report is ignored; everyone else faces VCG in the world
/// without the sink, and the sink collects the surplus so payments sum to
/// zero.
pub fn single_sink<S: Scalar>(spec: SinkSpec, profile: &ValuationProfile<S>) -> Result<Outcome<S>> {
    let n = profile.agents();
    if n < 2 {
        return Err(Error::Argument("the single-sink mechanism needs n >= 2".into()));
    }
    profile.check_agent(spec.sink)?;
    let absent = [spec.sink];
    let (chosen, _) = argmax_without(profile, &absent);
    let mut payments: Vec<S> = (0..n)
        .map(|i| {
            if i == spec.sink {
                S::zero()
            } else {
                clarke_payment(profile, i, &absent, chosen)
            }
        })
        .collect();
    let collected: S = payments.iter().cloned().sum();
    payments[spec.sink] = -collected;
    Ok(Outcome::new(chosen, payments))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingleSink(pub SinkSpec);

impl SingleSink {
    pub fn new(sink: usize) -> Self {
        Self(SinkSpec::new(sink))
    }
}

impl<S: Scalar> Mechanism<S> for SingleSink {
    fn name(&self) -> String {
        format!("single-sink({})", self.0.sink + 1)
    }

    fn run(&self, profile: &ValuationProfile<S>) -> Result<RandomizedOutcome<S>> {
        Ok(single_sink(self.0, profile)?.into())
    }
}

/// Always picks the same alternative and charges nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantMechanism(pub Alternative);

impl<S: Scalar> Mechanism<S> for ConstantMechanism {
    fn name(&self) -> String {
        format!("constant({})", self.0)
    }

    fn run(&self, profile: &ValuationProfile<S>) -> Result<RandomizedOutcome<S>> {
        profile.alternative(self.0 .0)?;
        Ok(Outcome::new(self.0, vec![S::zero(); profile.agents()]).into())
    }
}

/// `argmax_a Σ_i w_i v_i(a) + κ(a)`; neutral when every offset `κ(a)` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMaximizer<S> {
    weights: Vec<S>,
    offset: Vec<S>,
}

impl<S: Scalar> AffineMaximizer<S> {
    pub fn new(weights: Vec<S>, offset: Vec<S>) -> Result<Self> {
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::Argument("affine maximizer weights must be non-negative".into()));
        }
        if weights.iter().all(|w| w.is_zero()) {
            return Err(Error::Argument("affine maximizer weights are all zero".into()));
        }
        Ok(Self { weights, offset })
    }

    pub fn neutral(weights: Vec<S>, m: usize) -> Result<Self> {
        Self::new(weights, vec![S::zero(); m])
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn is_neutral(&self) -> bool {
        self.offset.iter().all(|k| k.is_zero())
    }

    fn check_shape(&self, profile: &ValuationProfile<S>) -> Result<()> {
        if self.weights.len() != profile.agents() || self.offset.len() != profile.alternatives() {
            return Err(Error::Argument(format!(
                "affine maximizer has {} weights and {} offsets for an {}x{} profile",
                self.weights.len(),
                self.offset.len(),
                profile.agents(),
                profile.alternatives()
            )));
        }
        Ok(())
    }

    fn score(&self, profile: &ValuationProfile<S>, a: Alternative, skip: Option<usize>) -> S {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .fold(self.offset[a.0].clone(), |acc, (i, w)| {
                acc + w.clone() * profile.value(i, a)
            })
    }

    fn best(&self, profile: &ValuationProfile<S>, skip: Option<usize>) -> (Alternative, S) {
        let mut best = (Alternative(0), self.score(profile, Alternative(0), skip));
        for a in 1..profile.alternatives() {
            let s = self.score(profile, Alternative(a), skip);
            if s > best.1 {
                best = (Alternative(a), s);
            }
        }
        best
    }

    /// Chosen alternative, smallest index on ties.
    pub fn choose(&self, profile: &ValuationProfile<S>) -> Result<Alternative> {
        self.check_shape(profile)?;
        Ok(self.best(profile, None).0)
    }
}

impl<S: Scalar> Mechanism<S> for AffineMaximizer<S> {
    fn name(&self) -> String {
        "affine-maximizer".into()
    }

    /// Weighted Clarke payments: agent `i` with `w_i > 0` pays the weighted
    /// externality divided by `w_i`; zero-weight agents pay nothing.
    fn run(&self, profile: &ValuationProfile<S>) -> Result<RandomizedOutcome<S>> {
        let chosen = self.choose(profile)?;
        let payments = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                if w.is_zero() {
                    S::zero()
                } else {
                    let (_, best) = self.best(profile, Some(i));
                    (best - self.score(profile, chosen, Some(i))) / w.clone()
                }
            })
            .collect();
        Ok(Outcome::new(chosen, payments).into())
    }
}
