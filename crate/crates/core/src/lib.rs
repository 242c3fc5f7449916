//! Budget-balanced, strategyproof mechanisms for quasi-linear group decisions.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalar`] picks the numeric mode (exact rationals or `f64`).
//! * [`profile`], [`outcome`] and [`grid`] hold the domain types.
//! * [`metrics`] computes welfare, inefficiency and spillover, including
//!   suprema over a discretised valuation grid.
//! * [`mechanisms`] implements VCG, affine maximizers and the single-sink
//!   mechanism together with the adversarial profiles that make them look bad.
//! * [`randomized`] builds generalized sink mechanisms (NRS, irrelevant sink,
//!   modified irrelevant sink) on top of the single-sink mechanism.
//! * [`verify`] brute-forces strategyproofness, weak monotonicity, budget
//!   balance, neutrality and anonymity over a grid.

pub mod error;
pub mod grid;
pub mod mechanisms;
pub mod metrics;
pub mod outcome;
pub mod profile;
pub mod randomized;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use grid::GridSpec;
pub use mechanisms::{
    AffineMaximizer, ConstantMechanism, Mechanism, SingleSink, SinkSpec, Vcg,
};
pub use metrics::Metric;
pub use outcome::{Outcome, RandomizedOutcome};
pub use profile::{Alternative, ValuationProfile};
pub use randomized::{
    FixedSink, GeneralizedSink, IrrelevantSink, ModifiedIrrelevantSink, NaiveRandomSink, SinkDistribution,
    SinkRule,
};
pub use scalar::{Rational, Scalar};
pub use verify::{BudgetReport, ViolationKind, ViolationReport};
