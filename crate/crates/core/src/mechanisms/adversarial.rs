//! Adversarial profiles that push sink mechanisms to their worst case.
//!
//! Alternatives `a` and `b` are indices 0 and 1. Every generator takes a
//! single margin knob that keeps entries strictly inside `(-M/2, M/2)`; the
//! internal offsets are scaled so that the advertised bound holds exactly
//! for every `n`.

use crate::error::{Error, Result};
use crate::profile::ValuationProfile;
use crate::scalar::Scalar;

fn half<S: Scalar>(width: &S) -> S {
    width.clone() / S::from_int(2)
}

fn check_margin<S: Scalar>(margin: &S, width: &S, limit_div: i64) -> Result<()> {
    if *margin <= S::zero() {
        return Err(Error::Argument(format!("margin must be positive, got {margin}")));
    }
    if *margin >= width.clone() / S::from_int(limit_div) {
        return Err(Error::Argument(format!(
            "margin {margin} must be below M/{limit_div}"
        )));
    }
    Ok(())
}

/// Sink is agent 0 and loves `a`; every other agent mildly prefers `b`.
/// The single-sink mechanism with sink 0 picks `b` and loses at least
/// `M − 3δ` of welfare.
pub fn worst_case_profile_single_sink<S: Scalar>(
    n: usize,
    m: usize,
    width: S,
    delta: S,
) -> Result<ValuationProfile<S>> {
    if n < 2 || m < 2 {
        return Err(Error::Argument("need n >= 2 and m >= 2".into()));
    }
    check_margin(&delta, &width, 4)?;
    let h = half(&width);
    // The others' per-agent preference for b; shrunk for large n so their
    // combined loss stays below δ.
    let eps = if n <= 3 {
        delta.clone()
    } else {
        delta.clone() * S::from_ratio(2, n as i64 - 1)
    };
    let mut rows = Vec::with_capacity(n);
    let mut sink = vec![-h.clone() + &delta; m];
    sink[0] = h.clone() - &delta;
    rows.push(sink);
    for _ in 1..n {
        let mut row = vec![-h.clone() + eps.clone() / S::from_int(2); m];
        row[1] = -h.clone() + &eps;
        rows.push(row);
    }
    ValuationProfile::new(width, rows)
}

/// Profile on which a one-sink affine maximizer with unequal non-sink
/// weights `w_hi > w_lo` loses more than `M`: agent 0 is the sink, agent 1
/// carries weight `w_hi`, agent 2 weight `w_lo`, and any further agents are
/// indifferent between `a` and `b`. Loss is `M + (1 − w_lo/w_hi)M − 3ε`.
pub fn unequal_weights_counterexample<S: Scalar>(
    n: usize,
    m: usize,
    width: S,
    w_hi: S,
    w_lo: S,
    eps: S,
) -> Result<ValuationProfile<S>> {
    if n < 3 || m < 2 {
        return Err(Error::Argument("need n >= 3 and m >= 2".into()));
    }
    if w_lo <= S::zero() || w_hi <= w_lo {
        return Err(Error::Argument(format!(
            "need w_hi > w_lo > 0, got w_hi = {w_hi}, w_lo = {w_lo}"
        )));
    }
    let ratio = w_lo / w_hi;
    check_margin(&eps, &width, 4)?;
    if eps >= (S::one() - &ratio) * &width / S::from_int(4) {
        return Err(Error::Argument("margin too large for this weight ratio".into()));
    }
    let h = half(&width);
    // δ = γ = ε' with ε' = 3ε/4 so the four margin terms total 3ε.
    let d = eps * S::from_ratio(3, 4);
    let other = -h.clone() + d.clone() / S::from_int(2);

    let mut rows = vec![vec![other.clone(); m]; n];
    rows[0][0] = -h.clone() + &d;
    rows[0][1] = h.clone() - &d;
    rows[1][0] = h.clone() - &d;
    rows[1][1] = h.clone() - ratio * &width - &d;
    rows[2][0] = -h.clone() + &d;
    rows[2][1] = h.clone() - &d;
    for row in rows.iter_mut().skip(3) {
        row[0] = S::zero();
        row[1] = S::zero();
    }
    ValuationProfile::new(width, rows)
}

/// Weights `(0, w_hi, w_lo, 1, …, 1)` matching
/// [`unequal_weights_counterexample`].
pub fn unequal_weights_vector<S: Scalar>(n: usize, w_hi: S, w_lo: S) -> Vec<S> {
    let mut w = vec![S::one(); n];
    w[0] = S::zero();
    w[1] = w_hi;
    w[2] = w_lo;
    w
}

/// Two-alternative profile where `⌈n/2⌉` agents are pivotal for `a`: dropping
/// any one of them as the sink flips the choice to `b` at a loss close to
/// `M`, so NRS's expected sample inefficiency approaches `⌈n/2⌉/n²`.
pub fn nrs_worst_profile<S: Scalar>(n: usize, width: S, delta: S) -> Result<ValuationProfile<S>> {
    if n < 2 {
        return Err(Error::Argument("need n >= 2".into()));
    }
    let pivotal = n.div_ceil(2);
    check_margin(&delta, &width, 2 * (pivotal as i64 + 2))?;
    let h = half(&width);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..pivotal {
        rows.push(vec![h.clone() - &delta, -h.clone() + &delta]);
    }
    let half_delta = delta.clone() / S::from_int(2);
    for _ in 0..pivotal - 1 {
        rows.push(vec![-h.clone() + &half_delta, h.clone() - &half_delta]);
    }
    if n % 2 == 0 {
        rows.push(vec![S::zero(), delta]);
    }
    ValuationProfile::new(width, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{single_sink, AffineMaximizer, Mechanism, SinkSpec};
    use crate::metrics::absolute_inefficiency;
    use crate::randomized::{GeneralizedSink, NaiveRandomSink};
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn single_sink_worst_case_two_agents() {
        let p = worst_case_profile_single_sink(2, 2, q(1, 1), q(1, 1000)).unwrap();
        let o = single_sink(SinkSpec::new(0), &p).unwrap();
        let loss = absolute_inefficiency(&p, &o).unwrap();
        assert!(loss >= q(997, 1000), "loss {loss}");
    }

    #[test]
    fn single_sink_worst_case_bound_holds_for_many_n() {
        let delta = q(1, 1000);
        for n in 2..=9 {
            for m in 2..=4 {
                let p = worst_case_profile_single_sink(n, m, q(1, 1), delta.clone()).unwrap();
                let o = single_sink(SinkSpec::new(0), &p).unwrap();
                let loss = absolute_inefficiency(&p, &o).unwrap();
                assert!(loss >= q(1, 1) - delta.clone() * q(3, 1), "n={n} m={m} loss={loss}");
                assert!(loss < q(1, 1));
            }
        }
    }

    #[test]
    fn margin_preconditions() {
        assert!(worst_case_profile_single_sink(2, 2, q(1, 1), q(0, 1)).is_err());
        assert!(worst_case_profile_single_sink(2, 2, q(1, 1), q(1, 4)).is_err());
        assert!(worst_case_profile_single_sink(1, 2, q(1, 1), q(1, 100)).is_err());
    }

    #[test]
    fn unequal_weights_exceed_m() {
        let eps = q(1, 1000);
        let p = unequal_weights_counterexample(3, 2, q(1, 1), q(2, 1), q(1, 1), eps.clone()).unwrap();
        let am = AffineMaximizer::neutral(unequal_weights_vector(3, q(2, 1), q(1, 1)), 2).unwrap();
        let loss = absolute_inefficiency(&p, &am.run(&p).unwrap()).unwrap();
        let oracle = q(1, 1) + (q(1, 1) - q(1, 2)) * q(1, 1);
        assert!(loss > q(1, 1));
        assert!(loss >= oracle.clone() - eps * q(3, 1), "loss {loss}");
        assert!(loss <= oracle);
    }

    #[test]
    fn unequal_weights_preconditions() {
        assert!(unequal_weights_counterexample(3, 2, q(1, 1), q(1, 1), q(1, 1), q(1, 100)).is_err());
        assert!(unequal_weights_counterexample(3, 2, q(1, 1), q(1, 1), q(2, 1), q(1, 100)).is_err());
        assert!(unequal_weights_counterexample(2, 2, q(1, 1), q(2, 1), q(1, 1), q(1, 100)).is_err());
    }

    #[test]
    fn unequal_weights_excess_vanishes_as_ratio_nears_one() {
        let eps = q(1, 100_000);
        let mut previous = None;
        for (hi, lo) in [(2, 1), (4, 3), (10, 9), (100, 99)] {
            let p = unequal_weights_counterexample(4, 3, q(1, 1), q(hi, 1), q(lo, 1), eps.clone()).unwrap();
            let am = AffineMaximizer::neutral(unequal_weights_vector(4, q(hi, 1), q(lo, 1)), 3).unwrap();
            let excess = absolute_inefficiency(&p, &am.run(&p).unwrap()).unwrap() - q(1, 1);
            if let Some(prev) = previous {
                assert!(excess < prev);
            }
            previous = Some(excess);
        }
        assert!(previous.unwrap() < q(1, 50));
    }

    #[test]
    fn nrs_profile_approaches_theoretical_value() {
        for n in 2..=7usize {
            let p = nrs_worst_profile(n, q(1, 1), q(1, 10_000)).unwrap();
            let o = GeneralizedSink::new(NaiveRandomSink).run(&p).unwrap();
            let loss = absolute_inefficiency(&p, &o).unwrap();
            let sample = loss / q(n as i64, 1);
            let target = q(n.div_ceil(2) as i64, (n * n) as i64);
            assert!(sample <= target);
            assert!(target - sample < q(1, 1000), "n={n}");
        }
    }
}
