mod oracle;

use num_traits::Zero;
use proptest::prelude::*;
use sinkmech::metrics::{grid_supremum, Metric};
use sinkmech::randomized::{FixedSink, GeneralizedSink, SinkDistribution};
use sinkmech::verify::{check_budget_balance, check_strategyproof};
use sinkmech::{Rational, Scalar};
use sinkmech_amd::certificate::APPENDIX_CERTIFICATE;
use sinkmech_amd::{
    build_lp, solve_lp, verify_dual_certificate, Bound, DualCertificate, LinearProgram, MechanismClass,
    ProfileIndexing, Row, RowKind, Sense,
};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn grid(k: usize) -> ProfileIndexing {
    ProfileIndexing::new(2, 2, k, Rational::from_int(1)).unwrap()
}

fn optimum(class: MechanismClass, k: usize, symmetric: bool) -> Rational {
    solve_lp(&build_lp(class, &grid(k), symmetric).unwrap().lp).unwrap().value
}

#[test]
fn two_level_program_matches_the_reference_solver() {
    for symmetric in [false, true] {
        let design = build_lp(MechanismClass::Unrestricted, &grid(2), symmetric).unwrap();
        let ours = solve_lp(&design.lp).unwrap();
        match oracle::solve(&design.lp) {
            oracle::Outcome::Optimal(value, _) => assert_eq!(value, ours.value),
            other => panic!("reference solver returned {other:?}"),
        }
        assert!(ours.value.is_zero());
    }
}

#[test]
fn sink_program_matches_the_reference_solver() {
    let design = build_lp(MechanismClass::GeneralizedSink, &grid(2), false).unwrap();
    let ours = solve_lp(&design.lp).unwrap();
    let oracle::Outcome::Optimal(value, _) = oracle::solve(&design.lp) else {
        panic!("reference solver failed");
    };
    assert_eq!(value, ours.value);
}

#[test]
fn symmetry_reduction_preserves_the_optimum() {
    for k in [2, 3] {
        let full = optimum(MechanismClass::Unrestricted, k, false);
        let reduced = optimum(MechanismClass::Unrestricted, k, true);
        assert_eq!(full, reduced, "k = {k}");
    }
    for k in [2, 3] {
        assert_eq!(
            optimum(MechanismClass::GeneralizedSink, k, false),
            optimum(MechanismClass::GeneralizedSink, k, true)
        );
    }
}

#[test]
fn three_level_optimum_and_certificate() {
    let design = build_lp(MechanismClass::Unrestricted, &grid(3), true).unwrap();
    let solution = solve_lp(&design.lp).unwrap();
    assert_eq!(solution.value, q(1, 7));

    let cert = DualCertificate::parse(APPENDIX_CERTIFICATE).unwrap();
    let report = verify_dual_certificate(&design, &cert).unwrap();
    assert!(report.feasible, "{}", report.summary());
    assert_eq!(report.objective, q(1, 7));

    // Weak duality for every feasible scaling of the certificate.
    for t in [q(0, 1), q(1, 4), q(1, 2), q(1, 1)] {
        let report = verify_dual_certificate(&design, &cert.scaled(&t)).unwrap();
        assert!(report.feasible);
        assert_eq!(report.objective, &t / Rational::from_int(7));
        assert!(report.objective <= solution.value);
    }
    // Beyond the scale of one the bound on `l` is violated.
    let over = verify_dual_certificate(&design, &cert.scaled(&q(8, 7))).unwrap();
    assert!(!over.feasible);
}

#[test]
fn optimal_mechanism_round_trips_through_the_verifiers() {
    let idx = grid(3);
    let design = build_lp(MechanismClass::Unrestricted, &idx, true).unwrap();
    let solution = solve_lp(&design.lp).unwrap();
    let mechanism = design.mechanism(&solution.primal).unwrap();
    assert!(check_strategyproof(&mechanism, &idx.grid).unwrap().is_empty());
    assert!(check_budget_balance(&mechanism, &idx.grid).unwrap().max_abs_surplus.is_zero());
    let (worst, _) = grid_supremum(&Metric::AbsoluteInefficiency, &idx.grid, &mechanism).unwrap();
    assert_eq!(worst, q(1, 7));
}

#[test]
fn four_level_optimum() {
    // Frozen from an independent floating-point LP solve, rounded to the
    // nearest fraction with a small denominator.
    assert_eq!(optimum(MechanismClass::Unrestricted, 4, true), q(5, 32));
}

#[test]
fn sink_program_values() {
    let mut previous = Rational::zero();
    for k in 2..=4 {
        let value = optimum(MechanismClass::GeneralizedSink, k, true);
        let analytic = (Rational::from_int(1) - q(1, k as i64 - 1)) / Rational::from_int(2);
        assert_eq!(value, analytic, "k = {k}");
        assert!(value <= q(1, 2));
        assert!(value >= previous);
        previous = value;

        let idx = grid(k);
        let uniform = GeneralizedSink::new(FixedSink(SinkDistribution::<Rational>::uniform(2).unwrap()));
        let (abs, _) = grid_supremum(&Metric::AbsoluteInefficiency, &idx.grid, &uniform).unwrap();
        // The uniform sink loses half the range on every grid; the program's
        // optimum approaches it from below.
        assert_eq!(abs, q(1, 2));
        assert!(previous <= abs);
        let (sample, _) = grid_supremum(&Metric::SampleInefficiency, &idx.grid, &uniform).unwrap();
        assert_eq!(sample, q(1, 4));
    }
}

#[test]
fn lp_export() {
    let design = build_lp(MechanismClass::Unrestricted, &grid(2), false).unwrap();
    let text = design.lp.to_lp_text();
    assert!(text.starts_with("\\ rational coefficients"));
    assert!(text.contains("Minimize\n obj: l\n"));
    assert!(text.contains("Subject To\n"));
    assert!(text.contains(" p_1_0 free\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with(" sp_")).count(), 2 * 16 * 3);
    assert!(text.trim_end().ends_with("End"));
}

#[test]
fn infeasible_and_unbounded_are_distinct() {
    let mut lp = LinearProgram::default();
    let x = lp.add_variable("x", Bound::NonNegative, q(1, 1));
    lp.add_row(Row::new("lo", RowKind::Other, [(x, q(1, 1))], Sense::Ge, q(3, 1)));
    lp.add_row(Row::new("hi", RowKind::Other, [(x, q(1, 1))], Sense::Le, q(2, 1)));
    assert!(matches!(solve_lp(&lp), Err(sinkmech_amd::Error::Infeasible(_))));
    assert_eq!(oracle::solve(&lp), oracle::Outcome::Infeasible);

    let mut lp = LinearProgram::default();
    let x = lp.add_variable("x", Bound::Free, q(-1, 1));
    lp.add_row(Row::new("lo", RowKind::Other, [(x, q(1, 1))], Sense::Ge, q(3, 1)));
    assert!(matches!(solve_lp(&lp), Err(sinkmech_amd::Error::Unbounded(_))));
    assert_eq!(oracle::solve(&lp), oracle::Outcome::Unbounded);
}

fn small_lp() -> impl Strategy<Value = LinearProgram> {
    let coeff = -4i64..=4;
    (1usize..=4, 1usize..=5).prop_flat_map(move |(nv, nr)| {
        (
            prop::collection::vec((coeff.clone(), any::<bool>()), nv),
            prop::collection::vec((prop::collection::vec(coeff.clone(), nv), 0u8..3, -6i64..=6), nr),
        )
            .prop_map(move |(vars, rows)| {
                let mut lp = LinearProgram::default();
                for (j, (c, free)) in vars.iter().enumerate() {
                    let bound = if *free { Bound::Free } else { Bound::NonNegative };
                    lp.add_variable(format!("x{j}"), bound, q(*c, 1));
                    // A box keeps every instance bounded.
                    lp.add_row(Row::new(format!("box{j}"), RowKind::Other, [(j, q(1, 1))], Sense::Le, q(5, 1)));
                    lp.add_row(Row::new(format!("floor{j}"), RowKind::Other, [(j, q(1, 1))], Sense::Ge, q(-5, 1)));
                }
                for (i, (a, sense, b)) in rows.into_iter().enumerate() {
                    let sense = [Sense::Le, Sense::Ge, Sense::Eq][sense as usize];
                    let coeffs = a.into_iter().enumerate().map(|(j, x)| (j, q(x, 1)));
                    lp.add_row(Row::new(format!("r{i}"), RowKind::Other, coeffs, sense, q(b, 2)));
                }
                lp
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_programs_agree_with_the_reference_solver(lp in small_lp()) {
        match (solve_lp(&lp), oracle::solve(&lp)) {
            (Ok(ours), oracle::Outcome::Optimal(value, _)) => prop_assert_eq!(ours.value, value),
            (Err(sinkmech_amd::Error::Infeasible(_)), oracle::Outcome::Infeasible) => {}
            (ours, theirs) => prop_assert!(false, "solver {:?} vs reference {:?}", ours.map(|s| s.value), theirs),
        }
    }
}
