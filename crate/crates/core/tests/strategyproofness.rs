use sinkmech::verify::{check_strategyproof, check_weak_monotonicity};
use sinkmech::{
    GridSpec, IrrelevantSink, GeneralizedSink, Mechanism, ModifiedIrrelevantSink, NaiveRandomSink, Rational, Scalar,
    SingleSink, ValuationProfile, Vcg, ViolationKind,
};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn grids(min_agents: usize) -> impl Iterator<Item = GridSpec<Rational>> {
    (min_agents..=3).flat_map(|n| {
        (2..=3).flat_map(move |m| (2..=3).map(move |k| GridSpec::new(n, m, k, q(1, 1)).unwrap()))
    })
}

fn assert_strategyproof(mechanism: &(impl Mechanism<Rational> + ?Sized), grid: &GridSpec<Rational>) {
    let found = check_strategyproof(mechanism, grid).unwrap();
    assert!(
        found.is_empty(),
        "{} on n={} m={} k={}: {}",
        mechanism.name(),
        grid.n,
        grid.m,
        grid.k,
        found[0].to_text()
    );
}

#[test]
fn vcg_has_no_profitable_misreport() {
    for grid in grids(1) {
        assert_strategyproof(&Vcg, &grid);
    }
}

#[test]
fn every_single_sink_is_strategyproof() {
    for grid in grids(2) {
        for sink in 0..grid.n {
            assert_strategyproof(&SingleSink::new(sink), &grid);
        }
    }
}

#[test]
fn modified_irrelevant_sink_is_strategyproof() {
    for grid in grids(2) {
        assert_strategyproof(&GeneralizedSink::new(ModifiedIrrelevantSink::default()), &grid);
        assert_strategyproof(&GeneralizedSink::new(NaiveRandomSink), &grid);
    }
}

fn row(values: [(i64, i64); 3]) -> Vec<Rational> {
    values.iter().map(|&(n, d)| q(n, d)).collect()
}

#[test]
fn irrelevant_sink_can_be_manipulated() {
    let grid = GridSpec::new(3, 3, 3, q(1, 1)).unwrap();
    let mechanism = GeneralizedSink::new(IrrelevantSink);

    let first = ValuationProfile::new(
        q(1, 1),
        vec![
            row([(1, 2), (0, 1), (-1, 2)]),
            row([(-1, 2), (0, 1), (1, 2)]),
            row([(0, 1), (-1, 2), (1, 2)]),
        ],
    )
    .unwrap();
    let honest = row([(-1, 2), (0, 1), (1, 2)]);
    let lie = first.row(2).to_vec();
    let second = first.with_row(2, &honest).unwrap();

    let at_first = mechanism.run(&first).unwrap();
    let at_second = mechanism.run(&second).unwrap();
    assert_eq!(at_first.alternative_distribution(3), vec![q(0, 1), q(0, 1), q(1, 1)]);
    assert_eq!(at_second.alternative_distribution(3), vec![q(2, 3), q(0, 1), q(1, 3)]);

    // Agent 3 with the second row as truth: honest utility 1/6, lying 1/2.
    assert_eq!(at_second.expected_utility(2, &honest), q(1, 6));
    assert_eq!(at_first.expected_utility(2, &honest), q(1, 2));

    let sp = check_strategyproof(&mechanism, &grid).unwrap();
    let second_index = grid.index_of(&second).unwrap();
    let hit = sp
        .iter()
        .find(|r| r.profile_index == second_index && r.agent == Some(2) && r.misreport.as_deref() == Some(&lie[..]))
        .expect("the documented manipulation is reported");
    assert_eq!(hit.kind, ViolationKind::Strategyproofness);
    assert_eq!(hit.gain, q(1, 3));

    let wmon = check_weak_monotonicity(&mechanism, &grid).unwrap();
    let first_index = grid.index_of(&first).unwrap();
    let pair = wmon
        .iter()
        .find(|r| {
            r.agent == Some(2)
                && ((r.profile_index == first_index && r.misreport.as_deref() == Some(&honest[..]))
                    || (r.profile_index == second_index && r.misreport.as_deref() == Some(&lie[..])))
        })
        .expect("weak monotonicity fails between the two profiles");
    assert_eq!(pair.gain, q(1, 3));
}

#[test]
fn float_mode_agrees_on_the_violation_count() {
    let exact = GridSpec::new(3, 3, 2, q(1, 1)).unwrap();
    let float = GridSpec::new(3, 3, 2, 1.0f64).unwrap();
    let mechanism = GeneralizedSink::new(IrrelevantSink);
    let a = check_strategyproof(&mechanism, &exact).unwrap();
    let b = check_strategyproof(&mechanism, &float).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.profile_index, y.profile_index);
        assert!((x.gain.to_f64() - y.gain).abs() < 1e-9);
    }
}
