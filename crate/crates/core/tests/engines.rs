use bucketforge::bucket::{BucketSchedule, ObservationMode};
use bucketforge::fixtures::{self, NetworkShape};
use bucketforge::graph::{induced_width, moral_graph, order_heuristic};
use bucketforge::model::{parse_bayes, parse_evidence, parse_influence_diagram, ParseOptions};
use bucketforge::oracle;
use bucketforge::{
    elim_bel, elim_cond_max, elim_map, elim_max, elim_meu, BeliefNetwork, CondOptions, Elimination, Error, Evidence,
    Ordering, OrderingKind,
};
use proptest::prelude::*;

fn figure2() -> BeliefNetwork {
    parse_bayes(include_str!("../fixtures/figure2.net"), ParseOptions::default())
        .unwrap()
        .model
}

fn order(net: &BeliefNetwork, names: &str) -> Ordering {
    Ordering::new(names.split(',').map(|s| net.find(s).unwrap()).collect()).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

#[test]
fn figure_two_belief_matches_oracle() {
    let net = figure2();
    let g1 = parse_evidence(include_str!("../fixtures/g1.evid"), &net).unwrap();
    let r = elim_bel(&net, net.find("A").unwrap(), &g1, &order(&net, "A,C,B,E,D,G")).unwrap();
    let b = r.belief.unwrap();
    let o = oracle::oracle_bel(&net, net.find("A").unwrap(), &g1).unwrap();
    for (x, y) in b.iter().zip(o.belief.unwrap()) {
        assert!((x - y).abs() < 1e-12);
    }
    assert!((b[0] - 0.526814126467).abs() < 1e-11);
}

#[test]
fn belief_does_not_depend_on_ordering() {
    let net = figure2();
    let a = net.find("A").unwrap();
    let g1 = parse_evidence("1\n5 1\n", &net).unwrap();
    let one = elim_bel(&net, a, &g1, &order(&net, "A,C,B,E,D,G")).unwrap();
    let two = elim_bel(&net, a, &g1, &order(&net, "A,G,E,D,C,B")).unwrap();
    for (x, y) in one.belief.unwrap().iter().zip(two.belief.unwrap()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn query_must_come_first() {
    let net = figure2();
    let r = elim_bel(
        &net,
        net.find("B").unwrap(),
        &Evidence::empty(),
        &order(&net, "A,B,C,D,E,G"),
    );
    assert!(matches!(r, Err(Error::Ordering(_))));
}

#[test]
fn map_requires_hypothesis_prefix() {
    let net = figure2();
    let hyp = [net.find("B").unwrap(), net.find("C").unwrap()];
    let ok = elim_map(&net, &hyp, &Evidence::empty(), &order(&net, "C,B,A,D,E,G")).unwrap();
    let o = oracle::oracle_map(&net, &hyp, &Evidence::empty(), &order(&net, "C,B,A,D,E,G")).unwrap();
    assert_eq!(ok.assignment, o.assignment);
    assert!(close(ok.value.unwrap(), o.value.unwrap()));
    let bad = elim_map(&net, &hyp, &Evidence::empty(), &order(&net, "A,B,C,D,E,G"));
    assert!(matches!(bad, Err(Error::Ordering(_))));
}

#[test]
fn impossible_evidence_is_reported() {
    let text = "BAYES\n2\n2 2\n2\n1 0\n2 0 1\n2\n1 0\n4\n1 0 0 1\n";
    let net = parse_bayes(text, ParseOptions::default()).unwrap().model;
    let ev = Evidence::new(&[(0, 0), (1, 1)], &[2, 2]).unwrap();
    assert_eq!(
        elim_max(&net, &ev, &Ordering::identity(2)).unwrap_err(),
        Error::ImpossibleEvidence
    );
    assert_eq!(
        elim_bel(&net, 0, &ev, &Ordering::identity(2)).unwrap_err(),
        Error::ImpossibleEvidence
    );
}

#[test]
fn treatment_decision() {
    let id = parse_influence_diagram(include_str!("../fixtures/treatment.id"), ParseOptions::default())
        .unwrap()
        .model;
    let d = Ordering::identity(id.network().len());
    let r = elim_meu(&id, &Evidence::empty(), &d).unwrap();
    let o = oracle::oracle_meu(&id, &Evidence::empty(), &d).unwrap();
    assert!(close(r.value.unwrap(), 35.25));
    assert_eq!(r.assignment, o.assignment);
}

#[test]
fn cond_max_on_figure_two() {
    let net = figure2();
    let d = order(&net, "A,C,B,E,D,G");
    let b = net.find("B").unwrap();
    let plain = elim_max(&net, &Evidence::empty(), &d).unwrap();
    let cond = elim_cond_max(&net, &[b], &Evidence::empty(), &d, &CondOptions { parallel: 2 }).unwrap();
    assert_eq!(cond.stats.iterations, 2);
    assert_eq!(cond.assignment, plain.assignment);
    assert!(close(cond.value.unwrap(), plain.value.unwrap()));
}

#[test]
fn tree_min_degree_width_is_one() {
    let mut rng = fixtures::rng(5);
    let net = fixtures::random_tree_network(&mut rng, 20, 3);
    let g = moral_graph(&net);
    assert!(g.is_forest());
    let d = order_heuristic(&g, &OrderingKind::MinDegree).unwrap();
    assert!(induced_width(&g, &d).induced_width <= 1);
}

/// Runs the max pass by hand and returns the accumulated constant.
fn max_constant(net: &BeliefNetwork, ev: &Evidence, d: &Ordering, mode: ObservationMode) -> f64 {
    let mut s = BucketSchedule::partition(net.factors(), Vec::new(), d, ev, &net.cardinalities())
        .unwrap()
        .with_observation_mode(mode);
    for pos in (0..s.len()).rev() {
        s.process_bucket(pos, Elimination::Max).unwrap();
    }
    s.constant()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scatter_and_multiply_first_agree(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = fixtures::rng(seed);
        let net = fixtures::random_network(&mut rng, NetworkShape { variables: n, max_cardinality: 3, max_parents: 2 });
        let ev = fixtures::random_evidence(&mut rng, &net, 2, &[]);
        let d = fixtures::random_ordering(&mut rng, n, &[]);
        let a = max_constant(&net, &ev, &d, ObservationMode::Scatter);
        let b = max_constant(&net, &ev, &d, ObservationMode::MultiplyFirst);
        prop_assert!(close(a, b), "{} vs {}", a, b);
        let o = oracle::oracle_mpe(&net, &ev, &d).unwrap();
        prop_assert!(close(a, o.value.unwrap()));
    }

    #[test]
    fn cond_max_matches_plain_max(seed in any::<u64>(), n in 2usize..8, parallel in 1usize..5) {
        let mut rng = fixtures::rng(seed);
        let net = fixtures::random_network(&mut rng, NetworkShape { variables: n, max_cardinality: 2, max_parents: 3 });
        let cutset: Vec<usize> = (0..n).filter(|_| rand::Rng::gen_bool(&mut rng, 0.3)).collect();
        let ev = fixtures::random_evidence(&mut rng, &net, 2, &cutset);
        let d = fixtures::random_ordering(&mut rng, n, &[]);
        let plain = elim_max(&net, &ev, &d).unwrap();
        let cond = elim_cond_max(&net, &cutset, &ev, &d, &CondOptions { parallel }).unwrap();
        prop_assert!(close(plain.value.unwrap(), cond.value.unwrap()));
        prop_assert_eq!(plain.assignment, cond.assignment);
        prop_assert_eq!(cond.stats.iterations, 1usize << cutset.len());
    }

    #[test]
    fn belief_sums_to_one(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = fixtures::rng(seed);
        let net = fixtures::random_network(&mut rng, NetworkShape { variables: n, max_cardinality: 3, max_parents: 3 });
        let q = rand::Rng::gen_range(&mut rng, 0..n);
        let ev = fixtures::random_evidence(&mut rng, &net, 2, &[q]);
        let d = fixtures::random_ordering(&mut rng, n, &[q]);
        let r = elim_bel(&net, q, &ev, &d).unwrap();
        let total: f64 = r.belief.unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}
