// Maximum expected utility for a one-decision treatment diagram and a
// random diagram with two decisions.
use bucketforge::fixtures::{self, NetworkShape};
use bucketforge::model::{parse_influence_diagram, ParseOptions};
use bucketforge::{elim_meu, oracle, Evidence, Ordering};

fn main() {
    let id = parse_influence_diagram(include_str!("../fixtures/treatment.id"), ParseOptions::default())
        .unwrap()
        .model;
    let names: Vec<String> = id.network().variables().iter().map(|v| v.name.clone()).collect();
    let d = Ordering::identity(id.network().len());
    let r = elim_meu(&id, &Evidence::empty(), &d).unwrap();
    print!("{}", r.render(&names));

    let mut rng = fixtures::rng(11);
    let shape = NetworkShape {
        variables: 6,
        max_cardinality: 3,
        max_parents: 2,
    };
    let id = fixtures::random_influence_diagram(&mut rng, shape, 2, 3);
    let d = fixtures::random_ordering(&mut rng, 6, id.decisions());
    let r = elim_meu(&id, &Evidence::empty(), &d).unwrap();
    let o = oracle::oracle_meu(&id, &Evidence::empty(), &d).unwrap();
    println!(
        "random diagram: meu={:.6} oracle={:.6}",
        r.value.unwrap(),
        o.value.unwrap()
    );
}
