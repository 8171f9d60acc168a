// Posterior of A given G = 1 on the seven-node network, checked against
// brute-force enumeration.
use bucketforge::model::{parse_bayes, parse_evidence, ParseOptions};
use bucketforge::{elim_bel, oracle, Ordering};

fn main() {
    let net = parse_bayes(include_str!("../fixtures/figure2.net"), ParseOptions::default())
        .expect("fixture parses")
        .model;
    let evidence = parse_evidence(include_str!("../fixtures/g1.evid"), &net).expect("evidence parses");
    let a = net.find("A").unwrap();
    let d = Ordering::new(
        ["A", "C", "B", "E", "D", "G"]
            .iter()
            .map(|s| net.find(s).unwrap())
            .collect(),
    )
    .unwrap();

    let r = elim_bel(&net, a, &evidence, &d).expect("belief update");
    let names: Vec<String> = net.variables().iter().map(|v| v.name.clone()).collect();
    print!("{}", r.render(&names));
    for t in &r.trace {
        println!("  {}", t.render(&names));
    }

    let check = oracle::oracle_bel(&net, a, &evidence).unwrap();
    println!("oracle: {:?}", check.belief.unwrap());
}
