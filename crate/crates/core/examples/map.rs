// Maximum a posteriori hypothesis over a subset of the variables.
use bucketforge::model::{parse_bayes, parse_evidence, ParseOptions};
use bucketforge::{elim_map, oracle, Ordering};

fn main() {
    let net = parse_bayes(include_str!("../fixtures/figure2.net"), ParseOptions::default())
        .unwrap()
        .model;
    let names: Vec<String> = net.variables().iter().map(|v| v.name.clone()).collect();
    let evidence = parse_evidence("1\n5 1\n", &net).unwrap();
    let hyp = [net.find("B").unwrap(), net.find("C").unwrap()];

    // hypothesis variables occupy the first positions
    let d = Ordering::new(
        ["B", "C", "A", "E", "D", "G"]
            .iter()
            .map(|s| net.find(s).unwrap())
            .collect(),
    )
    .unwrap();
    let r = elim_map(&net, &hyp, &evidence, &d).unwrap();
    print!("{}", r.render(&names));

    let o = oracle::oracle_map(&net, &hyp, &evidence, &d).unwrap();
    println!("oracle agrees: {}", o.assignment == r.assignment);
}
