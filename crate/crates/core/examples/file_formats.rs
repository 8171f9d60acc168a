// Round trips through the network, evidence and DIMACS text formats.
use bucketforge::fixtures::{self, NetworkShape};
use bucketforge::model::{
    parse_bayes, parse_cnf, parse_evidence, write_bayes, write_cnf, write_evidence, ParseOptions,
};

fn main() {
    let mut rng = fixtures::rng(9);
    let net = fixtures::random_network(
        &mut rng,
        NetworkShape {
            variables: 4,
            max_cardinality: 3,
            max_parents: 2,
        },
    );
    let text = write_bayes(&net);
    print!("{text}");
    let back = parse_bayes(&text, ParseOptions::default()).unwrap();
    println!("network round trip: {}", back.model == net);

    let ev = fixtures::random_evidence(&mut rng, &net, 2, &[]);
    let ev_text = write_evidence(&ev);
    print!("{ev_text}");
    println!("evidence round trip: {}", parse_evidence(&ev_text, &net).unwrap() == ev);

    let cnf = fixtures::random_3cnf(&mut rng, 5, 4);
    let dimacs = write_cnf(&cnf, &["four random clauses".to_string()]);
    print!("{dimacs}");
    println!("dimacs round trip: {}", parse_cnf(&dimacs).unwrap().model == cnf);

    // rows that do not sum to one are rejected unless parsing is lax
    let skewed = "BAYES\n1\n2\n1\n1 0\n2\n0.5 0.6\n";
    println!("strict: {}", parse_bayes(skewed, ParseOptions::default()).unwrap_err());
    let lax = parse_bayes(skewed, ParseOptions { lax: true }).unwrap();
    println!(
        "lax: {:?} warnings {:?}",
        lax.model.cpt(0).unwrap().values(),
        lax.warnings
    );
}
