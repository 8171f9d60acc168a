// Directional resolution on a small theory and a random 3-CNF, then
// backtrack-free model generation.
use bucketforge::fixtures;
use bucketforge::model::parse_cnf;
use bucketforge::{directional_resolution, generate_model, Ordering};

fn main() {
    let cnf = parse_cnf(include_str!("../fixtures/chain.cnf")).unwrap().model;
    let ext = directional_resolution(&cnf, &Ordering::identity(3)).unwrap();
    print!("{}", ext.to_dimacs());
    println!("model: {:?}", generate_model(&ext).unwrap());

    let mut rng = fixtures::rng(42);
    for clauses in [20, 40, 60] {
        let cnf = fixtures::random_3cnf(&mut rng, 12, clauses);
        let d = fixtures::random_ordering(&mut rng, 12, &[]);
        let ext = directional_resolution(&cnf, &d).unwrap();
        match generate_model(&ext) {
            Ok(m) => println!(
                "{clauses} clauses: sat, {} in extension, model ok: {}",
                ext.clause_count(),
                cnf.satisfied_by(&m)
            ),
            Err(e) => println!("{clauses} clauses: {e}"),
        }
    }
}
