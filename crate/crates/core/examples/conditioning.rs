// Trading memory for time: condition on a cutset so each pass records
// smaller functions, and compare with plain elimination.
use bucketforge::fixtures::{self, NetworkShape};
use bucketforge::graph::{conditional_induced_width, cutset_heuristic, induced_width, moral_graph};
use bucketforge::{elim_cond_max, elim_max, CondOptions, Evidence};

fn main() {
    let mut rng = fixtures::rng(3);
    let shape = NetworkShape {
        variables: 12,
        max_cardinality: 2,
        max_parents: 3,
    };
    let net = fixtures::random_network(&mut rng, shape);
    let g = moral_graph(&net);
    let d = fixtures::random_ordering(&mut rng, net.len(), &[]);
    let plain = elim_max(&net, &Evidence::empty(), &d).unwrap();
    println!(
        "w* = {}, recorded {}",
        induced_width(&g, &d).induced_width,
        plain.stats.max_recorded_scope
    );

    for bound in (0..=2).rev() {
        let cutset = cutset_heuristic(&g, bound);
        let r = elim_cond_max(&net, &cutset, &Evidence::empty(), &d, &CondOptions { parallel: 4 }).unwrap();
        println!(
            "bound {bound}: |C| = {}, w_C* = {}, iterations = {}, recorded {}, same value: {}",
            cutset.len(),
            conditional_induced_width(&g, &cutset, &d),
            r.stats.iterations,
            r.stats.max_recorded_scope,
            r.value == plain.value || (r.value.unwrap() - plain.value.unwrap()).abs() < 1e-12,
        );
    }
}
