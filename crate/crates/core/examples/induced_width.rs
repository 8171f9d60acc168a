// Width, induced width and fill edges of the moral graph under explicit
// and heuristic orderings.
use bucketforge::fixtures;
use bucketforge::graph::{induced_width, moral_graph, order_heuristic};
use bucketforge::{Ordering, OrderingKind};

fn main() {
    let net = fixtures::figure2_network(1);
    let g = moral_graph(&net);
    let name = |v: usize| net.variable(v).name.clone();
    let edges: Vec<String> = g
        .edges()
        .iter()
        .map(|&(a, b)| format!("{}-{}", name(a), name(b)))
        .collect();
    println!("moral edges: {}", edges.join(" "));

    let given = Ordering::new(
        ["A", "B", "C", "E", "D", "G"]
            .iter()
            .map(|s| net.find(s).unwrap())
            .collect(),
    )
    .unwrap();
    println!("A,B,C,E,D,G: {}", induced_width(&g, &given));
    println!("reverse:     {}", induced_width(&g, &given.reversed()));

    for kind in [OrderingKind::MinDegree, OrderingKind::MinFill] {
        let d = order_heuristic(&g, &kind).unwrap();
        let seq: Vec<String> = d.sequence().iter().map(|&v| name(v)).collect();
        println!("{kind:?} {}: {}", seq.join(","), induced_width(&g, &d));
    }
}
