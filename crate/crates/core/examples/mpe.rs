// Most probable explanation with and without evidence, plus the recorded
// arity along an ordering and its reverse.
use bucketforge::fixtures;
use bucketforge::{elim_max, Evidence, Ordering};

fn main() {
    let net = fixtures::figure2_network(7);
    let names: Vec<String> = net.variables().iter().map(|v| v.name.clone()).collect();
    let d = Ordering::new(vec![0, 1, 2, 4, 3, 5]).unwrap();

    let r = elim_max(&net, &Evidence::empty(), &d).unwrap();
    print!("{}", r.render(&names));

    let reverse = elim_max(&net, &Evidence::empty(), &d.reversed()).unwrap();
    println!("max arity along {}: {}", d.to_line(), r.stats.max_recorded_scope);
    println!("max arity along reverse: {}", reverse.stats.max_recorded_scope);

    // observe B first in the ordering: the rest behaves like a tree
    let b = net.find("B").unwrap();
    let ev = Evidence::new(&[(b, 1)], &net.cardinalities()).unwrap();
    let d = Ordering::new(vec![0, 2, 4, 5, 3, 1]).unwrap();
    let r = elim_max(&net, &ev, &d).unwrap();
    print!("{}", r.render(&names));
}
