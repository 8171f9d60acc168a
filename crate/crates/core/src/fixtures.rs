//! Seeded model generators and the six-variable textbook network.
//!
//! Everything here is deterministic in its seed so tests, examples and the
//! `gen` subcommand reproduce the same instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::factor::DiscreteFactor;
use crate::graph::Ordering;
use crate::model::{BeliefNetwork, Clause, CnfTheory, Evidence, InfluenceDiagram, Variable};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ids of A, B, C, D, E, G in [`figure2_network`].
pub const FIGURE2_IDS: [usize; 6] = [0, 1, 2, 3, 4, 5];

/// A random conditional table for `child` given `parents` (in that scope-line
/// order). Entries are bounded away from zero.
pub fn random_cpt(rng: &mut FixtureRng, child: usize, parents: &[usize], cards: &[usize]) -> DiscreteFactor {
    let mut order = parents.to_vec();
    order.push(child);
    let order_cards: Vec<usize> = order.iter().map(|&v| cards[v]).collect();
    let rows: usize = parents.iter().map(|&p| cards[p]).product();
    let mut values = Vec::with_capacity(rows * cards[child]);
    for _ in 0..rows {
        let row: Vec<f64> = (0..cards[child]).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = row.iter().sum();
        values.extend(row.iter().map(|v| v / total));
    }
    DiscreteFactor::from_ordered(&order, &order_cards, values).expect("valid random CPT")
}

fn assemble(names: Vec<String>, cards: Vec<usize>, parents: Vec<Vec<usize>>, rng: &mut FixtureRng) -> BeliefNetwork {
    let variables = names
        .into_iter()
        .zip(&cards)
        .enumerate()
        .map(|(i, (name, &c))| Variable::new(i, name, c))
        .collect();
    let cpts = (0..cards.len())
        .map(|i| random_cpt(rng, i, &parents[i], &cards))
        .collect();
    BeliefNetwork::new(variables, parents, cpts).expect("valid random network")
}

/// The network P(g|e) P(e|c,b) P(d|b,a) P(b|a) P(c|a) P(a) over binary
/// variables, with CPT entries drawn from `seed`.
pub fn figure2_network(seed: u64) -> BeliefNetwork {
    let [a, b, c, _d, e, _g] = FIGURE2_IDS;
    let names = ["A", "B", "C", "D", "E", "G"].iter().map(|s| s.to_string()).collect();
    let parents = vec![vec![], vec![a], vec![a], vec![b, a], vec![c, b], vec![e]];
    assemble(names, vec![2; 6], parents, &mut rng(seed))
}

#[derive(Debug, Clone, Copy)]
pub struct NetworkShape {
    pub variables: usize,
    pub max_cardinality: usize,
    pub max_parents: usize,
}

/// A random DAG. Ids are shuffled relative to the topological order so the
/// two never coincide by construction.
pub fn random_network(rng: &mut FixtureRng, shape: NetworkShape) -> BeliefNetwork {
    let n = shape.variables;
    let cards: Vec<usize> = (0..n)
        .map(|_| rng.gen_range(2..=shape.max_cardinality.max(2)))
        .collect();
    let mut topo: Vec<usize> = (0..n).collect();
    topo.shuffle(rng);
    let mut parents = vec![Vec::new(); n];
    for (pos, &child) in topo.iter().enumerate() {
        let k = rng.gen_range(0..=shape.max_parents.min(pos));
        parents[child] = topo[..pos].choose_multiple(rng, k).copied().collect();
    }
    let names = (0..n).map(Variable::default_name).collect();
    assemble(names, cards, parents, rng)
}

/// A random directed forest: every variable has at most one parent.
pub fn random_tree_network(rng: &mut FixtureRng, n: usize, max_cardinality: usize) -> BeliefNetwork {
    let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=max_cardinality.max(2))).collect();
    let mut topo: Vec<usize> = (0..n).collect();
    topo.shuffle(rng);
    let mut parents = vec![Vec::new(); n];
    for pos in 1..n {
        parents[topo[pos]] = vec![topo[rng.gen_range(0..pos)]];
    }
    let names = (0..n).map(Variable::default_name).collect();
    assemble(names, cards, parents, rng)
}

/// A random influence diagram with up to `decisions` root decisions and
/// `utilities` utility tables over at most three variables each.
pub fn random_influence_diagram(
    rng: &mut FixtureRng,
    shape: NetworkShape,
    decisions: usize,
    utilities: usize,
) -> InfluenceDiagram {
    let n = shape.variables;
    let k = decisions.min(n.saturating_sub(1));
    let cards: Vec<usize> = (0..n)
        .map(|_| rng.gen_range(2..=shape.max_cardinality.max(2)))
        .collect();
    let mut topo: Vec<usize> = (0..n).collect();
    topo.shuffle(rng);
    let decision_ids: Vec<usize> = topo[..k].to_vec();
    let mut parents = vec![Vec::new(); n];
    let mut cpts = vec![None; n];
    for pos in k..n {
        let child = topo[pos];
        let m = rng.gen_range(0..=shape.max_parents.min(pos));
        parents[child] = topo[..pos].choose_multiple(rng, m).copied().collect();
        cpts[child] = Some(random_cpt(rng, child, &parents[child], &cards));
    }
    let mut tables = Vec::with_capacity(utilities);
    for _ in 0..utilities {
        let size = rng.gen_range(1..=3.min(n));
        let mut scope: Vec<usize> = (0..n).collect::<Vec<_>>().choose_multiple(rng, size).copied().collect();
        scope.sort_unstable();
        let scope_cards: Vec<usize> = scope.iter().map(|&v| cards[v]).collect();
        let len: usize = scope_cards.iter().product();
        let values = (0..len).map(|_| rng.gen_range(-5.0..10.0)).collect();
        tables.push(DiscreteFactor::new(scope, scope_cards, values).expect("valid utility"));
    }
    let variables = cards
        .iter()
        .enumerate()
        .map(|(i, &c)| Variable::new(i, Variable::default_name(i), c))
        .collect();
    InfluenceDiagram::new(variables, parents, cpts, decision_ids, tables).expect("valid random diagram")
}

/// Observes up to `max_vars` variables outside `exclude`.
pub fn random_evidence(rng: &mut FixtureRng, net: &BeliefNetwork, max_vars: usize, exclude: &[usize]) -> Evidence {
    let candidates: Vec<usize> = (0..net.len()).filter(|v| !exclude.contains(v)).collect();
    let k = rng.gen_range(0..=max_vars.min(candidates.len()));
    let cards = net.cardinalities();
    let mut pairs: Vec<(usize, usize)> = candidates
        .choose_multiple(rng, k)
        .map(|&v| (v, rng.gen_range(0..cards[v])))
        .collect();
    pairs.sort_unstable();
    Evidence::new(&pairs, &cards).expect("valid random evidence")
}

/// A uniformly random ordering whose first positions hold `first`, itself
/// shuffled.
pub fn random_ordering(rng: &mut FixtureRng, n: usize, first: &[usize]) -> Ordering {
    let mut head = first.to_vec();
    head.shuffle(rng);
    let mut tail: Vec<usize> = (0..n).filter(|v| !first.contains(v)).collect();
    tail.shuffle(rng);
    head.extend(tail);
    Ordering::new(head).expect("permutation")
}

/// Random 3-CNF (fewer literals when `props < 3`); tautologies are redrawn.
pub fn random_3cnf(rng: &mut FixtureRng, props: usize, clauses: usize) -> CnfTheory {
    let width = props.min(3);
    let mut out = Vec::with_capacity(clauses);
    while out.len() < clauses {
        let vars: Vec<usize> = (1..=props)
            .collect::<Vec<_>>()
            .choose_multiple(rng, width)
            .copied()
            .collect();
        let lits = vars
            .into_iter()
            .map(|v| if rng.gen_bool(0.5) { v as i32 } else { -(v as i32) })
            .collect();
        if let Some(c) = Clause::new(lits) {
            out.push(c);
        }
    }
    CnfTheory::new(props, out).expect("valid random theory")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure2_structure() {
        let net = figure2_network(3);
        let [a, b, c, d, e, g] = FIGURE2_IDS;
        assert_eq!(net.parents(g), &[e]);
        assert_eq!(net.parents(e), &[c, b]);
        assert_eq!(net.parents(d), &[b, a]);
        assert_eq!(net.parents(b), &[a]);
        assert_eq!(net.parents(c), &[a]);
        assert!(net.parents(a).is_empty());
        assert_eq!(net.variable(g).name, "G");
    }

    #[test]
    fn generators_are_deterministic() {
        let shape = NetworkShape {
            variables: 7,
            max_cardinality: 3,
            max_parents: 3,
        };
        let a = random_network(&mut rng(42), shape);
        let b = random_network(&mut rng(42), shape);
        assert_eq!(a, b);
        let id = random_influence_diagram(&mut rng(5), shape, 2, 3);
        for &d in id.decisions() {
            assert!(id.network().parents(d).is_empty());
            assert!(id.network().cpt(d).is_none());
        }
    }
}
