//! Undirected graph views of models, orderings, induced width, and ordering
//! and cutset heuristics.

mod heuristic;
mod order;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{BeliefNetwork, CnfTheory, InfluenceDiagram};

pub use heuristic::{conditional_induced_width, constrained_order, cutset_heuristic, order_heuristic, OrderingKind};
pub use order::{induced_width, Ordering, WidthReport};

/// Symmetric adjacency over nodes `0..n`, without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphView {
    adjacency: Vec<BTreeSet<usize>>,
}

impl GraphView {
    pub fn new(n: usize) -> Self {
        GraphView {
            adjacency: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = GraphView::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Adds an undirected edge; self-loops are ignored. Returns true if new.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        self.adjacency[b].insert(a);
        self.adjacency[a].insert(b)
    }

    pub fn add_clique(&mut self, nodes: &[usize]) {
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                self.add_edge(a, b);
            }
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(&b)
    }

    pub fn neighbors(&self, node: usize) -> &BTreeSet<usize> {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// Edges as `(low, high)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.range(a + 1..).map(move |&b| (a, b)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// The same node set with every edge touching `removed` dropped. Node ids
    /// are preserved so orderings over the full graph still apply.
    pub fn without(&self, removed: &[usize]) -> GraphView {
        let gone: BTreeSet<usize> = removed.iter().copied().collect();
        let adjacency = self
            .adjacency
            .iter()
            .enumerate()
            .map(|(v, ns)| {
                if gone.contains(&v) {
                    BTreeSet::new()
                } else {
                    ns.difference(&gone).copied().collect()
                }
            })
            .collect();
        GraphView { adjacency }
    }

    /// True when the graph has no cycle.
    pub fn is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn root(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for (a, b) in self.edges() {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }
}

/// DAG edges without direction, plus a clique over every parent set.
pub fn moral_graph(net: &BeliefNetwork) -> GraphView {
    let mut g = GraphView::new(net.len());
    for child in 0..net.len() {
        let pa = net.parents(child);
        for &p in pa {
            g.add_edge(p, child);
        }
        g.add_clique(pa);
    }
    g
}

/// The moral graph with a clique over every utility scope.
pub fn augmented_graph(id: &InfluenceDiagram) -> GraphView {
    let mut g = moral_graph(id.network());
    for u in id.utilities() {
        g.add_clique(u.scope());
    }
    g
}

/// One node per proposition; each clause scope becomes a clique.
pub fn interaction_graph(cnf: &CnfTheory) -> GraphView {
    let mut g = GraphView::new(cnf.num_props());
    for c in cnf.clauses() {
        let props: Vec<usize> = c.props().collect();
        g.add_clique(&props);
    }
    g
}
