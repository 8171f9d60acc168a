use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{induced_width, GraphView, Ordering};

/// How the unconstrained part of an ordering is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderingKind {
    MinDegree,
    MinFill,
    /// An explicit sequence, first position first.
    Given(Vec<usize>),
}

struct Eliminator {
    graph: GraphView,
    alive: BTreeSet<usize>,
}

impl Eliminator {
    fn new(g: &GraphView) -> Self {
        Eliminator {
            graph: g.clone(),
            alive: (0..g.len()).collect(),
        }
    }

    fn live_neighbors(&self, v: usize) -> Vec<usize> {
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|u| self.alive.contains(u))
            .collect()
    }

    fn fill_in(&self, v: usize) -> usize {
        let ns = self.live_neighbors(v);
        let mut missing = 0;
        for (i, &a) in ns.iter().enumerate() {
            missing += ns[i + 1..].iter().filter(|&&b| !self.graph.has_edge(a, b)).count();
        }
        missing
    }

    fn eliminate(&mut self, v: usize) {
        let ns = self.live_neighbors(v);
        self.graph.add_clique(&ns);
        self.alive.remove(&v);
    }

    /// Lowest-scoring candidate, ties to the lowest id.
    fn pick(&self, candidates: &BTreeSet<usize>, kind: &OrderingKind) -> usize {
        let score = |v: usize| match kind {
            OrderingKind::MinFill => self.fill_in(v),
            _ => self.live_neighbors(v).len(),
        };
        *candidates
            .iter()
            .min_by_key(|&&v| (score(v), v))
            .expect("no candidates left")
    }
}

fn check_nodes(g: &GraphView, nodes: &[usize], what: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &v in nodes {
        if v >= g.len() {
            return Err(Error::ordering(format!("{what} node {v} is not in the graph")));
        }
        if !seen.insert(v) {
            return Err(Error::ordering(format!("{what} node {v} listed twice")));
        }
    }
    Ok(())
}

/// Builds an ordering from the last position to the first by greedy
/// elimination, or validates an explicit one.
pub fn order_heuristic(g: &GraphView, kind: &OrderingKind) -> Result<Ordering> {
    constrained_order(g, &[], &[], kind)
}

/// Orders `prefix` first and `suffix` last, each in the given order, and
/// fills the middle with `kind`. Suffix nodes are eliminated first.
pub fn constrained_order(g: &GraphView, prefix: &[usize], suffix: &[usize], kind: &OrderingKind) -> Result<Ordering> {
    check_nodes(g, prefix, "prefix")?;
    check_nodes(g, suffix, "suffix")?;
    if let Some(v) = prefix.iter().find(|v| suffix.contains(v)) {
        return Err(Error::ordering(format!("node {v} is in both prefix and suffix")));
    }
    if let OrderingKind::Given(seq) = kind {
        let given = Ordering::new(seq.clone())?;
        if given.len() != g.len() {
            return Err(Error::ordering(format!(
                "ordering covers {} nodes, graph has {}",
                given.len(),
                g.len()
            )));
        }
        let middle = seq.iter().filter(|v| !prefix.contains(v) && !suffix.contains(v));
        let sequence = prefix.iter().chain(middle).chain(suffix).copied().collect();
        return Ordering::new(sequence);
    }
    let mut elim = Eliminator::new(g);
    for &v in suffix.iter().rev() {
        elim.eliminate(v);
    }
    let mut free: BTreeSet<usize> = (0..g.len())
        .filter(|v| !prefix.contains(v) && !suffix.contains(v))
        .collect();
    let mut picked = Vec::with_capacity(free.len());
    while !free.is_empty() {
        let v = elim.pick(&free, kind);
        elim.eliminate(v);
        free.remove(&v);
        picked.push(v);
    }
    let sequence = prefix
        .iter()
        .copied()
        .chain(picked.into_iter().rev())
        .chain(suffix.iter().copied())
        .collect();
    Ordering::new(sequence)
}

/// Induced width along `d` after deleting the nodes in `cutset`.
pub fn conditional_induced_width(g: &GraphView, cutset: &[usize], d: &Ordering) -> usize {
    induced_width(&g.without(cutset), d).induced_width
}

/// Greedy conditioning set: repeatedly removes the highest-degree node (ties
/// to the lowest id) until the min-fill ordering of the remaining graph has
/// induced width at most `w_target`. Returned ids are ascending.
pub fn cutset_heuristic(g: &GraphView, w_target: usize) -> Vec<usize> {
    let mut cutset: Vec<usize> = Vec::new();
    loop {
        let rest = g.without(&cutset);
        let d = order_heuristic(&rest, &OrderingKind::MinFill).expect("heuristic ordering");
        if induced_width(&rest, &d).induced_width <= w_target {
            break;
        }
        let v = (0..g.len())
            .filter(|v| !cutset.contains(v))
            .max_by_key(|&v| (rest.degree(v), std::cmp::Reverse(v)))
            .expect("width above target implies a node remains");
        cutset.push(v);
    }
    cutset.sort_unstable();
    cutset
}
