use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::GraphView;

/// A total order of node ids. Position 0 holds the first variable; backward
/// passes start from the last position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ordering {
    sequence: Vec<usize>,
    #[serde(skip)]
    position: Vec<usize>,
}

impl Ordering {
    pub fn new(sequence: Vec<usize>) -> Result<Self> {
        let n = sequence.len();
        let mut position = vec![usize::MAX; n];
        for (pos, &v) in sequence.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(Error::ordering(format!("{sequence:?} is not a permutation of 0..{n}")));
            }
            position[v] = pos;
        }
        Ok(Ordering { sequence, position })
    }

    pub fn identity(n: usize) -> Self {
        Ordering::new((0..n).collect()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn position(&self, node: usize) -> usize {
        self.position[node]
    }

    pub fn at(&self, position: usize) -> usize {
        self.sequence[position]
    }

    pub fn reversed(&self) -> Ordering {
        Ordering::new(self.sequence.iter().rev().copied().collect()).unwrap()
    }

    /// True when every node in `nodes` precedes every node outside it.
    pub fn starts_with_set(&self, nodes: &[usize]) -> bool {
        nodes.iter().all(|&v| self.position[v] < nodes.len())
    }

    /// Space-separated ids, first position first.
    pub fn to_line(&self) -> String {
        self.sequence
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_line(text: &str) -> Result<Ordering> {
        let seq = text
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::ordering(format!("`{t}` is not a node id")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ordering::new(seq)
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthReport {
    /// Earlier neighbors of each node in the original graph.
    pub node_width: Vec<usize>,
    pub width: usize,
    /// Earlier neighbors of each node in the induced graph.
    pub induced_node_width: Vec<usize>,
    pub induced_width: usize,
    pub fill_edges: Vec<(usize, usize)>,
    pub induced_graph: GraphView,
}

impl fmt::Display for WidthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "w={} wstar={} fill={}",
            self.width,
            self.induced_width,
            self.fill_edges.len()
        )
    }
}

/// Processes nodes from last to first, connecting each node's earlier
/// neighbors.
pub fn induced_width(g: &GraphView, d: &Ordering) -> WidthReport {
    assert_eq!(g.len(), d.len(), "ordering must cover the graph");
    let n = g.len();
    let earlier = |graph: &GraphView, v: usize| -> Vec<usize> {
        graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| d.position(u) < d.position(v))
            .collect()
    };
    let node_width: Vec<usize> = (0..n).map(|v| earlier(g, v).len()).collect();
    let mut induced = g.clone();
    let mut induced_node_width = vec![0; n];
    let mut fill_edges = Vec::new();
    for pos in (0..n).rev() {
        let v = d.at(pos);
        let parents = earlier(&induced, v);
        induced_node_width[v] = parents.len();
        for (i, &a) in parents.iter().enumerate() {
            for &b in &parents[i + 1..] {
                if induced.add_edge(a, b) {
                    fill_edges.push((a.min(b), a.max(b)));
                }
            }
        }
    }
    WidthReport {
        width: node_width.iter().copied().max().unwrap_or(0),
        node_width,
        induced_width: induced_node_width.iter().copied().max().unwrap_or(0),
        induced_node_width,
        fill_edges,
        induced_graph: induced,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::moral_graph;
    use proptest::prelude::*;

    fn figure2_order(names: &str) -> Ordering {
        let net = fixtures::figure2_network(0);
        Ordering::new(names.split(',').map(|s| net.find(s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn figure_two_widths() {
        let g = moral_graph(&fixtures::figure2_network(0));
        let d = figure2_order("A,B,C,E,D,G");
        let r = induced_width(&g, &d);
        assert_eq!((r.width, r.induced_width), (2, 2));
        assert!(r.fill_edges.is_empty());
        assert_eq!(r.to_string(), "w=2 wstar=2 fill=0");
        let rev = induced_width(&g, &d.reversed());
        assert_eq!(rev.induced_width, 3);
    }

    #[test]
    fn chain_width_one() {
        let edges: Vec<(usize, usize)> = (0..9).map(|i| (i, i + 1)).collect();
        let g = GraphView::from_edges(10, &edges);
        assert_eq!(induced_width(&g, &Ordering::identity(10)).induced_width, 1);
    }

    #[test]
    fn ordering_rejects_non_permutations() {
        assert!(Ordering::new(vec![0, 0]).is_err());
        assert!(Ordering::new(vec![0, 2]).is_err());
        assert_eq!(Ordering::parse_line("2 0 1").unwrap().position(2), 0);
    }

    fn graph_and_order() -> impl Strategy<Value = (GraphView, Ordering, Vec<(usize, usize)>)> {
        (2usize..9).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let m = pairs.len();
            (
                proptest::sample::subsequence(pairs.clone(), 0..=m),
                proptest::sample::subsequence(pairs, 0..=m),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
                .prop_map(move |(edges, extra, seq)| {
                    (GraphView::from_edges(n, &edges), Ordering::new(seq).unwrap(), extra)
                })
        })
    }

    proptest! {
        #[test]
        fn induced_graph_is_chordal_along_order((g, d, _) in graph_and_order()) {
            let r = induced_width(&g, &d);
            prop_assert!(r.induced_width >= r.width);
            for v in 0..g.len() {
                let earlier: Vec<usize> = r.induced_graph.neighbors(v).iter().copied()
                    .filter(|&u| d.position(u) < d.position(v)).collect();
                prop_assert_eq!(earlier.len(), r.induced_node_width[v]);
                for (i, &a) in earlier.iter().enumerate() {
                    for &b in &earlier[i + 1..] {
                        prop_assert!(r.induced_graph.has_edge(a, b));
                    }
                }
            }
        }

        #[test]
        fn adding_edges_never_lowers_induced_width((g, d, extra) in graph_and_order()) {
            let mut h = g.clone();
            for (a, b) in extra {
                h.add_edge(a, b);
            }
            prop_assert!(induced_width(&h, &d).induced_width >= induced_width(&g, &d).induced_width);
        }

        #[test]
        fn deleting_nodes_never_raises_induced_width((g, d, extra) in graph_and_order()) {
            let removed: Vec<usize> = extra.iter().map(|e| e.0).take(2).collect();
            let full = induced_width(&g, &d).induced_width;
            prop_assert!(induced_width(&g.without(&removed), &d).induced_width <= full);
        }
    }
}
