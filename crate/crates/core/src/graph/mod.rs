//! Immutable adjacency structure over dense node ids, plus generators and
//! structural queries.

mod betweenness;
mod components;
mod degree;
mod generate;
pub mod io;

pub use betweenness::{betweenness, betweenness_with_cap, DEFAULT_BETWEENNESS_CAP};
pub use components::{component_labels, connected_components, ComponentReport};
pub use degree::{degree_histogram, DegreeDistribution};
pub use generate::{generate_ba, generate_er};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Largest usable dense id; `u32::MAX` itself is reserved.
pub const MAX_NODE_ID: u64 = u32::MAX as u64 - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Directedness {
    Directed,
    Undirected,
}

/// Which degree to read off a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeKind {
    In,
    Out,
    Total,
}

/// Which neighbor list to follow from a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborDirection {
    /// Followees in a follow graph.
    #[default]
    Out,
    /// Followers in a follow graph.
    In,
}

/// Counts of input edges discarded while building a [`Graph`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Compressed adjacency for a simple graph. Neighbor lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    directedness: Directedness,
    edge_count: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    // Empty for undirected graphs, where in- and out-neighbors coincide.
    in_offsets: Vec<usize>,
    in_targets: Vec<NodeId>,
}

impl Graph {
    /// Builds a graph on `node_count` nodes. Self-loops are dropped and
    /// duplicate edges collapsed; both are counted in the returned report.
    pub fn from_edges<I>(
        node_count: usize,
        edges: I,
        directedness: Directedness,
    ) -> Result<(Graph, BuildReport)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if node_count as u64 > MAX_NODE_ID + 1 {
            return Err(Error::IdOverflow(node_count as u64 - 1));
        }
        let mut report = BuildReport::default();
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for id in [u, v] {
                if id as usize >= node_count {
                    return Err(Error::NodeOutOfRange {
                        node: u64::from(id),
                        node_count,
                    });
                }
            }
            if u == v {
                report.self_loops_dropped += 1;
                continue;
            }
            pairs.push(match directedness {
                Directedness::Undirected if u > v => (v, u),
                _ => (u, v),
            });
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        report.duplicates_dropped = before - pairs.len();
        let edge_count = pairs.len();

        let graph = match directedness {
            Directedness::Directed => {
                let (out_offsets, out_targets) = csr(node_count, pairs.iter().copied());
                let (in_offsets, in_targets) = csr(node_count, pairs.iter().map(|&(u, v)| (v, u)));
                Graph {
                    directedness,
                    edge_count,
                    out_offsets,
                    out_targets,
                    in_offsets,
                    in_targets,
                }
            }
            Directedness::Undirected => {
                let both = pairs.iter().flat_map(|&(u, v)| [(u, v), (v, u)]);
                let (out_offsets, out_targets) = csr(node_count, both);
                Graph {
                    directedness,
                    edge_count,
                    out_offsets,
                    out_targets,
                    in_offsets: Vec::new(),
                    in_targets: Vec::new(),
                }
            }
        };
        Ok((graph, report))
    }

    pub fn node_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    /// Number of distinct edges; an undirected edge counts once.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    pub fn is_directed(&self) -> bool {
        self.directedness == Directedness::Directed
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.node_count() as NodeId
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        if !self.is_directed() {
            return self.out_neighbors(v);
        }
        let v = v as usize;
        &self.in_targets[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn neighbors(&self, v: NodeId, direction: NeighborDirection) -> &[NodeId] {
        match direction {
            NeighborDirection::Out => self.out_neighbors(v),
            NeighborDirection::In => self.in_neighbors(v),
        }
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_neighbors(v).len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_neighbors(v).len()
    }

    /// For undirected graphs every kind returns the plain degree.
    pub fn degree(&self, v: NodeId, kind: DegreeKind) -> usize {
        match (self.directedness, kind) {
            (Directedness::Undirected, _) | (_, DegreeKind::Out) => self.out_degree(v),
            (_, DegreeKind::In) => self.in_degree(v),
            (_, DegreeKind::Total) => self.out_degree(v) + self.in_degree(v),
        }
    }

    /// Each edge once, in ascending `(src, dst)` order; undirected edges come
    /// out with `src < dst`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        let undirected = !self.is_directed();
        self.nodes().flat_map(move |u| {
            self.out_neighbors(u)
                .iter()
                .filter(move |&&v| !undirected || u < v)
                .map(move |&v| (u, v))
        })
    }

    /// Subgraph induced on `members` (deduplicated, sorted). Returns the graph
    /// over local ids `0..k` and the local-to-original id map.
    pub fn induced_subgraph(&self, members: &[NodeId]) -> Result<(Graph, Vec<NodeId>)> {
        let mut original: Vec<NodeId> = members.to_vec();
        original.sort_unstable();
        original.dedup();
        if let Some(&bad) = original.iter().find(|&&v| v as usize >= self.node_count()) {
            return Err(Error::NodeOutOfRange {
                node: u64::from(bad),
                node_count: self.node_count(),
            });
        }
        let local = |v: NodeId| original.binary_search(&v).ok().map(|i| i as NodeId);
        let mut edges = Vec::new();
        for (i, &u) in original.iter().enumerate() {
            for &v in self.out_neighbors(u) {
                if let Some(j) = local(v) {
                    edges.push((i as NodeId, j));
                }
            }
        }
        let (graph, _) = Graph::from_edges(original.len(), edges, self.directedness)?;
        Ok((graph, original))
    }
}

fn csr<I>(node_count: usize, sorted_pairs: I) -> (Vec<usize>, Vec<NodeId>)
where
    I: Iterator<Item = (NodeId, NodeId)> + Clone,
{
    let mut offsets = vec![0usize; node_count + 1];
    for (u, _) in sorted_pairs.clone() {
        offsets[u as usize + 1] += 1;
    }
    for i in 0..node_count {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut targets = vec![0 as NodeId; offsets[node_count]];
    for (u, v) in sorted_pairs {
        targets[cursor[u as usize]] = v;
        cursor[u as usize] += 1;
    }
    for u in 0..node_count {
        targets[offsets[u]..offsets[u + 1]].sort_unstable();
    }
    (offsets, targets)
}

/// Builds a graph from raw integer edges. Node count is one past the largest
/// id seen.
pub fn build_graph(
    edges: &[(u64, u64)],
    directedness: Directedness,
) -> Result<(Graph, BuildReport)> {
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let max_id = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0);
    if max_id > MAX_NODE_ID {
        return Err(Error::IdOverflow(max_id));
    }
    Graph::from_edges(
        max_id as usize + 1,
        edges.iter().map(|&(u, v)| (u as NodeId, v as NodeId)),
        directedness,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_collapse() {
        let (g, report) = build_graph(&[(0, 1), (1, 2), (0, 1)], Directedness::Undirected).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(report.duplicates_dropped, 1);
        assert_eq!(report.self_loops_dropped, 0);
    }

    #[test]
    fn reversed_undirected_pair_is_a_duplicate() {
        let (g, report) = build_graph(&[(0, 1), (1, 0)], Directedness::Undirected).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(report.duplicates_dropped, 1);
        let (g, report) = build_graph(&[(0, 1), (1, 0)], Directedness::Directed).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(report.duplicates_dropped, 0);
    }

    #[test]
    fn self_loop_dropped() {
        let (g, report) = build_graph(&[(0, 0), (0, 1)], Directedness::Directed).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(report.self_loops_dropped, 1);
    }

    #[test]
    fn star_degrees() {
        let (g, _) = build_graph(&[(0, 1), (0, 2), (0, 3)], Directedness::Undirected).unwrap();
        let degrees: Vec<usize> = g.nodes().map(|v| g.degree(v, DegreeKind::Total)).collect();
        assert_eq!(degrees, vec![3, 1, 1, 1]);
    }

    #[test]
    fn empty_and_overflow_errors() {
        assert!(matches!(
            build_graph(&[], Directedness::Directed),
            Err(Error::EmptyGraph)
        ));
        assert!(matches!(
            build_graph(&[(0, u64::from(u32::MAX))], Directedness::Directed),
            Err(Error::IdOverflow(_))
        ));
    }

    #[test]
    fn directed_in_and_out_lists() {
        let (g, _) = build_graph(&[(0, 1), (2, 1), (1, 3)], Directedness::Directed).unwrap();
        assert_eq!(g.out_neighbors(1), &[3]);
        assert_eq!(g.in_neighbors(1), &[0, 2]);
        assert_eq!(g.degree(1, DegreeKind::Total), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 3), (2, 1)]);
    }

    #[test]
    fn induced_subgraph_keeps_internal_edges() {
        let (g, _) =
            build_graph(&[(0, 1), (1, 2), (2, 3), (3, 0)], Directedness::Directed).unwrap();
        let (sub, map) = g.induced_subgraph(&[2, 1, 3]).unwrap();
        assert_eq!(map, vec![1, 2, 3]);
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }
}
