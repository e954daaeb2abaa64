use serde::{Deserialize, Serialize};

use super::Graph;

/// Weakly connected components, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub component_count: usize,
    pub component_sizes: Vec<usize>,
    pub giant_fraction: f64,
}

fn find(parent: &mut [u32], mut v: u32) -> u32 {
    while parent[v as usize] != v {
        let up = parent[parent[v as usize] as usize];
        parent[v as usize] = up;
        v = up;
    }
    v
}

/// Component label per node; labels are the smallest node id in each
/// component. Edge direction is ignored.
pub fn component_labels(graph: &Graph) -> Vec<u32> {
    let n = graph.node_count();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for (u, v) in graph.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            // Root at the smaller id.
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi as usize] = lo;
        }
    }
    (0..n as u32).map(|v| find(&mut parent, v)).collect()
}

pub fn connected_components(graph: &Graph) -> ComponentReport {
    let labels = component_labels(graph);
    let mut sizes = vec![0usize; graph.node_count()];
    for &l in &labels {
        sizes[l as usize] += 1;
    }
    let mut component_sizes: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let giant_fraction = component_sizes[0] as f64 / graph.node_count() as f64;
    ComponentReport {
        component_count: component_sizes.len(),
        component_sizes,
        giant_fraction,
    }
}
