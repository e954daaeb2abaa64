use rand::Rng;

use super::{Directedness, Graph, NodeId};
use crate::error::{Error, Result};
use crate::rng;

/// Undirected Barabási–Albert preferential-attachment graph.
///
/// Nodes `0..m` start isolated; node `m` links to all of them. Every later
/// node draws `m` distinct targets with probability proportional to their
/// current degree. Node `t` draws from its own substream of `seed`, so the
/// edge set depends only on `(n, m, seed)`. The result has `m * (n - m)` edges.
pub fn generate_ba(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 || n <= m {
        return Err(Error::InvalidGenerator(format!(
            "preferential attachment needs n > m >= 1 (got n={n}, m={m})"
        )));
    }
    if n as u64 > super::MAX_NODE_ID + 1 {
        return Err(Error::IdOverflow(n as u64 - 1));
    }
    let edge_total = m * (n - m);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(edge_total);
    // Every edge contributes both endpoints, so a uniform pick from this list
    // is a degree-proportional pick over nodes.
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * edge_total);

    for target in 0..m as NodeId {
        edges.push((m as NodeId, target));
        endpoints.extend([m as NodeId, target]);
    }

    let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
    for new in (m + 1)..n {
        let mut rng = rng::substream(seed, &[new as u64]);
        chosen.clear();
        while chosen.len() < m {
            let candidate = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&candidate) {
                chosen.push(candidate);
            }
        }
        for &target in &chosen {
            edges.push((new as NodeId, target));
            endpoints.extend([new as NodeId, target]);
        }
    }

    let (graph, report) = Graph::from_edges(n, edges, Directedness::Undirected)?;
    debug_assert_eq!(report.duplicates_dropped + report.self_loops_dropped, 0);
    Ok(graph)
}

/// Erdős–Rényi `G(n, p)`, sampled with geometric edge skipping.
pub fn generate_er(n: usize, p: f64, directedness: Directedness, seed: u64) -> Result<Graph> {
    if n == 0 || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidGenerator(format!(
            "G(n, p) needs n >= 1 and p in [0, 1] (got n={n}, p={p})"
        )));
    }
    let mut rng = rng::rng_from(seed);
    let mut edges = Vec::new();
    let slots: u64 = match directedness {
        Directedness::Undirected => (n as u64) * (n as u64 - 1) / 2,
        Directedness::Directed => (n as u64) * (n as u64 - 1),
    };
    if p > 0.0 {
        let log_q = (1.0 - p).ln();
        let mut slot: i64 = -1;
        loop {
            let skip = if p >= 1.0 {
                0
            } else {
                let r: f64 = 1.0 - rng.random::<f64>();
                (r.ln() / log_q).floor() as i64
            };
            slot += 1 + skip;
            if slot as u64 >= slots {
                break;
            }
            edges.push(slot_to_pair(slot as u64, n as u64, directedness));
        }
    }
    Ok(Graph::from_edges(n, edges, directedness)?.0)
}

fn slot_to_pair(slot: u64, n: u64, directedness: Directedness) -> (NodeId, NodeId) {
    match directedness {
        Directedness::Directed => {
            let u = slot / (n - 1);
            let mut v = slot % (n - 1);
            if v >= u {
                v += 1;
            }
            (u as NodeId, v as NodeId)
        }
        Directedness::Undirected => {
            // Row-major over the strict upper triangle.
            let mut u = 0u64;
            let mut remaining = slot;
            loop {
                let row = n - 1 - u;
                if remaining < row {
                    return (u as NodeId, (u + 1 + remaining) as NodeId);
                }
                remaining -= row;
                u += 1;
            }
        }
    }
}
