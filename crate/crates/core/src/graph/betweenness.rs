//! Exact shortest-path betweenness (Brandes accumulation).

use std::collections::VecDeque;

use rayon::prelude::*;

use super::{Graph, NodeId};
use crate::error::{Error, Result};

pub const DEFAULT_BETWEENNESS_CAP: usize = 200_000;

// Sources are processed in fixed-size chunks whose partial sums are added in
// chunk order, so the floating-point result is independent of thread count.
const SOURCE_CHUNK: usize = 64;

/// Unnormalized betweenness with the default node cap.
pub fn betweenness(graph: &Graph) -> Result<Vec<f64>> {
    betweenness_with_cap(graph, DEFAULT_BETWEENNESS_CAP)
}

/// Unnormalized betweenness of every node. Directed graphs use directed
/// shortest paths; undirected graphs count each unordered pair once.
pub fn betweenness_with_cap(graph: &Graph, cap: usize) -> Result<Vec<f64>> {
    let n = graph.node_count();
    if n > cap {
        return Err(Error::GraphTooLarge { node_count: n, cap });
    }
    let sources: Vec<NodeId> = graph.nodes().collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut scratch = Scratch::new(n);
            let mut acc = vec![0.0; n];
            for &s in chunk {
                scratch.accumulate(graph, s, &mut acc);
            }
            acc
        })
        .collect();

    let mut scores = vec![0.0; n];
    for partial in partials {
        for (total, x) in scores.iter_mut().zip(partial) {
            *total += x;
        }
    }
    if !graph.is_directed() {
        for s in &mut scores {
            *s /= 2.0;
        }
    }
    Ok(scores)
}

struct Scratch {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    preds: Vec<Vec<NodeId>>,
    order: Vec<NodeId>,
    queue: VecDeque<NodeId>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn accumulate(&mut self, graph: &Graph, source: NodeId, acc: &mut [f64]) {
        for &v in &self.order {
            let v = v as usize;
            self.dist[v] = -1;
            self.sigma[v] = 0.0;
            self.delta[v] = 0.0;
            self.preds[v].clear();
        }
        self.order.clear();

        let s = source as usize;
        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(source);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            let dv = self.dist[v as usize];
            for &w in graph.out_neighbors(v) {
                let wi = w as usize;
                if self.dist[wi] < 0 {
                    self.dist[wi] = dv + 1;
                    self.queue.push_back(w);
                }
                if self.dist[wi] == dv + 1 {
                    self.sigma[wi] += self.sigma[v as usize];
                    self.preds[wi].push(v);
                }
            }
        }

        for &w in self.order.iter().rev() {
            let wi = w as usize;
            let coeff = (1.0 + self.delta[wi]) / self.sigma[wi];
            for &v in &self.preds[wi] {
                self.delta[v as usize] += self.sigma[v as usize] * coeff;
            }
            if w != source {
                acc[wi] += self.delta[wi];
            }
        }
    }
}
