//! Discrete-time SIR contagion over a graph.
//!
//! Each cascade starts at a uniformly chosen susceptible node at time 0. Every
//! step first recovers each infected node with probability `gamma_rec`, then
//! lets the still-infected nodes infect their susceptible neighbors with
//! probability `lambda`. Cascades run back to back over one shared state, so a
//! node infected by an earlier cascade keeps its earlier time and cannot be
//! infected again.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng;
use crate::sampling::NodeSample;

/// How infection pressure is resolved each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransmissionRule {
    /// One coin per distinct susceptible neighbor of the infected set,
    /// regardless of how many infected neighbors it has.
    #[default]
    PerNeighbor,
    /// One coin per infected-to-susceptible edge.
    PerEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirParams {
    pub lambda: f64,
    pub gamma_rec: f64,
    pub n_cascades: usize,
    pub t_end: u32,
    pub seed: u64,
    #[serde(default)]
    pub transmission: TransmissionRule,
}

impl SirParams {
    pub fn new(lambda: f64, gamma_rec: f64, n_cascades: usize, t_end: u32, seed: u64) -> Self {
        SirParams {
            lambda,
            gamma_rec,
            n_cascades,
            t_end,
            seed,
            transmission: TransmissionRule::PerNeighbor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("lambda", self.lambda), ("gamma_rec", self.gamma_rec)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "{name}={p} is not a probability"
                )));
            }
        }
        if self.n_cascades < 1 {
            return Err(Error::InvalidParameter(
                "n_cascades must be at least 1".into(),
            ));
        }
        if self.t_end < 1 {
            return Err(Error::InvalidParameter("t_end must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SirState {
    S,
    I,
    R,
}

/// Per-step compartment counts of one cascade; index 0 is the seeding step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeCurve {
    pub seed_node: NodeId,
    pub infected: Vec<u32>,
    pub recovered: Vec<u32>,
    /// New infections per step, including the seed at step 0.
    pub new_infections: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeTrace {
    pub params: SirParams,
    #[serde(skip)]
    pub first_infection_time: Vec<Option<u32>>,
    #[serde(skip)]
    pub final_state: Vec<SirState>,
    pub curves: Vec<CascadeCurve>,
}

impl CascadeTrace {
    pub fn node_count(&self) -> usize {
        self.first_infection_time.len()
    }

    pub fn ever_infected(&self) -> usize {
        self.first_infection_time.iter().flatten().count()
    }

    /// Writes `node,first_infection_time,final_state` rows (`-1` for never)
    /// after a `#`-prefixed JSON header with the parameters.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut text = format!("# {}\n", serde_json::to_string(&self.params)?);
        text.push_str("node,first_infection_time,final_state\n");
        for (v, (t, s)) in self
            .first_infection_time
            .iter()
            .zip(&self.final_state)
            .enumerate()
        {
            let t = t.map_or(-1, i64::from);
            text.push_str(&format!("{v},{t},{s:?}\n"));
        }
        out.write_all(text.as_bytes())
            .map_err(|e| Error::io("<trace>", e))
    }
}

/// Runs `params.n_cascades` cascades over one shared state.
pub fn simulate_sir(graph: &Graph, params: &SirParams) -> Result<CascadeTrace> {
    params.validate()?;
    let n = graph.node_count();
    let mut rng = rng::rng_from(params.seed);
    let mut state = vec![SirState::S; n];
    let mut time: Vec<Option<u32>> = vec![None; n];
    let mut susceptible = n;
    let mut infected: Vec<NodeId> = Vec::new();
    // Infected nodes that may still have susceptible neighbors. Susceptibles
    // only ever disappear, so a node found without any is dropped for good.
    let mut spreading: Vec<NodeId> = Vec::new();
    // Step at which a node was last queued as a candidate, for deduplication.
    let mut stamp: Vec<u64> = vec![u64::MAX; n];
    let mut stamp_clock: u64 = 0;
    let mut curves = Vec::with_capacity(params.n_cascades);

    for _ in 0..params.n_cascades {
        if susceptible == 0 {
            break;
        }
        let seed_node = nth_susceptible(&state, rng.random_range(0..susceptible));
        state[seed_node as usize] = SirState::I;
        time[seed_node as usize] = Some(0);
        susceptible -= 1;
        infected.push(seed_node);
        spreading.push(seed_node);

        let mut recovered_total = state.iter().filter(|&&s| s == SirState::R).count() as u32;
        let mut curve = CascadeCurve {
            seed_node,
            infected: vec![infected.len() as u32],
            recovered: vec![recovered_total],
            new_infections: vec![1],
        };

        let mut candidates: Vec<NodeId> = Vec::new();
        for step in 1..params.t_end {
            let before = infected.len();
            infected.retain(|&v| {
                if rng.random::<f64>() < params.gamma_rec {
                    state[v as usize] = SirState::R;
                    false
                } else {
                    true
                }
            });
            recovered_total += (before - infected.len()) as u32;
            spreading.retain(|&v| state[v as usize] == SirState::I);

            stamp_clock += 1;
            candidates.clear();
            let mut newly: Vec<NodeId> = Vec::new();
            match params.transmission {
                TransmissionRule::PerNeighbor => {
                    spreading.retain(|&u| {
                        let mut exposed = false;
                        for &w in graph.out_neighbors(u) {
                            let wi = w as usize;
                            if state[wi] == SirState::S {
                                exposed = true;
                                if stamp[wi] != stamp_clock {
                                    stamp[wi] = stamp_clock;
                                    candidates.push(w);
                                }
                            }
                        }
                        exposed
                    });
                    candidates.sort_unstable();
                    for &w in &candidates {
                        if rng.random::<f64>() < params.lambda {
                            newly.push(w);
                        }
                    }
                }
                TransmissionRule::PerEdge => {
                    spreading.retain(|&u| {
                        let mut exposed = false;
                        for &w in graph.out_neighbors(u) {
                            let wi = w as usize;
                            if state[wi] == SirState::S && stamp[wi] != stamp_clock {
                                exposed = true;
                                if rng.random::<f64>() < params.lambda {
                                    stamp[wi] = stamp_clock;
                                    newly.push(w);
                                }
                            }
                        }
                        exposed
                    });
                    newly.sort_unstable();
                }
            }
            for &w in &newly {
                state[w as usize] = SirState::I;
                time[w as usize] = Some(step);
            }
            susceptible -= newly.len();
            infected.extend_from_slice(&newly);
            spreading.extend_from_slice(&newly);

            curve.infected.push(infected.len() as u32);
            curve.recovered.push(recovered_total);
            curve.new_infections.push(newly.len() as u32);
            if infected.is_empty() {
                break;
            }
        }
        curves.push(curve);
    }

    Ok(CascadeTrace {
        params: *params,
        first_infection_time: time,
        final_state: state,
        curves,
    })
}

fn nth_susceptible(state: &[SirState], k: usize) -> NodeId {
    state
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == SirState::S)
        .nth(k)
        .map(|(i, _)| i as NodeId)
        .expect("k is below the susceptible count")
}

/// First-infection times of the sampled nodes that were ever infected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleInfections {
    pub times: Vec<u32>,
    pub infected_fraction: f64,
}

pub fn infection_times(trace: &CascadeTrace, sample: &NodeSample) -> SampleInfections {
    let times: Vec<u32> = sample
        .members
        .iter()
        .filter_map(|&v| {
            trace
                .first_infection_time
                .get(v as usize)
                .copied()
                .flatten()
        })
        .collect();
    let infected_fraction = if sample.is_empty() {
        0.0
    } else {
        times.len() as f64 / sample.len() as f64
    };
    SampleInfections {
        times,
        infected_fraction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Directedness};
    use crate::sampling::{SampleOrigin, SamplePolicy};

    fn path3() -> Graph {
        build_graph(&[(0, 1), (1, 2)], Directedness::Undirected)
            .unwrap()
            .0
    }

    fn sample_of(members: Vec<NodeId>) -> NodeSample {
        let n = members.len();
        NodeSample {
            members,
            origin: SampleOrigin::Control,
            policy: SamplePolicy::Uniform,
            direction: None,
            gamma: 0.0,
            seed: 0,
            requested_size: n,
            achieved_size: n,
            isolated_skipped: 0,
            duplicates_removed: 0,
        }
    }

    #[test]
    fn zero_lambda_infects_only_seeds() {
        let g = path3();
        let trace = simulate_sir(&g, &SirParams::new(0.0, 0.5, 2, 50, 4)).unwrap();
        assert_eq!(trace.ever_infected(), 2);
        let seeds: Vec<_> = trace.curves.iter().map(|c| c.seed_node).collect();
        for s in seeds {
            assert_eq!(trace.first_infection_time[s as usize], Some(0));
        }
    }

    #[test]
    fn deterministic_spread_on_a_path() {
        let g = path3();
        // Find a seed that starts at node 0.
        let params = (0..64)
            .map(|s| SirParams::new(1.0, 0.0, 1, 10, s))
            .find(|p| simulate_sir(&g, p).unwrap().curves[0].seed_node == 0)
            .unwrap();
        let trace = simulate_sir(&g, &params).unwrap();
        assert_eq!(trace.first_infection_time, vec![Some(0), Some(1), Some(2)]);
        let times = infection_times(&trace, &sample_of(vec![2]));
        assert_eq!(times.times, vec![2]);
        assert_eq!(times.infected_fraction, 1.0);
        let seed_only = infection_times(&trace, &sample_of(vec![0]));
        assert_eq!(seed_only.times, vec![0]);
    }

    #[test]
    fn uninfected_sample_is_empty() {
        let (g, _) = Graph::from_edges(4, [(0, 1)], Directedness::Undirected).unwrap();
        let params = (0..64)
            .map(|s| SirParams::new(1.0, 0.0, 1, 10, s))
            .find(|p| simulate_sir(&g, p).unwrap().curves[0].seed_node == 0)
            .unwrap();
        let trace = simulate_sir(&g, &params).unwrap();
        let r = infection_times(&trace, &sample_of(vec![2, 3]));
        assert!(r.times.is_empty());
        assert_eq!(r.infected_fraction, 0.0);
    }

    #[test]
    fn recovery_ends_the_cascade() {
        let g = path3();
        let trace = simulate_sir(&g, &SirParams::new(0.0, 1.0, 1, 100, 1)).unwrap();
        let curve = &trace.curves[0];
        assert_eq!(curve.infected, vec![1, 0]);
        assert_eq!(curve.recovered, vec![0, 1]);
        assert_eq!(
            trace
                .final_state
                .iter()
                .filter(|&&s| s == SirState::R)
                .count(),
            1
        );
    }

    #[test]
    fn directed_edges_transmit_forward_only() {
        let (g, _) = Graph::from_edges(2, [(1, 0)], Directedness::Directed).unwrap();
        for seed in 0..16 {
            let trace = simulate_sir(&g, &SirParams::new(1.0, 0.0, 1, 10, seed)).unwrap();
            if trace.curves[0].seed_node == 0 {
                assert_eq!(trace.first_infection_time[1], None);
            } else {
                assert_eq!(trace.first_infection_time[0], Some(1));
            }
        }
    }

    #[test]
    fn params_are_validated() {
        let g = path3();
        assert!(simulate_sir(&g, &SirParams::new(1.5, 0.0, 1, 10, 0)).is_err());
        assert!(simulate_sir(&g, &SirParams::new(0.5, 0.0, 0, 10, 0)).is_err());
        assert!(simulate_sir(&g, &SirParams::new(0.5, 0.0, 1, 0, 0)).is_err());
    }

    #[test]
    fn trace_csv_marks_never_as_minus_one() {
        let g = path3();
        let trace = simulate_sir(&g, &SirParams::new(0.0, 0.0, 1, 3, 0)).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap() == "node,first_infection_time,final_state");
        assert_eq!(text.matches(",-1,S").count(), 2);
    }
}
