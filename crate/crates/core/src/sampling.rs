//! Control and friend-sensor node samples.

use std::io::{BufRead, Write};

use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NeighborDirection, NodeId};
use crate::rng::{self, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleOrigin {
    Control,
    Sensor,
}

/// How sensors are drawn from the control group's neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SensorPolicy {
    /// One uniformly chosen neighbor per control node, deduplicated.
    #[default]
    PerNodeFriend,
    /// A uniform draw without replacement from the union of all control
    /// nodes' neighbors.
    PooledNeighbors,
    /// The control group itself (degenerate baseline).
    SameAsControl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplePolicy {
    Uniform,
    Sensor(SensorPolicy),
    /// Derived from another sample, e.g. by removing overlap.
    Derived,
}

/// A deduplicated, ascending set of sampled nodes plus its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSample {
    #[serde(skip)]
    pub members: Vec<NodeId>,
    pub origin: SampleOrigin,
    pub policy: SamplePolicy,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub direction: Option<NeighborDirection>,
    /// Achieved size over the graph's node count.
    pub gamma: f64,
    pub seed: u64,
    pub requested_size: usize,
    pub achieved_size: usize,
    /// Control nodes without a neighbor in the sampling direction.
    #[serde(default)]
    pub isolated_skipped: usize,
    /// Picks that landed on an already chosen sensor.
    #[serde(default)]
    pub duplicates_removed: usize,
}

impl NodeSample {
    /// Members are sorted and deduplicated.
    pub fn new(
        mut members: Vec<NodeId>,
        origin: SampleOrigin,
        policy: SamplePolicy,
        node_count: usize,
        seed: u64,
        requested_size: usize,
    ) -> Self {
        members.sort_unstable();
        members.dedup();
        let achieved_size = members.len();
        NodeSample {
            members,
            origin,
            policy,
            direction: None,
            gamma: achieved_size as f64 / node_count as f64,
            seed,
            requested_size,
            achieved_size,
            isolated_skipped: 0,
            duplicates_removed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// A `#`-prefixed JSON header line followed by one node id per line.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let header = serde_json::to_string(self)?;
        let mut body = format!("# {header}\n");
        for v in &self.members {
            body.push_str(&v.to_string());
            body.push('\n');
        }
        out.write_all(body.as_bytes())
            .map_err(|e| Error::io("<sample>", e))
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut header: Option<NodeSample> = None;
        let mut members = Vec::new();
        for line in input.lines() {
            let line = line.map_err(|e| Error::io("<sample>", e))?;
            if let Some(json) = line.strip_prefix('#') {
                header = Some(serde_json::from_str(json.trim())?);
            } else if !line.trim().is_empty() {
                members.push(line.trim().parse::<NodeId>().map_err(|_| {
                    Error::Config(format!("sample line `{line}` is not a node id"))
                })?);
            }
        }
        let mut sample = header.ok_or_else(|| Error::Config("sample has no header".into()))?;
        members.sort_unstable();
        members.dedup();
        sample.members = members;
        Ok(sample)
    }
}

/// Uniform sample of `size` distinct nodes.
pub fn sample_control(graph: &Graph, size: usize, seed: u64) -> Result<NodeSample> {
    let mut rng = rng::rng_from(seed);
    sample_control_with(graph, size, seed, &mut rng)
}

pub(crate) fn sample_control_with(
    graph: &Graph,
    size: usize,
    seed: u64,
    rng: &mut SimRng,
) -> Result<NodeSample> {
    let n = graph.node_count();
    if size == 0 {
        return Err(Error::InvalidParameter(
            "sample size must be at least 1".into(),
        ));
    }
    if size > n {
        return Err(Error::SampleTooLarge {
            requested: size,
            available: n,
        });
    }
    let mut members: Vec<NodeId> = index::sample(rng, n, size)
        .into_iter()
        .map(|i| i as NodeId)
        .collect();
    members.sort_unstable();
    Ok(NodeSample::new(
        members,
        SampleOrigin::Control,
        SamplePolicy::Uniform,
        n,
        seed,
        size,
    ))
}

/// One uniformly chosen neighbor per control node, in control order, with
/// duplicates kept. Isolated control nodes are skipped and counted.
pub fn friend_picks(
    graph: &Graph,
    control: &[NodeId],
    direction: NeighborDirection,
    rng: &mut SimRng,
) -> (Vec<NodeId>, usize) {
    let mut isolated = 0;
    let mut picks = Vec::with_capacity(control.len());
    for &c in control {
        match graph.neighbors(c, direction).choose(rng) {
            Some(&friend) => picks.push(friend),
            None => isolated += 1,
        }
    }
    (picks, isolated)
}

/// Sorted union of the control nodes' neighbors.
pub fn neighbor_pool(
    graph: &Graph,
    control: &[NodeId],
    direction: NeighborDirection,
) -> Vec<NodeId> {
    let mut pool: Vec<NodeId> = control
        .iter()
        .flat_map(|&c| graph.neighbors(c, direction).iter().copied())
        .collect();
    pool.sort_unstable();
    pool.dedup();
    pool
}

/// Draws a sensor group from the neighbors of `control`.
///
/// `PerNodeFriend` visits control nodes in a seeded random order, picks one
/// neighbor of each and stops once `target_size` distinct sensors are held, so
/// the achieved size can fall short when picks collide or nodes are isolated.
/// `PooledNeighbors` draws exactly `target_size` nodes from the neighbor
/// union.
pub fn sample_sensors(
    graph: &Graph,
    control: &NodeSample,
    policy: SensorPolicy,
    direction: NeighborDirection,
    target_size: usize,
    seed: u64,
) -> Result<NodeSample> {
    let mut rng = rng::rng_from(seed);
    sample_sensors_with(
        graph,
        control,
        policy,
        direction,
        target_size,
        seed,
        &mut rng,
    )
}

pub(crate) fn sample_sensors_with(
    graph: &Graph,
    control: &NodeSample,
    policy: SensorPolicy,
    direction: NeighborDirection,
    target_size: usize,
    seed: u64,
    rng: &mut SimRng,
) -> Result<NodeSample> {
    if control.is_empty() {
        return Err(Error::InvalidParameter("control sample is empty".into()));
    }
    if target_size == 0 {
        return Err(Error::InvalidParameter(
            "sensor target size must be at least 1".into(),
        ));
    }
    let n = graph.node_count();
    let mut sample = match policy {
        SensorPolicy::SameAsControl => {
            let mut s = control.clone();
            s.origin = SampleOrigin::Sensor;
            s.policy = SamplePolicy::Sensor(policy);
            s.requested_size = target_size;
            s.seed = seed;
            s
        }
        SensorPolicy::PerNodeFriend => {
            let mut order = control.members.clone();
            order.shuffle(rng);
            let mut chosen: Vec<NodeId> = Vec::with_capacity(target_size.min(order.len()));
            let mut seen = std::collections::HashSet::new();
            let (mut isolated, mut duplicates) = (0, 0);
            for &c in &order {
                if chosen.len() == target_size {
                    break;
                }
                let neighbors = graph.neighbors(c, direction);
                if neighbors.is_empty() {
                    isolated += 1;
                    continue;
                }
                let friend = neighbors[rng.random_range(0..neighbors.len())];
                if seen.insert(friend) {
                    chosen.push(friend);
                } else {
                    duplicates += 1;
                }
            }
            if chosen.is_empty() {
                return Err(Error::AllIsolated);
            }
            chosen.sort_unstable();
            let mut s = NodeSample::new(
                chosen,
                SampleOrigin::Sensor,
                SamplePolicy::Sensor(policy),
                n,
                seed,
                target_size,
            );
            s.isolated_skipped = isolated;
            s.duplicates_removed = duplicates;
            s
        }
        SensorPolicy::PooledNeighbors => {
            let pool = neighbor_pool(graph, &control.members, direction);
            if pool.is_empty() {
                return Err(Error::AllIsolated);
            }
            if pool.len() < target_size {
                return Err(Error::PoolTooSmall {
                    pool: pool.len(),
                    requested: target_size,
                });
            }
            let mut chosen: Vec<NodeId> = index::sample(rng, pool.len(), target_size)
                .into_iter()
                .map(|i| pool[i])
                .collect();
            chosen.sort_unstable();
            let mut s = NodeSample::new(
                chosen,
                SampleOrigin::Sensor,
                SamplePolicy::Sensor(policy),
                n,
                seed,
                target_size,
            );
            s.isolated_skipped = control
                .members
                .iter()
                .filter(|&&c| graph.neighbors(c, direction).is_empty())
                .count();
            s
        }
    };
    sample.direction = Some(direction);
    Ok(sample)
}

/// `control` with every member of `sensor` removed.
pub fn remove_overlap(control: &NodeSample, sensor: &NodeSample) -> NodeSample {
    let members: Vec<NodeId> = control
        .members
        .iter()
        .copied()
        .filter(|&v| !sensor.contains(v))
        .collect();
    let mut out = control.clone();
    out.achieved_size = members.len();
    out.gamma = if control.achieved_size == 0 {
        0.0
    } else {
        control.gamma * members.len() as f64 / control.achieved_size as f64
    };
    out.members = members;
    out.policy = SamplePolicy::Derived;
    out
}
