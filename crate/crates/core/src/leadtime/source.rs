use std::borrow::Cow;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cascade::CascadeTrace;
use crate::error::{Error, Result};
use crate::events::{hashtag_network, tag_timeline, EventStream, TagTimeline, SECONDS_PER_DAY};
use crate::graph::{Graph, NodeId};

/// First-adoption time per node, in analysis units (steps or days).
#[derive(Debug, Clone, PartialEq)]
pub enum AdoptionTimes {
    Dense(Vec<Option<f64>>),
    Sparse(HashMap<NodeId, f64>),
}

impl AdoptionTimes {
    pub fn from_trace(trace: &CascadeTrace) -> Self {
        AdoptionTimes::Dense(
            trace
                .first_infection_time
                .iter()
                .map(|t| t.map(f64::from))
                .collect(),
        )
    }

    /// Times measured from `origin` in units of `unit_seconds`.
    pub fn from_timeline(timeline: &TagTimeline, origin: i64, unit_seconds: i64) -> Self {
        AdoptionTimes::Sparse(
            timeline
                .first_use
                .iter()
                .map(|&(u, t)| (u, (t - origin) as f64 / unit_seconds as f64))
                .collect(),
        )
    }

    pub fn get(&self, node: NodeId) -> Option<f64> {
        match self {
            AdoptionTimes::Dense(v) => v.get(node as usize).copied().flatten(),
            AdoptionTimes::Sparse(m) => m.get(&node).copied(),
        }
    }

    pub fn adopters(&self) -> usize {
        match self {
            AdoptionTimes::Dense(v) => v.iter().filter(|t| t.is_some()).count(),
            AdoptionTimes::Sparse(m) => m.len(),
        }
    }

    /// Sorted adopter ids.
    pub fn adopter_ids(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = match self {
            AdoptionTimes::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, t)| t.is_some())
                .map(|(i, _)| i as NodeId)
                .collect(),
            AdoptionTimes::Sparse(m) => m.keys().copied().collect(),
        };
        ids.sort_unstable();
        ids
    }
}

type NodeMap = Box<dyn Fn(NodeId) -> Option<NodeId>>;

/// Which graph a tag's samples are drawn from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Universe {
    /// The whole follow graph.
    #[default]
    FollowGraph,
    /// The follow graph induced on the tag's users.
    HashtagNetwork,
}

/// A tag prepared for lead-time analysis: its sampling graph, every use as
/// (sampling-graph node, time) and the first-use times.
#[derive(Debug, Clone)]
pub struct TagSource<'g> {
    pub label: String,
    pub graph: Cow<'g, Graph>,
    pub uses: Vec<(NodeId, f64)>,
    pub times: AdoptionTimes,
    pub unique_users: usize,
}

impl<'g> TagSource<'g> {
    /// Times are days since the stream window start. Users absent from
    /// `graph` are dropped.
    pub fn new(
        stream: &EventStream,
        tag: &str,
        graph: &'g Graph,
        universe: Universe,
    ) -> Result<Self> {
        let origin = stream.window().start;
        let tag_id = stream.tag_id(tag)?;
        let to_days = |t: i64| (t - origin) as f64 / SECONDS_PER_DAY as f64;
        let (sampling, map): (Cow<'g, Graph>, NodeMap) = match universe {
            Universe::FollowGraph => {
                let n = graph.node_count();
                (
                    Cow::Borrowed(graph),
                    Box::new(move |u| ((u as usize) < n).then_some(u)),
                )
            }
            Universe::HashtagNetwork => {
                let net = hashtag_network(stream, graph, tag)?;
                let members = net.members;
                (
                    Cow::Owned(net.graph),
                    Box::new(move |u| members.binary_search(&u).ok().map(|i| i as NodeId)),
                )
            }
        };
        let uses: Vec<(NodeId, f64)> = stream
            .records()
            .iter()
            .filter(|r| r.tag == tag_id)
            .filter_map(|r| map(r.user).map(|v| (v, to_days(r.time))))
            .collect();
        if uses.is_empty() {
            return Err(Error::TagNotInGraph(tag.to_owned()));
        }
        let timeline = tag_timeline(stream, tag)?;
        let times = AdoptionTimes::Sparse(
            timeline
                .first_use
                .iter()
                .filter_map(|&(u, t)| map(u).map(|v| (v, to_days(t))))
                .collect(),
        );
        Ok(TagSource {
            label: stream.tag_name(tag_id).to_owned(),
            graph: sampling,
            unique_users: times.adopters(),
            uses,
            times,
        })
    }
}

/// First use per node of a list of uses.
pub(crate) fn first_uses(uses: impl IntoIterator<Item = (NodeId, f64)>) -> AdoptionTimes {
    let mut first: HashMap<NodeId, f64> = HashMap::new();
    for (v, t) in uses {
        first
            .entry(v)
            .and_modify(|cur| {
                if t < *cur {
                    *cur = t;
                }
            })
            .or_insert(t);
    }
    AdoptionTimes::Sparse(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_use_keeps_minimum() {
        let t = first_uses([(1, 5.0), (2, 1.0), (1, 3.0), (1, 4.0)]);
        assert_eq!(t.get(1), Some(3.0));
        assert_eq!(t.get(2), Some(1.0));
        assert_eq!(t.get(0), None);
        assert_eq!(t.adopter_ids(), vec![1, 2]);
    }

    #[test]
    fn dense_lookup_out_of_range() {
        let t = AdoptionTimes::Dense(vec![Some(1.0), None]);
        assert_eq!(t.get(0), Some(1.0));
        assert_eq!(t.get(1), None);
        assert_eq!(t.get(9), None);
        assert_eq!(t.adopters(), 1);
    }
}
