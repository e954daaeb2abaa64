use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{EventStream, TagId, SECONDS_PER_DAY};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::powerlaw::{fit_discrete_tail, PowerLawFit};

/// First use of one tag by each user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagTimeline {
    pub tag: TagId,
    /// `(user, first-use unix seconds)`, ascending by user.
    pub first_use: Vec<(NodeId, i64)>,
    pub total_uses: usize,
    pub unique_users: usize,
}

impl TagTimeline {
    /// Builds a timeline from `(user, time)` usage records in any order.
    pub fn from_uses(tag: TagId, uses: impl IntoIterator<Item = (NodeId, i64)>) -> Self {
        let mut first: HashMap<NodeId, i64> = HashMap::new();
        let mut total = 0;
        for (user, time) in uses {
            total += 1;
            first
                .entry(user)
                .and_modify(|t| *t = (*t).min(time))
                .or_insert(time);
        }
        let mut first_use: Vec<(NodeId, i64)> = first.into_iter().collect();
        first_use.sort_unstable();
        TagTimeline {
            tag,
            unique_users: first_use.len(),
            first_use,
            total_uses: total,
        }
    }

    pub fn first_use_of(&self, user: NodeId) -> Option<i64> {
        self.first_use
            .binary_search_by_key(&user, |&(u, _)| u)
            .ok()
            .map(|i| self.first_use[i].1)
    }

    pub fn users(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.first_use.iter().map(|&(u, _)| u)
    }
}

pub fn tag_timeline(stream: &EventStream, tag: &str) -> Result<TagTimeline> {
    let id = stream.tag_id(tag)?;
    Ok(TagTimeline::from_uses(
        id,
        stream
            .records()
            .iter()
            .filter(|r| r.tag == id)
            .map(|r| (r.user, r.time)),
    ))
}

/// Timelines for every tag, indexed by tag id.
pub fn all_timelines(stream: &EventStream) -> Vec<TagTimeline> {
    let mut uses: Vec<Vec<(NodeId, i64)>> = vec![Vec::new(); stream.tags().len()];
    for r in stream.records() {
        uses[r.tag as usize].push((r.user, r.time));
    }
    uses.into_iter()
        .enumerate()
        .map(|(tag, u)| TagTimeline::from_uses(tag as TagId, u))
        .collect()
}

/// Tags first seen at least `quiet_days` after the window opens and used at
/// least `min_total_uses` times, ascending by id.
pub fn born_tags(stream: &EventStream, quiet_days: u32, min_total_uses: usize) -> Vec<TagId> {
    let n = stream.tags().len();
    let mut earliest = vec![i64::MAX; n];
    let mut uses = vec![0usize; n];
    for r in stream.records() {
        let t = r.tag as usize;
        earliest[t] = earliest[t].min(r.time);
        uses[t] += 1;
    }
    let birth_cutoff = stream.window().start + i64::from(quiet_days) * SECONDS_PER_DAY;
    (0..n)
        .filter(|&t| earliest[t] >= birth_cutoff && uses[t] >= min_total_uses)
        .map(|t| t as TagId)
        .collect()
}

/// Number of tags per unique-user count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopularityHistogram {
    /// `(unique users, number of tags)`, ascending.
    pub bins: Vec<(u64, u64)>,
}

impl PopularityHistogram {
    /// `(log10 users, log10 tags)` points.
    pub fn log_log(&self) -> Vec<(f64, f64)> {
        self.bins
            .iter()
            .map(|&(k, c)| ((k as f64).log10(), (c as f64).log10()))
            .collect()
    }

    /// Discrete power-law exponent of the users-per-tag distribution above
    /// `k_min`.
    pub fn fit_tail(&self, k_min: u64) -> Result<PowerLawFit> {
        fit_discrete_tail(
            self.bins
                .iter()
                .flat_map(|&(k, c)| std::iter::repeat_n(k, c as usize)),
            k_min,
        )
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "users,tags,log10_users,log10_tags")?;
        for (&(k, c), (lk, lc)) in self.bins.iter().zip(self.log_log()) {
            writeln!(out, "{k},{c},{lk},{lc}")?;
        }
        Ok(())
    }
}

pub fn popularity_histogram(stream: &EventStream) -> PopularityHistogram {
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for timeline in all_timelines(stream) {
        if timeline.unique_users > 0 {
            *counts.entry(timeline.unique_users as u64).or_default() += 1;
        }
    }
    PopularityHistogram {
        bins: counts.into_iter().collect(),
    }
}

/// Follow graph induced on the users of one tag.
#[derive(Debug, Clone, PartialEq)]
pub struct HashtagNetwork {
    pub tag: TagId,
    pub graph: Graph,
    /// Local node id to follow-graph node id.
    pub members: Vec<NodeId>,
}

impl HashtagNetwork {
    pub fn local_id(&self, global: NodeId) -> Option<NodeId> {
        self.members
            .binary_search(&global)
            .ok()
            .map(|i| i as NodeId)
    }
}

/// The tag's users that exist in `graph`, with the follow edges among them.
pub fn hashtag_network(stream: &EventStream, graph: &Graph, tag: &str) -> Result<HashtagNetwork> {
    let timeline = tag_timeline(stream, tag)?;
    let users: Vec<NodeId> = timeline
        .users()
        .filter(|&u| (u as usize) < graph.node_count())
        .collect();
    if users.is_empty() {
        return Err(Error::TagNotInGraph(tag.to_owned()));
    }
    let (sub, members) = graph.induced_subgraph(&users)?;
    Ok(HashtagNetwork {
        tag: timeline.tag,
        graph: sub,
        members,
    })
}
