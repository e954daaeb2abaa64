use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::EventStream;
use crate::graph::NodeId;
use crate::sampling::NodeSample;
use crate::stats;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityRow {
    pub user: NodeId,
    /// From the message file when attached, otherwise the distinct
    /// `(user, timestamp)` pairs among tag records.
    pub messages: u64,
    pub messages_with_tags: u64,
    pub tag_uses: u64,
    pub unique_tags: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub mean: f64,
    pub sem: f64,
    pub n: usize,
}

impl FieldSummary {
    fn of(values: &[f64]) -> Self {
        FieldSummary {
            mean: if values.is_empty() {
                0.0
            } else {
                stats::mean(values)
            },
            sem: stats::sem(values),
            n: values.len(),
        }
    }
}

/// Unique-tag counts of users grouped by message volume, bucket `b` holding
/// `[2^(b-1), 2^b)` messages and bucket 0 holding silent users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityBucket {
    pub min_messages: u64,
    pub max_messages: u64,
    pub users: usize,
    pub unique_tags: FieldSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityProfile {
    pub rows: Vec<ActivityRow>,
    /// Sample members with no activity of any kind in the stream.
    pub absent_users: usize,
    pub messages: FieldSummary,
    pub messages_with_tags: FieldSummary,
    pub tag_uses: FieldSummary,
    pub unique_tags: FieldSummary,
    /// Tag uses divided by unique tags, over users with at least one tag.
    pub uses_per_unique_tag: FieldSummary,
    /// Unique tags divided by messages, over users with at least one message.
    pub unique_tags_per_message: FieldSummary,
    pub diversity_by_activity: Vec<DiversityBucket>,
}

/// Per-user activity counts for a whole stream, indexed by user id.
#[derive(Debug, Clone)]
pub struct ActivityIndex {
    rows: Vec<ActivityRow>,
}

impl ActivityIndex {
    pub fn new(stream: &EventStream) -> Self {
        let n = stream.users().len();
        let mut rows: Vec<ActivityRow> = (0..n as NodeId)
            .map(|user| ActivityRow {
                user,
                ..ActivityRow::default()
            })
            .collect();
        let mut tagged_messages: HashSet<(NodeId, i64)> = HashSet::new();
        let mut user_tags: HashSet<(NodeId, u32)> = HashSet::new();
        for r in stream.records() {
            let row = &mut rows[r.user as usize];
            row.tag_uses += 1;
            if tagged_messages.insert((r.user, r.time)) {
                row.messages_with_tags += 1;
            }
            if user_tags.insert((r.user, r.tag)) {
                row.unique_tags += 1;
            }
        }
        match stream.messages() {
            Some(messages) => {
                for &(user, _) in messages {
                    rows[user as usize].messages += 1;
                }
            }
            None => {
                for row in &mut rows {
                    row.messages = row.messages_with_tags;
                }
            }
        }
        ActivityIndex { rows }
    }

    pub fn row(&self, user: NodeId) -> ActivityRow {
        self.rows
            .get(user as usize)
            .copied()
            .unwrap_or(ActivityRow {
                user,
                ..ActivityRow::default()
            })
    }

    pub fn profile(&self, sample: &NodeSample) -> ActivityProfile {
        let rows: Vec<ActivityRow> = sample.members.iter().map(|&u| self.row(u)).collect();
        let absent_users = rows
            .iter()
            .filter(|r| r.messages == 0 && r.tag_uses == 0)
            .count();
        let column =
            |f: fn(&ActivityRow) -> u64| -> Vec<f64> { rows.iter().map(|r| f(r) as f64).collect() };
        let uses_per_unique: Vec<f64> = rows
            .iter()
            .filter(|r| r.unique_tags > 0)
            .map(|r| r.tag_uses as f64 / r.unique_tags as f64)
            .collect();
        let unique_per_message: Vec<f64> = rows
            .iter()
            .filter(|r| r.messages > 0)
            .map(|r| r.unique_tags as f64 / r.messages as f64)
            .collect();

        let mut buckets: Vec<Vec<f64>> = Vec::new();
        for r in &rows {
            let b = (u64::BITS - r.messages.leading_zeros()) as usize;
            if buckets.len() <= b {
                buckets.resize(b + 1, Vec::new());
            }
            buckets[b].push(r.unique_tags as f64);
        }
        let diversity_by_activity = buckets
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .map(|(b, v)| DiversityBucket {
                min_messages: if b == 0 { 0 } else { 1u64 << (b - 1) },
                max_messages: if b == 0 { 0 } else { (1u64 << b) - 1 },
                users: v.len(),
                unique_tags: FieldSummary::of(v),
            })
            .collect();

        ActivityProfile {
            messages: FieldSummary::of(&column(|r| r.messages)),
            messages_with_tags: FieldSummary::of(&column(|r| r.messages_with_tags)),
            tag_uses: FieldSummary::of(&column(|r| r.tag_uses)),
            unique_tags: FieldSummary::of(&column(|r| r.unique_tags)),
            uses_per_unique_tag: FieldSummary::of(&uses_per_unique),
            unique_tags_per_message: FieldSummary::of(&unique_per_message),
            diversity_by_activity,
            absent_users,
            rows,
        }
    }
}

/// Activity and diversity statistics of one sample.
pub fn activity_profile(stream: &EventStream, sample: &NodeSample) -> ActivityProfile {
    ActivityIndex::new(stream).profile(sample)
}
