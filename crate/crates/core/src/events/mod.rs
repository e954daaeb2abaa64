//! Timestamped adoption events: `(user, tag, unix_seconds)` records, their
//! per-tag timelines, hashtag networks and per-user activity.
//!
//! Event files are UTF-8 TSV with one `user<TAB>tag<TAB>unix_seconds` line
//! per (message, tag) pair. An optional message file holds one
//! `user<TAB>unix_seconds` line per message. `#` starts a comment line.

mod activity;
pub mod synth;
mod timeline;

pub use activity::{
    activity_profile, ActivityIndex, ActivityProfile, ActivityRow, DiversityBucket, FieldSummary,
};
pub use timeline::{
    all_timelines, born_tags, hashtag_network, popularity_histogram, tag_timeline, HashtagNetwork,
    PopularityHistogram, TagTimeline,
};

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::io::IdDictionary;
use crate::graph::NodeId;

pub type TagId = u32;

pub const SECONDS_PER_DAY: i64 = 86_400;

/// Closed interval `[start, end]` of unix seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: i64,
    pub end: i64,
}

impl TimeWindow {
    pub fn new(start: i64, end: i64) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidParameter(format!(
                "window end {end} precedes start {start}"
            )));
        }
        Ok(TimeWindow { start, end })
    }

    pub fn contains(&self, t: i64) -> bool {
        (self.start..=self.end).contains(&t)
    }

    pub fn duration(&self) -> i64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EventRecord {
    pub time: i64,
    pub user: NodeId,
    pub tag: TagId,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub lines: usize,
    pub records: usize,
    pub malformed: usize,
    pub out_of_window: usize,
    pub message_lines: usize,
    pub messages: usize,
    pub messages_malformed: usize,
    pub messages_out_of_window: usize,
}

/// Event records sorted by `(time, user, tag)` together with the user and
/// tag dictionaries.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStream {
    records: Vec<EventRecord>,
    window: TimeWindow,
    users: IdDictionary,
    tags: IdDictionary,
    /// Message timestamps as `(user, time)`, sorted; present only when a
    /// message file was attached.
    messages: Option<Vec<(NodeId, i64)>>,
    report: LoadReport,
}

impl EventStream {
    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn users(&self) -> &IdDictionary {
        &self.users
    }

    pub fn tags(&self) -> &IdDictionary {
        &self.tags
    }

    pub fn report(&self) -> &LoadReport {
        &self.report
    }

    pub fn messages(&self) -> Option<&[(NodeId, i64)]> {
        self.messages.as_deref()
    }

    /// Looks a tag up after case folding.
    pub fn tag_id(&self, tag: &str) -> Result<TagId> {
        self.tags
            .get(&fold_tag(tag))
            .ok_or_else(|| Error::UnknownTag(tag.to_owned()))
    }

    pub fn tag_name(&self, tag: TagId) -> &str {
        self.tags.external(tag).unwrap_or("")
    }

    /// Users with at least one record.
    pub fn active_users(&self) -> Vec<NodeId> {
        let mut users: Vec<NodeId> = self.records.iter().map(|r| r.user).collect();
        users.sort_unstable();
        users.dedup();
        users
    }

    /// Builds a stream from already interned parts; records are sorted and
    /// window-filtered here.
    pub fn from_parts(
        mut records: Vec<EventRecord>,
        window: TimeWindow,
        users: IdDictionary,
        tags: IdDictionary,
    ) -> Result<Self> {
        let before = records.len();
        records.retain(|r| window.contains(r.time));
        if records.is_empty() {
            return Err(Error::EmptyInput(PathBuf::from("<records>")));
        }
        records.sort_unstable();
        let report = LoadReport {
            lines: before,
            records: records.len(),
            out_of_window: before - records.len(),
            ..LoadReport::default()
        };
        Ok(EventStream {
            records,
            window,
            users,
            tags,
            messages: None,
            report,
        })
    }

    /// Reads a message file and attaches per-user message times.
    pub fn attach_messages(&mut self, path: &Path) -> Result<()> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut messages = Vec::new();
        let (mut lines, mut malformed, mut outside) = (0, 0, 0);
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            lines += 1;
            let mut fields = line.split('\t');
            let parsed = match (fields.next(), fields.next(), fields.next()) {
                (Some(u), Some(t), None) if !u.is_empty() => {
                    t.trim().parse::<i64>().ok().map(|t| (u, t))
                }
                _ => None,
            };
            match parsed {
                Some((_, t)) if !self.window.contains(t) => outside += 1,
                Some((u, t)) => messages.push((self.users.intern(u)?, t)),
                None => malformed += 1,
            }
        }
        if malformed * 100 > lines {
            return Err(Error::TooManyMalformed {
                path: path.to_owned(),
                malformed,
                lines,
            });
        }
        messages.sort_unstable();
        self.report.message_lines = lines;
        self.report.messages = messages.len();
        self.report.messages_malformed = malformed;
        self.report.messages_out_of_window = outside;
        self.messages = Some(messages);
        Ok(())
    }
}

/// Hashtags are case-insensitive.
pub fn fold_tag(tag: &str) -> String {
    tag.to_lowercase()
}

/// Incremental parser for event text. Input may arrive in arbitrary chunks,
/// even splitting lines; the result only depends on the concatenated text.
#[derive(Debug)]
pub struct EventStreamBuilder {
    users: IdDictionary,
    tags: IdDictionary,
    window: Option<TimeWindow>,
    records: Vec<EventRecord>,
    carry: String,
    report: LoadReport,
}

impl EventStreamBuilder {
    /// `users` lets the stream share dense ids with a follow graph.
    pub fn new(users: IdDictionary, window: Option<TimeWindow>) -> Self {
        EventStreamBuilder {
            users,
            tags: IdDictionary::new(),
            window,
            records: Vec::new(),
            carry: String::new(),
            report: LoadReport::default(),
        }
    }

    pub fn push_chunk(&mut self, chunk: &str) -> Result<()> {
        self.carry.push_str(chunk);
        let Some(last) = self.carry.rfind('\n') else {
            return Ok(());
        };
        let complete: String = self.carry.drain(..=last).collect();
        for line in complete.split_terminator('\n') {
            self.push_line(line)?;
        }
        Ok(())
    }

    pub fn push_line(&mut self, line: &str) -> Result<()> {
        let line = line.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() || line.starts_with('#') {
            return Ok(());
        }
        self.report.lines += 1;
        let mut fields = line.split('\t');
        let parsed = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(user), Some(tag), Some(time), None)
                if !user.is_empty() && !tag.trim().is_empty() =>
            {
                time.trim()
                    .parse::<i64>()
                    .ok()
                    .map(|t| (user, tag.trim(), t))
            }
            _ => None,
        };
        let Some((user, tag, time)) = parsed else {
            self.report.malformed += 1;
            return Ok(());
        };
        if let Some(w) = self.window {
            if !w.contains(time) {
                self.report.out_of_window += 1;
                return Ok(());
            }
        }
        let user = self.users.intern(user)?;
        let tag = self.tags.intern(&fold_tag(tag))?;
        self.records.push(EventRecord { time, user, tag });
        Ok(())
    }

    pub fn ingest<R: Read>(&mut self, reader: R) -> Result<()> {
        let mut reader = BufReader::new(reader);
        let mut line = String::new();
        loop {
            line.clear();
            let read = reader
                .read_line(&mut line)
                .map_err(|e| Error::io("<events>", e))?;
            if read == 0 {
                return Ok(());
            }
            self.push_chunk(&line)?;
        }
    }

    pub fn finish(mut self, source: &Path) -> Result<EventStream> {
        if !self.carry.is_empty() {
            let tail = std::mem::take(&mut self.carry);
            self.push_line(&tail)?;
        }
        if self.report.malformed * 100 > self.report.lines {
            return Err(Error::TooManyMalformed {
                path: source.to_owned(),
                malformed: self.report.malformed,
                lines: self.report.lines,
            });
        }
        if self.records.is_empty() {
            return Err(Error::EmptyInput(source.to_owned()));
        }
        self.records.sort_unstable();
        let window = match self.window {
            Some(w) => w,
            None => TimeWindow {
                start: self.records[0].time,
                end: self.records[self.records.len() - 1].time,
            },
        };
        self.report.records = self.records.len();
        Ok(EventStream {
            records: self.records,
            window,
            users: self.users,
            tags: self.tags,
            messages: None,
            report: self.report,
        })
    }
}

/// Loads an event file. Without a window, the window spans the observed
/// timestamps.
pub fn load_events(path: &Path, window: Option<TimeWindow>) -> Result<EventStream> {
    load_events_with(path, window, IdDictionary::new())
}

/// Like [`load_events`], interning users through an existing dictionary so
/// user ids line up with a follow graph loaded through the same dictionary.
pub fn load_events_with(
    path: &Path,
    window: Option<TimeWindow>,
    users: IdDictionary,
) -> Result<EventStream> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut builder = EventStreamBuilder::new(users, window);
    builder.ingest(file).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    builder.finish(path)
}
