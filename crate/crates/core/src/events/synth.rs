//! Synthetic event streams for calibration and tests.

use rand::Rng;

use super::{EventRecord, EventStream, TimeWindow};
use crate::cascade::CascadeTrace;
use crate::error::Result;
use crate::graph::io::IdDictionary;
use crate::graph::{DegreeKind, Graph, NodeId};
use crate::rng;

/// Dictionary mapping the decimal strings `"0".."n-1"` onto themselves, so a
/// synthetic stream shares ids with a generated graph.
pub fn identity_dictionary(node_count: usize) -> IdDictionary {
    let mut dict = IdDictionary::new();
    for v in 0..node_count {
        dict.intern(&v.to_string())
            .expect("node count fits the id range");
    }
    dict
}

/// Broadcast-style adoption with no contagion: for every tag, each user makes
/// `Binomial(degree, use_probability)` uses at independent uniform times in
/// the window. Activity scales with degree, timing ignores the network.
pub fn nonviral_stream(
    graph: &Graph,
    tags: usize,
    use_probability: f64,
    window: TimeWindow,
    seed: u64,
) -> Result<EventStream> {
    let mut rng = rng::rng_from(seed);
    let mut tag_dict = IdDictionary::new();
    let mut records = Vec::new();
    for t in 0..tags {
        let tag = tag_dict.intern(&format!("tag{t}"))?;
        for v in graph.nodes() {
            let trials = graph.degree(v, DegreeKind::Total);
            for _ in 0..trials {
                if rng.random::<f64>() < use_probability {
                    let time = rng.random_range(window.start..=window.end);
                    records.push(EventRecord { time, user: v, tag });
                }
            }
        }
    }
    EventStream::from_parts(
        records,
        window,
        identity_dictionary(graph.node_count()),
        tag_dict,
    )
}

/// One record per infected node of each trace, at
/// `origin + first_infection_time * seconds_per_step`, with tag `names[i]`
/// for `traces[i]`.
pub fn stream_from_traces(
    traces: &[(&str, &CascadeTrace)],
    origin: i64,
    seconds_per_step: i64,
) -> Result<EventStream> {
    let node_count = traces
        .iter()
        .map(|(_, t)| t.node_count())
        .max()
        .unwrap_or(0);
    let mut tag_dict = IdDictionary::new();
    let mut records = Vec::new();
    let mut last = origin;
    for (name, trace) in traces {
        let tag = tag_dict.intern(name)?;
        for (v, time) in trace.first_infection_time.iter().enumerate() {
            if let Some(step) = time {
                let t = origin + i64::from(*step) * seconds_per_step;
                last = last.max(t);
                records.push(EventRecord {
                    time: t,
                    user: v as NodeId,
                    tag,
                });
            }
        }
    }
    EventStream::from_parts(
        records,
        TimeWindow::new(origin, last)?,
        identity_dictionary(node_count),
        tag_dict,
    )
}
