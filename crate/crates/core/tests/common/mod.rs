#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sensornet::cascade::{simulate_sir, SirParams};
use sensornet::graph::{generate_ba, Graph};

pub const ORIGIN: i64 = 1_300_000_000;
pub const DAY: i64 = 86_400;

pub struct Corpus {
    pub dir: PathBuf,
    pub edges: PathBuf,
    pub events: PathBuf,
    pub messages: PathBuf,
    pub graph: Graph,
}

/// External id of dense node `v`; ids are scrambled so the edge file's
/// first-seen order differs from the generator's numbering.
pub fn external(v: u32) -> String {
    format!("user{}", (v as u64 * 7919 + 13) % 100_003)
}

/// A small follow graph with three cascading tags, one tag used at random
/// and a message file.
pub fn write_corpus(dir: &Path, n: usize, seed: u64) -> Corpus {
    let graph = generate_ba(n, 3, seed).unwrap();
    let mut edges = String::from("# follower\tfollowee\n");
    for (u, v) in graph.edges() {
        writeln!(edges, "{}\t{}", external(u), external(v)).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = String::new();
    for (i, tag) in ["#Alpha", "#beta", "#gamma"].iter().enumerate() {
        let trace =
            simulate_sir(&graph, &SirParams::new(0.25, 0.05, 1, 60, seed + i as u64)).unwrap();
        for (v, t) in trace.first_infection_time.iter().enumerate() {
            if let Some(step) = t {
                let uses = 1 + rng.random_range(0..3);
                for _ in 0..uses {
                    let later = rng.random_range(0..3) * DAY;
                    let time = ORIGIN
                        + 5 * DAY
                        + i64::from(*step) * DAY
                        + later
                        + rng.random_range(0..DAY);
                    writeln!(events, "{}\t{tag}\t{time}", external(v as u32)).unwrap();
                }
            }
        }
    }
    for v in 0..n as u32 {
        if rng.random::<f64>() < 0.2 {
            let time = ORIGIN + rng.random_range(0..70 * DAY);
            writeln!(events, "{}\t#noise\t{time}", external(v)).unwrap();
        }
    }
    // A user outside the follow graph.
    writeln!(events, "stranger\t#alpha\t{}", ORIGIN + 30 * DAY).unwrap();
    let mut messages = String::new();
    for v in 0..n as u32 {
        for _ in 0..rng.random_range(0..6) {
            writeln!(
                messages,
                "{}\t{}",
                external(v),
                ORIGIN + rng.random_range(0..70 * DAY)
            )
            .unwrap();
        }
    }
    let c = Corpus {
        dir: dir.to_owned(),
        edges: dir.join("edges.tsv"),
        events: dir.join("events.tsv"),
        messages: dir.join("messages.tsv"),
        graph,
    };
    fs::write(&c.edges, edges).unwrap();
    fs::write(&c.events, events).unwrap();
    fs::write(&c.messages, messages).unwrap();
    c
}

/// One config per experiment kind over the corpus.
pub fn configs(c: &Corpus) -> Vec<(&'static str, serde_json::Value)> {
    use serde_json::json;
    let graph = json!({"source": "file", "path": c.edges, "directed": false});
    let events = json!({"path": c.events, "messages": c.messages});
    vec![
        (
            "fig1",
            json!({
                "seed": 3,
                "graph": {"source": "ba", "n": 3000, "m": 4},
                "paradox": {"gamma": 0.02, "replicates": 5}
            }),
        ),
        (
            "fig2a",
            json!({
                "seed": 4,
                "graph": {"source": "ba", "n": 3000, "m": 4},
                "sir": {"lambda": 0.1, "gamma_rec": 0.01, "n_cascades": 3, "t_end": 2000},
                "sampling": {"sizes": [30, 60, 150], "policy": "pooled-neighbors", "replicates": 10}
            }),
        ),
        (
            "fig2bc",
            json!({
                "seed": 5,
                "graph": graph,
                "events": events,
                "sampling": {"fractions": [0.05, 0.1, 0.2], "replicates": 8, "trim_to_active": true},
                "tags": {"top": 3},
                "multi_sample": {"samples": 5, "min_users": 3, "min_samples": 1, "size": {"fraction": 0.1}}
            }),
        ),
        (
            "fig3",
            json!({
                "seed": 6,
                "graph": graph,
                "events": events,
                "sampling": {"fractions": [0.1], "replicates": 12},
                "null": {"replicates": 20},
                "tags": {"top": 4}
            }),
        ),
        (
            "fig4",
            json!({
                "seed": 7,
                "graph": graph,
                "events": events,
                "sampling": {"fractions": [0.1], "replicates": 4}
            }),
        ),
        (
            "samplemath",
            json!({
                "seed": 8,
                "samplemath": {
                    "design": {"population": 5000, "sample_size": 250, "min_users": 3, "samples": 5, "min_samples": 2},
                    "grid_step": 50
                }
            }),
        ),
    ]
}

/// Relative path and contents of every file under `dir` except the manifest.
pub fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for entry in fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else if p.file_name().unwrap() != "manifest.json" {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}
