//! Edge-list files and the external-to-dense id dictionary.
//!
//! Edge lists are UTF-8 text with one `src<TAB>dst` edge per line; lines
//! starting with `#` are comments. The dictionary sidecar holds one
//! `external<TAB>dense` pair per line.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BuildReport, Directedness, Graph, NodeId, MAX_NODE_ID};
use crate::error::{Error, Result};

/// Bijective map between external id strings and dense node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdDictionary {
    dense: HashMap<String, NodeId>,
    external: Vec<String>,
}

impl IdDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }

    pub fn get(&self, external: &str) -> Option<NodeId> {
        self.dense.get(external).copied()
    }

    pub fn external(&self, id: NodeId) -> Option<&str> {
        self.external.get(id as usize).map(String::as_str)
    }

    pub fn intern(&mut self, external: &str) -> Result<NodeId> {
        if let Some(&id) = self.dense.get(external) {
            return Ok(id);
        }
        let id = self.external.len() as u64;
        if id > MAX_NODE_ID {
            return Err(Error::IdOverflow(id));
        }
        self.dense.insert(external.to_owned(), id as NodeId);
        self.external.push(external.to_owned());
        Ok(id as NodeId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, NodeId)> {
        self.external
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i as NodeId))
    }

    /// Reads a sidecar file. Dense ids must form the range `0..len`.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (ext, dense) = line
                .split_once('\t')
                .and_then(|(e, d)| Some((e.to_owned(), d.trim().parse::<u64>().ok()?)))
                .ok_or_else(|| {
                    Error::Config(format!(
                        "{}: malformed dictionary line `{line}`",
                        path.display()
                    ))
                })?;
            pairs.push((dense, ext));
        }
        pairs.sort();
        let mut dict = IdDictionary::new();
        for (expected, (dense, ext)) in pairs.into_iter().enumerate() {
            if dense != expected as u64 || dict.get(&ext).is_some() {
                return Err(Error::Config(format!(
                    "{}: dictionary ids are not a dense bijection",
                    path.display()
                )));
            }
            dict.intern(&ext)?;
        }
        Ok(dict)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for (ext, id) in self.iter() {
            writeln!(out, "{ext}\t{id}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeListReport {
    pub lines: usize,
    pub edges_read: usize,
    pub malformed: usize,
    pub build: BuildReport,
}

/// Parses edge-list text, interning endpoints through `dict`. The graph spans
/// every id in the dictionary, so pre-loaded ids without edges stay isolated.
pub fn parse_edge_list<R: BufRead>(
    input: R,
    source: &Path,
    dict: &mut IdDictionary,
    directedness: Directedness,
) -> Result<(Graph, EdgeListReport)> {
    let mut report = EdgeListReport::default();
    let mut edges = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| Error::io(source, e))?;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        report.lines += 1;
        let mut fields = trimmed.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(src), Some(dst), None) if !src.is_empty() && !dst.is_empty() => {
                edges.push((dict.intern(src)?, dict.intern(dst)?));
            }
            _ => report.malformed += 1,
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if report.malformed * 100 > report.lines {
        return Err(Error::TooManyMalformed {
            path: source.to_owned(),
            malformed: report.malformed,
            lines: report.lines,
        });
    }
    report.edges_read = edges.len();
    let (graph, build) = Graph::from_edges(dict.len(), edges, directedness)?;
    report.build = build;
    Ok((graph, report))
}

pub fn read_edge_list(
    path: &Path,
    dict: &mut IdDictionary,
    directedness: Directedness,
) -> Result<(Graph, EdgeListReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), path, dict, directedness)
}

/// Writes each edge once using external ids.
pub fn write_edge_list(graph: &Graph, dict: &IdDictionary, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (u, v) in graph.edges() {
        let name = |id: NodeId| {
            dict.external(id)
                .map(str::to_owned)
                .unwrap_or(id.to_string())
        };
        writeln!(out, "{}\t{}", name(u), name(v)).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
