use std::path::PathBuf;

use thiserror::Error;

/// Which side of a sensor/control comparison lacked data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Sensor,
    Control,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Sensor => f.write_str("sensor"),
            Side::Control => f.write_str("control"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty graph")]
    EmptyGraph,
    #[error("node id {0} does not fit the dense id range")]
    IdOverflow(u64),
    #[error("node {node} is out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: u64, node_count: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidGenerator(String),
    #[error("graph has {node_count} nodes, above the exact betweenness cap of {cap}; subsample the graph first")]
    GraphTooLarge { node_count: usize, cap: usize },
    #[error("degenerate distribution: mean degree is zero")]
    DegenerateDistribution,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("sampling fraction {0} is outside (0, 1]")]
    InvalidFraction(f64),
    #[error("requested sample of {requested} from a population of {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("neighbor pool has {pool} nodes, fewer than the requested {requested}")]
    PoolTooSmall { pool: usize, requested: usize },
    #[error("every control node is isolated in the chosen direction")]
    AllIsolated,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("insufficient infections on the {0} side")]
    InsufficientInfections(Side),
    #[error("no analyzable replicates ({skipped} skipped)")]
    NoAnalyzableReplicates { skipped: usize },
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("tag `{0}` has no users in the follow graph")]
    TagNotInGraph(String),
    #[error("tag `{tag}` has {users} user(s); at least 2 are needed")]
    TooFewUsers { tag: String, users: usize },
    #[error("no records in {0}")]
    EmptyInput(PathBuf),
    #[error("{malformed} of {lines} lines in {path} are malformed (limit 1%)")]
    TooManyMalformed {
        path: PathBuf,
        malformed: usize,
        lines: usize,
    },
    #[error("observation window is shorter than one bucket")]
    WindowTooShort,
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
