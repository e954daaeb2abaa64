use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, Kind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    pub fn of_file(path: &Path) -> Result<Self> {
        let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut hasher = Sha256::new();
        let mut buf = vec![0u8; 1 << 16];
        let mut total = 0u64;
        loop {
            let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
            if n == 0 {
                break;
            }
            hasher.update(&buf[..n]);
            total += n as u64;
        }
        Ok(FileDigest {
            path: path.display().to_string(),
            bytes: total,
            sha256: hex::encode(hasher.finalize()),
        })
    }

    pub fn of_bytes(name: &str, bytes: &[u8]) -> Self {
        FileDigest {
            path: name.to_owned(),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

/// Record of one run. The config echo reruns to the same data outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub kind: Kind,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub config: ExperimentConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl Manifest {
    pub fn new(
        config: &ExperimentConfig,
        kind: Kind,
        threads: usize,
        wall_time_seconds: f64,
        inputs: Vec<FileDigest>,
        outputs: Vec<FileDigest>,
    ) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            kind,
            seed: config.seed.unwrap_or_default(),
            threads,
            wall_time_seconds,
            config: config.clone(),
            inputs,
            outputs,
        }
    }
}
