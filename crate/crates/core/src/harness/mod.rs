//! Experiment runner: reads a JSON config, runs one experiment kind and
//! writes its tables plus a manifest into an output directory.
//!
//! Relative paths in a config resolve against the config file's directory.
//! All outputs are computed before anything is written, so a failed run
//! leaves no partial outputs behind.

mod config;
mod kinds;
mod manifest;

pub use config::{
    BornFilter, DetectionSection, EventsSource, ExperimentConfig, GraphSource, MultiSampleSection,
    NullScope, NullSection, ParadoxSection, SampleMathSection, SamplingSection, SirSection,
    TagSelection,
};
pub use manifest::{FileDigest, Manifest};

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Fig1,
    Fig2a,
    Fig2bc,
    Fig3,
    Fig4,
    Samplemath,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Fig1 => "fig1",
            Kind::Fig2a => "fig2a",
            Kind::Fig2bc => "fig2bc",
            Kind::Fig3 => "fig3",
            Kind::Fig4 => "fig4",
            Kind::Samplemath => "samplemath",
        };
        f.write_str(s)
    }
}

/// Seed of one stage (`"graph"`, `"sir"`, `"samples"`, ...) of a run.
pub fn stage_seed(root: u64, stage: &str) -> u64 {
    crate::rng::derive(root, &[crate::rng::label(stage)])
}

/// Seed of one tag's experiments in a per-tag run. Replicate `r` samples
/// with `leadtime::replicate_seed(tag_seed, r)` and the detection draw uses
/// `rng::derive(tag_seed, &[rng::label("detect")])`.
pub fn tag_seed(root: u64, tag: &str) -> u64 {
    crate::rng::derive(stage_seed(root, "samples"), &[crate::rng::label(tag)])
}

/// Command-line overrides of config values.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error(transparent)]
    Runtime(#[from] Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 2,
            HarnessError::Runtime(_) => 1,
        }
    }
}

/// A named output file held in memory until the run succeeds.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn text(name: impl Into<String>, text: String) -> Self {
        Artifact {
            name: name.into(),
            bytes: text.into_bytes(),
        }
    }

    pub fn json<T: Serialize>(name: impl Into<String>, value: &T) -> crate::Result<Self> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        Ok(Artifact {
            name: name.into(),
            bytes,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_owned()
    } else {
        base.join(p)
    }
}

fn resolve_paths(cfg: &mut ExperimentConfig, base: &Path) {
    if let Some(GraphSource::File {
        path, dictionary, ..
    }) = &mut cfg.graph
    {
        *path = resolve(base, path);
        if let Some(d) = dictionary {
            *d = resolve(base, d);
        }
    }
    if let Some(e) = &mut cfg.events {
        e.path = resolve(base, &e.path);
        if let Some(m) = &mut e.messages {
            *m = resolve(base, m);
        }
    }
}

/// Loads and validates a config with command-line overrides applied.
pub fn prepare(kind: Kind, opts: &RunOptions) -> Result<ExperimentConfig, HarnessError> {
    let text = fs::read_to_string(&opts.config).map_err(|e| {
        HarnessError::Validation(format!("cannot read {}: {e}", opts.config.display()))
    })?;
    let mut cfg = ExperimentConfig::from_json(&text).map_err(HarnessError::Validation)?;
    let base = opts.config.parent().map(Path::to_owned).unwrap_or_default();
    resolve_paths(&mut cfg, &base);
    if let Some(out) = &cfg.out {
        cfg.out = Some(resolve(&base, out));
    }
    if opts.seed.is_some() {
        cfg.seed = opts.seed;
    }
    if opts.threads.is_some() {
        cfg.threads = opts.threads;
    }
    if opts.out.is_some() {
        cfg.out = opts.out.clone();
    }
    cfg.kind = Some(kind);
    cfg.validate(kind).map_err(HarnessError::Validation)?;
    if cfg.out.is_none() {
        return Err(HarnessError::Validation(
            "no output directory (config `out` or --out)".into(),
        ));
    }
    if let Some(out) = &cfg.out {
        if out.exists() && !out.is_dir() {
            return Err(HarnessError::Validation(format!(
                "output path {} exists and is not a directory",
                out.display()
            )));
        }
    }
    Ok(cfg)
}

/// Runs one experiment and writes its outputs.
pub fn run(kind: Kind, opts: &RunOptions) -> Result<RunOutcome, HarnessError> {
    let cfg = prepare(kind, opts)?;
    let started = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Validation(format!("cannot start worker pool: {e}")))?;
    let threads = pool.current_num_threads();

    let inputs = cfg
        .input_files()
        .iter()
        .map(|p| FileDigest::of_file(p))
        .collect::<crate::Result<Vec<_>>>()?;
    let artifacts = pool.install(|| kinds::run_kind(kind, &cfg))?;

    let out_dir = cfg.out.clone().expect("validated");
    let outputs = write_artifacts(&out_dir, &artifacts)?;
    let manifest = Manifest::new(
        &cfg,
        kind,
        threads,
        started.elapsed().as_secs_f64(),
        inputs,
        outputs,
    );
    let m = Artifact::json("manifest.json", &manifest)?;
    write_file(&out_dir.join(&m.name), &m.bytes)?;
    Ok(RunOutcome { out_dir, manifest })
}

fn write_file(path: &Path, bytes: &[u8]) -> crate::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> crate::Result<Vec<FileDigest>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    artifacts
        .iter()
        .map(|a| {
            write_file(&dir.join(&a.name), &a.bytes)?;
            Ok(FileDigest::of_bytes(&a.name, &a.bytes))
        })
        .collect()
}
