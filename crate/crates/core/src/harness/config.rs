use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Kind;
use crate::cascade::{SirParams, TransmissionRule};
use crate::graph::{DegreeKind, NeighborDirection};
use crate::leadtime::{SampleSize, SignificanceTest, Universe};
use crate::samplestats::DetectionDesign;
use crate::sampling::SensorPolicy;

/// One experiment, read from a JSON document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<EventsSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sir: Option<SirSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paradox: Option<ParadoxSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tags: Option<TagSelection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub null: Option<NullSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multi_sample: Option<MultiSampleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samplemath: Option<SampleMathSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum GraphSource {
    /// Tab-separated edge list.
    File {
        path: PathBuf,
        #[serde(default)]
        directed: bool,
        /// Optional `external<TAB>dense` id dictionary to intern through.
        #[serde(default)]
        dictionary: Option<PathBuf>,
    },
    /// Preferential attachment.
    Ba { n: usize, m: usize },
    Er {
        n: usize,
        p: f64,
        #[serde(default)]
        directed: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventsSource {
    pub path: PathBuf,
    #[serde(default)]
    pub messages: Option<PathBuf>,
    /// Inclusive unix-seconds window.
    #[serde(default)]
    pub window: Option<(i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SirSection {
    pub lambda: f64,
    pub gamma_rec: f64,
    pub n_cascades: usize,
    pub t_end: u32,
    #[serde(default)]
    pub transmission: TransmissionRule,
}

impl SirSection {
    pub fn params(&self, seed: u64) -> SirParams {
        SirParams {
            transmission: self.transmission,
            ..SirParams::new(
                self.lambda,
                self.gamma_rec,
                self.n_cascades,
                self.t_end,
                seed,
            )
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub fractions: Vec<f64>,
    #[serde(default)]
    pub policy: SensorPolicy,
    #[serde(default)]
    pub direction: NeighborDirection,
    #[serde(default)]
    pub remove_overlap: bool,
    /// Keep only users with at least one event in the control group.
    #[serde(default)]
    pub trim_to_active: bool,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default = "one")]
    pub min_infected: usize,
    /// Fraction of the control group that must adopt an item for it to count.
    #[serde(default)]
    pub usage_threshold: f64,
    #[serde(default)]
    pub universe: Universe,
}

impl SamplingSection {
    /// Absolute sizes first, then fractions.
    pub fn sample_sizes(&self) -> Vec<SampleSize> {
        self.sizes
            .iter()
            .map(|&n| SampleSize::Absolute(n))
            .chain(self.fractions.iter().map(|&f| SampleSize::Fraction(f)))
            .collect()
    }
}

fn default_pooled() -> SensorPolicy {
    SensorPolicy::PooledNeighbors
}

fn default_total() -> DegreeKind {
    DegreeKind::Total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParadoxSection {
    pub gamma: f64,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default = "default_total")]
    pub degree: DegreeKind,
    #[serde(default = "default_pooled")]
    pub policy: SensorPolicy,
    #[serde(default)]
    pub direction: NeighborDirection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BornFilter {
    pub quiet_days: u32,
    pub min_uses: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagSelection {
    /// Explicit tags; when empty, tags are ranked by total uses.
    #[serde(default)]
    pub names: Vec<String>,
    #[serde(default)]
    pub top: Option<usize>,
    #[serde(default)]
    pub born: Option<BornFilter>,
    /// Tags with fewer distinct users are left out of ranked selections.
    #[serde(default)]
    pub min_users: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullScope {
    #[default]
    PerTag,
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullSection {
    pub replicates: usize,
    #[serde(default)]
    pub scope: NullScope,
}

fn default_alpha() -> f64 {
    0.05
}

fn two() -> usize {
    2
}

fn one_day() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionSection {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "two")]
    pub consecutive_required: usize,
    #[serde(default = "one_day")]
    pub bucket_days: f64,
    #[serde(default)]
    pub test: SignificanceTest,
}

impl Default for DetectionSection {
    fn default() -> Self {
        DetectionSection {
            alpha: default_alpha(),
            consecutive_required: two(),
            bucket_days: one_day(),
            test: SignificanceTest::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiSampleSection {
    pub samples: usize,
    pub min_users: usize,
    #[serde(default = "one")]
    pub min_samples: usize,
    pub size: SampleSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleMathSection {
    pub design: DetectionDesign,
    /// Candidate adopter counts; when empty, `0..=N` in steps of `grid_step`.
    #[serde(default)]
    pub grid: Vec<u64>,
    #[serde(default)]
    pub grid_step: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid config: {e}"))
    }

    /// Checks everything that can be checked without running: the sections a
    /// kind needs, parameter ranges and the existence of input files.
    pub fn validate(&self, kind: Kind) -> Result<(), String> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(format!("config is for kind {k}, not {kind}"));
            }
        }
        if self.seed.is_none() {
            return Err("a seed is required (config `seed` or --seed)".into());
        }
        if self.threads == Some(0) {
            return Err("threads must be at least 1".into());
        }
        if let Some(g) = &self.graph {
            validate_graph(g)?;
        }
        if let Some(e) = &self.events {
            require_file(&e.path)?;
            if let Some(m) = &e.messages {
                require_file(m)?;
            }
            if let Some((a, b)) = e.window {
                if a > b {
                    return Err(format!("event window start {a} is after end {b}"));
                }
            }
        }
        if let Some(s) = &self.sampling {
            validate_sampling(s)?;
        }
        if let Some(s) = &self.sir {
            s.params(0).validate().map_err(|e| e.to_string())?;
        }
        match kind {
            Kind::Fig1 => {
                need(&self.graph, "graph")?;
                let p = need(&self.paradox, "paradox")?;
                if !(p.gamma > 0.0 && p.gamma <= 1.0) {
                    return Err(format!("paradox.gamma must lie in (0, 1], got {}", p.gamma));
                }
                if p.replicates == 0 {
                    return Err("paradox.replicates must be at least 1".into());
                }
            }
            Kind::Fig2a => {
                need(&self.graph, "graph")?;
                need(&self.sir, "sir")?;
                need_sizes(need(&self.sampling, "sampling")?)?;
            }
            Kind::Fig2bc => {
                need_file_graph(&self.graph)?;
                need(&self.events, "events")?;
                need_sizes(need(&self.sampling, "sampling")?)?;
                if let Some(m) = &self.multi_sample {
                    if m.samples == 0 || m.min_samples == 0 || m.min_samples > m.samples {
                        return Err("multi_sample needs 1 <= min_samples <= samples".into());
                    }
                    check_size(m.size)?;
                }
                validate_tags(&self.tags)?;
            }
            Kind::Fig3 => {
                need_file_graph(&self.graph)?;
                need(&self.events, "events")?;
                let s = need(&self.sampling, "sampling")?;
                need_sizes(s)?;
                if let Some(n) = &self.null {
                    if n.replicates == 0 {
                        return Err("null.replicates must be at least 1".into());
                    }
                }
                if let Some(d) = &self.detection {
                    if !(d.alpha > 0.0 && d.alpha < 1.0) {
                        return Err(format!(
                            "detection.alpha must lie in (0, 1), got {}",
                            d.alpha
                        ));
                    }
                    if d.consecutive_required == 0 || d.bucket_days.is_nan() || d.bucket_days <= 0.0
                    {
                        return Err(
                            "detection needs consecutive_required >= 1 and bucket_days > 0".into(),
                        );
                    }
                }
                validate_tags(&self.tags)?;
            }
            Kind::Fig4 => {
                need_file_graph(&self.graph)?;
                need(&self.events, "events")?;
                need_sizes(need(&self.sampling, "sampling")?)?;
            }
            Kind::Samplemath => {
                let m = need(&self.samplemath, "samplemath")?;
                m.design.validate().map_err(|e| e.to_string())?;
                if m.grid.iter().any(|&x| x > m.design.population) {
                    return Err("samplemath.grid values must not exceed the population".into());
                }
                if m.grid_step == Some(0) {
                    return Err("samplemath.grid_step must be positive".into());
                }
            }
        }
        Ok(())
    }

    /// Every input file referenced by the config.
    pub fn input_files(&self) -> Vec<PathBuf> {
        let mut files = Vec::new();
        if let Some(GraphSource::File {
            path, dictionary, ..
        }) = &self.graph
        {
            files.push(path.clone());
            files.extend(dictionary.clone());
        }
        if let Some(e) = &self.events {
            files.push(e.path.clone());
            files.extend(e.messages.clone());
        }
        files
    }
}

fn need<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, String> {
    section
        .as_ref()
        .ok_or_else(|| format!("missing `{name}` section"))
}

fn need_file_graph(graph: &Option<GraphSource>) -> Result<(), String> {
    match need(graph, "graph")? {
        GraphSource::File { .. } => Ok(()),
        _ => Err("this kind needs a follow graph read from a file".into()),
    }
}

fn need_sizes(s: &SamplingSection) -> Result<(), String> {
    if s.sizes.is_empty() && s.fractions.is_empty() {
        return Err("sampling needs at least one size or fraction".into());
    }
    Ok(())
}

fn check_size(size: SampleSize) -> Result<(), String> {
    match size {
        SampleSize::Absolute(0) => Err("sample sizes must be at least 1".into()),
        SampleSize::Fraction(f) if !(f > 0.0 && f <= 1.0) => {
            Err(format!("sample fractions must lie in (0, 1], got {f}"))
        }
        _ => Ok(()),
    }
}

fn require_file(path: &Path) -> Result<(), String> {
    if path.is_file() {
        Ok(())
    } else {
        Err(format!("input file not found: {}", path.display()))
    }
}

fn validate_graph(g: &GraphSource) -> Result<(), String> {
    match g {
        GraphSource::File {
            path, dictionary, ..
        } => {
            require_file(path)?;
            if let Some(d) = dictionary {
                require_file(d)?;
            }
        }
        GraphSource::Ba { n, m } => {
            if *m == 0 || n <= m {
                return Err(format!("BA graph needs 1 <= m < n (n = {n}, m = {m})"));
            }
        }
        GraphSource::Er { n, p, .. } => {
            if *n == 0 || !(0.0..=1.0).contains(p) {
                return Err(format!(
                    "ER graph needs n >= 1 and p in [0, 1] (n = {n}, p = {p})"
                ));
            }
        }
    }
    Ok(())
}

fn validate_sampling(s: &SamplingSection) -> Result<(), String> {
    for size in s.sample_sizes() {
        check_size(size)?;
    }
    if s.replicates == 0 || s.min_infected == 0 {
        return Err("sampling needs replicates >= 1 and min_infected >= 1".into());
    }
    if !(0.0..1.0).contains(&s.usage_threshold) {
        return Err(format!(
            "sampling.usage_threshold must lie in [0, 1), got {}",
            s.usage_threshold
        ));
    }
    Ok(())
}

fn validate_tags(tags: &Option<TagSelection>) -> Result<(), String> {
    if let Some(t) = tags {
        if t.top == Some(0) {
            return Err("tags.top must be at least 1".into());
        }
    }
    Ok(())
}
