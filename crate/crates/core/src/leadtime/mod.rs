//! Sensor-versus-control lead times.
//!
//! The lead time of an item is the mean first-adoption time of the infected
//! sensors minus that of the infected controls; negative values mean the
//! sensors adopted first. Replicated experiments redraw both groups from
//! per-replicate random substreams and summarize the resulting lead times.

mod detect;
mod null;
mod source;

pub use detect::{realtime_detect, DayRow, DetectionConfig, DetectionReport, SignificanceTest};
pub use null::{global_time_pool, shuffle_null, shuffle_null_for_tag, shuffled_uses, NullSummary};
pub use source::{AdoptionTimes, TagSource, Universe};

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::graph::{Graph, NeighborDirection, NodeId};
use crate::rng;
use crate::sampling::{
    remove_overlap, sample_control_with, sample_sensors_with, NodeSample, SensorPolicy,
};
use crate::stats;

/// Mean sensor time minus mean control time.
pub fn delta_t(sensor_times: &[f64], control_times: &[f64]) -> Result<f64> {
    if sensor_times.is_empty() {
        return Err(Error::InsufficientInfections(Side::Sensor));
    }
    if control_times.is_empty() {
        return Err(Error::InsufficientInfections(Side::Control));
    }
    Ok(stats::mean(sensor_times) - stats::mean(control_times))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleSize {
    Absolute(usize),
    /// Fraction of the sampling graph's nodes, rounded, at least one.
    Fraction(f64),
}

impl SampleSize {
    pub fn resolve(&self, node_count: usize) -> Result<usize> {
        match *self {
            SampleSize::Absolute(n) => Ok(n),
            SampleSize::Fraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::InvalidFraction(f));
                }
                Ok(((f * node_count as f64).round() as usize).max(1))
            }
        }
    }
}

/// How each replicate's control and sensor groups are drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSpec {
    pub size: SampleSize,
    pub policy: SensorPolicy,
    pub direction: NeighborDirection,
    /// Drop sensors from the control group after drawing both.
    pub remove_overlap: bool,
    /// Keep only these (sorted) nodes in the control group before drawing
    /// sensors, e.g. users that ever used a tag.
    pub control_filter: Option<Arc<Vec<NodeId>>>,
}

impl SamplingSpec {
    pub fn new(size: SampleSize, policy: SensorPolicy) -> Self {
        SamplingSpec {
            size,
            policy,
            direction: NeighborDirection::Out,
            remove_overlap: false,
            control_filter: None,
        }
    }

    pub fn with_size(&self, size: SampleSize) -> Self {
        SamplingSpec {
            size,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePair {
    pub control: NodeSample,
    pub sensor: NodeSample,
}

/// Seed of replicate `index` under root `seed`.
pub fn replicate_seed(seed: u64, index: usize) -> u64 {
    rng::derive(seed, &[index as u64])
}

/// Draws one control group and a same-sized sensor group from `seed`.
pub fn draw_samples(graph: &Graph, spec: &SamplingSpec, seed: u64) -> Result<SamplePair> {
    let mut rng = rng::rng_from(seed);
    let size = spec.size.resolve(graph.node_count())?;
    let mut control = sample_control_with(graph, size, seed, &mut rng)?;
    if let Some(keep) = &spec.control_filter {
        control.members.retain(|v| keep.binary_search(v).is_ok());
        control.achieved_size = control.members.len();
        if control.is_empty() {
            return Err(Error::InvalidParameter(
                "control filter removed every sampled node".into(),
            ));
        }
    }
    let sensor = sample_sensors_with(
        graph,
        &control,
        spec.policy,
        spec.direction,
        control.len(),
        seed,
        &mut rng,
    )?;
    if spec.remove_overlap && spec.policy != SensorPolicy::SameAsControl {
        control = remove_overlap(&control, &sensor);
    }
    Ok(SamplePair { control, sensor })
}

/// Outcome of one replicate for one item.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub index: usize,
    pub control_size: usize,
    pub sensor_size: usize,
    pub control_infected: usize,
    pub sensor_infected: usize,
    /// `None` when the replicate was skipped.
    pub delta_t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadTimeSummary {
    /// Lead times of the analyzed replicates, in replicate order.
    pub deltas: Vec<f64>,
    pub mean: f64,
    pub sem: f64,
    pub fraction_negative: f64,
    pub replicates: usize,
    pub skipped: usize,
    pub records: Vec<ReplicateRecord>,
}

impl LeadTimeSummary {
    /// Summarizes records; errors when none was analyzable.
    pub fn from_records(mut records: Vec<ReplicateRecord>) -> Result<Self> {
        records.sort_by_key(|r| r.index);
        let deltas: Vec<f64> = records.iter().filter_map(|r| r.delta_t).collect();
        let skipped = records.len() - deltas.len();
        if deltas.is_empty() {
            return Err(Error::NoAnalyzableReplicates { skipped });
        }
        let negative = deltas.iter().filter(|&&d| d < 0.0).count();
        Ok(LeadTimeSummary {
            mean: stats::mean(&deltas),
            sem: stats::sem(&deltas),
            fraction_negative: negative as f64 / deltas.len() as f64,
            replicates: deltas.len(),
            skipped,
            deltas,
            records,
        })
    }
}

/// Infected members' times of one sample.
pub fn sample_times(times: &AdoptionTimes, sample: &NodeSample) -> Vec<f64> {
    sample
        .members
        .iter()
        .filter_map(|&v| times.get(v))
        .collect()
}

fn evaluate(
    index: usize,
    pair: &SamplePair,
    times: &AdoptionTimes,
    min_infected: usize,
    usage_threshold: Option<f64>,
) -> ReplicateRecord {
    let sensor = sample_times(times, &pair.sensor);
    let control = sample_times(times, &pair.control);
    let passes_threshold = usage_threshold
        .is_none_or(|th| control.len() as f64 / pair.control.len().max(1) as f64 > th);
    let analyzable =
        passes_threshold && sensor.len() >= min_infected && control.len() >= min_infected;
    ReplicateRecord {
        index,
        control_size: pair.control.len(),
        sensor_size: pair.sensor.len(),
        control_infected: control.len(),
        sensor_infected: sensor.len(),
        delta_t: if analyzable {
            delta_t(&sensor, &control).ok()
        } else {
            None
        },
    }
}

fn validate_replication(replicates: usize, min_infected: usize) -> Result<()> {
    if replicates < 1 {
        return Err(Error::InvalidParameter(
            "replicates must be at least 1".into(),
        ));
    }
    if min_infected < 1 {
        return Err(Error::InvalidParameter(
            "min_infected must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Replicated lead-time experiment on one item. Replicate `r` draws its
/// groups from [`replicate_seed`]`(seed, r)`; replicates with fewer than
/// `min_infected` infected members on either side are skipped.
pub fn lead_time_experiment(
    graph: &Graph,
    times: &AdoptionTimes,
    spec: &SamplingSpec,
    replicates: usize,
    min_infected: usize,
    seed: u64,
) -> Result<LeadTimeSummary> {
    validate_replication(replicates, min_infected)?;
    let records = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let pair = draw_samples(graph, spec, replicate_seed(seed, r))?;
            Ok(evaluate(r, &pair, times, min_infected, None))
        })
        .collect::<Result<Vec<_>>>()?;
    LeadTimeSummary::from_records(records)
}

/// An item with adoption times over a shared sampling graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedItem {
    pub label: String,
    pub times: AdoptionTimes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemLeadTime {
    pub label: String,
    pub replicates: usize,
    pub mean: f64,
    pub sem: f64,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub size: usize,
    /// Pooled over every (replicate, item) that passed the filters; `None`
    /// when nothing did.
    pub summary: Option<LeadTimeSummary>,
    pub evaluations: usize,
    pub items: Vec<ItemLeadTime>,
}

/// Lead times across sample sizes. Every size reuses the replicate seeds of
/// `seed`, so a single size with a single item reproduces
/// [`lead_time_experiment`]. An item counts in a replicate only when more
/// than `usage_threshold` of the control group adopted it.
#[allow(clippy::too_many_arguments)]
pub fn size_sweep(
    graph: &Graph,
    items: &[TimedItem],
    spec: &SamplingSpec,
    sizes: &[SampleSize],
    replicates: usize,
    min_infected: usize,
    usage_threshold: f64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    validate_replication(replicates, min_infected)?;
    if sizes.is_empty() {
        return Err(Error::InvalidParameter("no sample sizes given".into()));
    }
    sizes
        .iter()
        .map(|&size| {
            let spec = spec.with_size(size);
            let per_replicate: Vec<Vec<ReplicateRecord>> = (0..replicates)
                .into_par_iter()
                .map(|r| {
                    let pair = draw_samples(graph, &spec, replicate_seed(seed, r))?;
                    Ok(items
                        .iter()
                        .map(|item| {
                            evaluate(r, &pair, &item.times, min_infected, Some(usage_threshold))
                        })
                        .collect())
                })
                .collect::<Result<_>>()?;

            let items_out = items
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    let deltas: Vec<f64> = per_replicate
                        .iter()
                        .filter_map(|recs| recs[i].delta_t)
                        .collect();
                    ItemLeadTime {
                        label: item.label.clone(),
                        replicates: deltas.len(),
                        mean: if deltas.is_empty() {
                            0.0
                        } else {
                            stats::mean(&deltas)
                        },
                        sem: stats::sem(&deltas),
                        deltas,
                    }
                })
                .collect();
            // Pooled records are numbered replicate-major, item-minor.
            let pooled: Vec<ReplicateRecord> = per_replicate
                .into_iter()
                .flatten()
                .enumerate()
                .map(|(k, rec)| ReplicateRecord { index: k, ..rec })
                .collect();
            let evaluations = pooled.iter().filter(|r| r.delta_t.is_some()).count();
            Ok(SweepRow {
                size: spec.size.resolve(graph.node_count())?,
                summary: LeadTimeSummary::from_records(pooled).ok(),
                evaluations,
                items: items_out,
            })
        })
        .collect()
}

/// Per-item lead times over a small set of samples: an item is kept when at
/// least `min_users` controls adopted it in at least `min_samples` of the
/// `n_samples` draws, and its lead times are those qualifying draws.
#[allow(clippy::too_many_arguments)]
pub fn multi_sample_lead_times(
    graph: &Graph,
    items: &[TimedItem],
    spec: &SamplingSpec,
    n_samples: usize,
    min_users: usize,
    min_samples: usize,
    seed: u64,
) -> Result<Vec<ItemLeadTime>> {
    if min_samples < 1 || min_samples > n_samples {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= min_samples <= n_samples (got {min_samples} of {n_samples})"
        )));
    }
    let pairs = (0..n_samples)
        .into_par_iter()
        .map(|r| draw_samples(graph, spec, replicate_seed(seed, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(items
        .iter()
        .filter_map(|item| {
            let deltas: Vec<f64> = pairs
                .iter()
                .enumerate()
                .filter_map(|(r, pair)| {
                    evaluate(r, pair, &item.times, 1, None)
                        .delta_t
                        .filter(|_| sample_times(&item.times, &pair.control).len() >= min_users)
                })
                .collect();
            (deltas.len() >= min_samples).then(|| ItemLeadTime {
                label: item.label.clone(),
                replicates: deltas.len(),
                mean: stats::mean(&deltas),
                sem: stats::sem(&deltas),
                deltas,
            })
        })
        .collect())
}
