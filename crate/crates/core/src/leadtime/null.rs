use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::source::{first_uses, TagSource};
use super::{
    draw_samples, evaluate, replicate_seed, validate_replication, LeadTimeSummary, SamplingSpec,
};
use crate::error::{Error, Result};
use crate::events::{EventStream, SECONDS_PER_DAY};
use crate::graph::{Graph, NodeId};
use crate::rng;
use crate::stats;

const SHUFFLE: u64 = 0x5348_5546;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSummary {
    pub null: LeadTimeSummary,
    /// 2.5th and 97.5th percentiles of the null lead times.
    pub band: (f64, f64),
    pub observed_mean: Option<f64>,
    /// Mid-rank percentile of the observed mean among the null lead times.
    pub observed_rank: Option<f64>,
    pub two_sided_p: Option<f64>,
    pub outside_band: Option<bool>,
}

impl NullSummary {
    fn new(null: LeadTimeSummary) -> Self {
        let mut sorted = null.deltas.clone();
        sorted.sort_by(f64::total_cmp);
        NullSummary {
            band: (
                stats::quantile_sorted(&sorted, 0.025),
                stats::quantile_sorted(&sorted, 0.975),
            ),
            null,
            observed_mean: None,
            observed_rank: None,
            two_sided_p: None,
            outside_band: None,
        }
    }

    pub fn mean(&self) -> f64 {
        self.null.mean
    }

    pub fn sem(&self) -> f64 {
        self.null.sem
    }

    /// Places an observed mean lead time within the null.
    pub fn compare(&mut self, observed_mean: f64) {
        let rank = stats::percentile_rank(&self.null.deltas, observed_mean);
        self.observed_mean = Some(observed_mean);
        self.observed_rank = Some(rank);
        self.two_sided_p = Some((2.0 * rank.min(1.0 - rank)).min(1.0));
        self.outside_band = Some(observed_mean < self.band.0 || observed_mean > self.band.1);
    }
}

/// Every event time of the stream in days since the window start, sorted.
pub fn global_time_pool(stream: &EventStream) -> Vec<f64> {
    let origin = stream.window().start;
    let mut pool: Vec<f64> = stream
        .records()
        .iter()
        .map(|r| (r.time - origin) as f64 / SECONDS_PER_DAY as f64)
        .collect();
    pool.sort_by(f64::total_cmp);
    pool
}

/// The uses of replicate `replicate` with times reassigned: a uniform
/// permutation of the uses' own times, or, given a `pool`, a uniform draw
/// without replacement from it. Users keep their record counts.
pub fn shuffled_uses(
    uses: &[(NodeId, f64)],
    pool: Option<&[f64]>,
    seed: u64,
    replicate: usize,
) -> Result<Vec<(NodeId, f64)>> {
    let mut rng = rng::substream(seed, &[replicate as u64, SHUFFLE]);
    let times: Vec<f64> = match pool {
        None => {
            let mut t: Vec<f64> = uses.iter().map(|u| u.1).collect();
            t.shuffle(&mut rng);
            t
        }
        Some(pool) => {
            if pool.len() < uses.len() {
                return Err(Error::InvalidParameter(format!(
                    "time pool of {} is smaller than the {} uses",
                    pool.len(),
                    uses.len()
                )));
            }
            index::sample(&mut rng, pool.len(), uses.len())
                .into_iter()
                .map(|i| pool[i])
                .collect()
        }
    };
    Ok(uses.iter().zip(times).map(|(&(v, _), t)| (v, t)).collect())
}

/// Lead times after shuffling the times of `uses`. Replicate `r` samples with
/// the same seed as replicate `r` of the observed experiment, so the two
/// differ only by the shuffle.
pub fn shuffle_null(
    graph: &Graph,
    uses: &[(NodeId, f64)],
    spec: &SamplingSpec,
    replicates: usize,
    min_infected: usize,
    pool: Option<&[f64]>,
    seed: u64,
) -> Result<NullSummary> {
    validate_replication(replicates, min_infected)?;
    let mut users: Vec<NodeId> = uses.iter().map(|u| u.0).collect();
    users.sort_unstable();
    users.dedup();
    if users.len() < 2 {
        return Err(Error::TooFewUsers {
            tag: String::new(),
            users: users.len(),
        });
    }
    let records = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let times = first_uses(shuffled_uses(uses, pool, seed, r)?);
            let pair = draw_samples(graph, spec, replicate_seed(seed, r))?;
            Ok(evaluate(r, &pair, &times, min_infected, None))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NullSummary::new(LeadTimeSummary::from_records(records)?))
}

/// [`shuffle_null`] on a prepared tag.
pub fn shuffle_null_for_tag(
    source: &TagSource<'_>,
    spec: &SamplingSpec,
    replicates: usize,
    min_infected: usize,
    pool: Option<&[f64]>,
    seed: u64,
) -> Result<NullSummary> {
    shuffle_null(
        &source.graph,
        &source.uses,
        spec,
        replicates,
        min_infected,
        pool,
        seed,
    )
    .map_err(|e| match e {
        Error::TooFewUsers { users, .. } => Error::TooFewUsers {
            tag: source.label.clone(),
            users,
        },
        other => other,
    })
}
