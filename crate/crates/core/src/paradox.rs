//! Analytic friendship-paradox predictions: mean friend degree and the degree
//! distributions expected for friend (sensor) samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DegreeDistribution;

const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Mean degree, degree variance and mean degree of a random friend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParadoxStats {
    pub mu: f64,
    pub sigma2: f64,
    pub rho: f64,
}

impl ParadoxStats {
    /// `rho - (mu + sigma2 / mu)`; zero up to rounding.
    pub fn identity_residual(&self) -> f64 {
        self.rho - (self.mu + self.sigma2 / self.mu)
    }
}

/// `rho = E[k^2] / E[k]` computed independently of `mu + sigma2 / mu`; the
/// identity between the two is checked before returning.
pub fn paradox_stats(dist: &DegreeDistribution) -> Result<ParadoxStats> {
    let mu = dist.mean();
    if mu <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let sigma2 = dist.variance();
    let rho = dist.second_moment() / mu;
    let stats = ParadoxStats { mu, sigma2, rho };
    let residual = stats.identity_residual().abs();
    if residual > IDENTITY_TOLERANCE * rho.max(1.0) {
        return Err(Error::InvalidDistribution(format!(
            "friend-degree identity violated by {residual:e}"
        )));
    }
    Ok(stats)
}

/// Degree distribution of a random friend, `Q(k) = k P(k) / mu`.
pub fn friend_degree_dist(dist: &DegreeDistribution) -> Result<DegreeDistribution> {
    reweight(dist, |k| k as f64)
}

/// Degree distribution of the friends of a `gamma` fraction of the network.
///
/// With duplicates kept, `Q(k) ∝ k [1 - (1 - gamma)^k] P(k)`; with duplicates
/// removed the factor `k` drops out. The normalizer is the direct sum over the
/// support.
pub fn sampled_friend_dist(
    dist: &DegreeDistribution,
    gamma: f64,
    dedup: bool,
) -> Result<DegreeDistribution> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidFraction(gamma));
    }
    let miss = 1.0 - gamma;
    if dedup {
        reweight(dist, |k| 1.0 - miss.powi(k as i32))
    } else {
        reweight(dist, |k| k as f64 * (1.0 - miss.powi(k as i32)))
    }
}

fn reweight(dist: &DegreeDistribution, factor: impl Fn(u64) -> f64) -> Result<DegreeDistribution> {
    if dist.mean() <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let weights = dist.iter().map(|(k, p)| factor(k) * p).collect();
    DegreeDistribution::from_weights(dist.support().to_vec(), weights)
}
