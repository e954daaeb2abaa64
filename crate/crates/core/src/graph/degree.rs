use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{DegreeKind, Graph};
use crate::error::{Error, Result};

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A normalized degree histogram `P(k)` over an ascending support, with its
/// mean and variance cached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    support: Vec<u64>,
    mass: Vec<f64>,
    mean: f64,
    variance: f64,
}

impl DegreeDistribution {
    /// Builds a distribution from non-negative weights, normalizing them.
    /// Support must be strictly ascending.
    pub fn from_weights(support: Vec<u64>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::InvalidDistribution(
                "support and weights differ in length".into(),
            ));
        }
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDistribution(
                "support must be strictly ascending".into(),
            ));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("total weight is zero".into()));
        }
        let mass: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let (mean, variance) = moments(&support, &mass);
        Ok(DegreeDistribution {
            support,
            mass,
            mean,
            variance,
        })
    }

    /// Like [`from_weights`](Self::from_weights) but requires the input to
    /// already sum to one.
    pub fn from_mass(support: Vec<u64>, mass: Vec<f64>) -> Result<Self> {
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "mass sums to {total}, not 1"
            )));
        }
        Self::from_weights(support, mass)
    }

    /// Empirical distribution of a multiset of degrees.
    pub fn from_degrees<I: IntoIterator<Item = u64>>(degrees: I) -> Result<Self> {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for k in degrees {
            *counts.entry(k).or_default() += 1;
        }
        let (support, weights) = counts.into_iter().map(|(k, c)| (k, c as f64)).unzip();
        Self::from_weights(support, weights)
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.support.iter().copied().zip(self.mass.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// `E[k^2]`.
    pub fn second_moment(&self) -> f64 {
        self.iter().map(|(k, p)| (k as f64) * (k as f64) * p).sum()
    }

    /// Probability at `k`, zero off the support.
    pub fn probability(&self, k: u64) -> f64 {
        self.support
            .binary_search(&k)
            .map(|i| self.mass[i])
            .unwrap_or(0.0)
    }

    /// `P(K <= k)`.
    pub fn cdf(&self, k: u64) -> f64 {
        let end = self.support.partition_point(|&s| s <= k);
        self.mass[..end].iter().sum()
    }

    /// Sup-norm distance between the two CDFs, evaluated on the union of
    /// supports.
    pub fn ks_distance(&self, other: &DegreeDistribution) -> f64 {
        let (mut a, mut b) = (0.0_f64, 0.0_f64);
        let (mut i, mut j) = (0, 0);
        let mut worst = 0.0_f64;
        while i < self.support.len() || j < other.support.len() {
            let k = match (self.support.get(i), other.support.get(j)) {
                (Some(&x), Some(&y)) => x.min(y),
                (Some(&x), None) => x,
                (None, Some(&y)) => y,
                (None, None) => unreachable!(),
            };
            while i < self.support.len() && self.support[i] == k {
                a += self.mass[i];
                i += 1;
            }
            while j < other.support.len() && other.support[j] == k {
                b += other.mass[j];
                j += 1;
            }
            worst = worst.max((a - b).abs());
        }
        worst
    }

    /// Half the L1 distance between the two mass functions.
    pub fn total_variation(&self, other: &DegreeDistribution) -> f64 {
        let mut keys: Vec<u64> = self.support.iter().chain(&other.support).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        0.5 * keys
            .into_iter()
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .sum::<f64>()
    }

    /// Writes `k,probability` CSV with a header row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,probability")?;
        for (k, p) in self.iter() {
            writeln!(out, "{k},{p}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut support = Vec::new();
        let mut mass = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<distribution csv>", e))?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('k')) {
                continue;
            }
            let parsed = line.split_once(',').and_then(|(k, p)| {
                Some((k.trim().parse::<u64>().ok()?, p.trim().parse::<f64>().ok()?))
            });
            let (k, p) = parsed.ok_or_else(|| {
                Error::InvalidDistribution(format!("line {}: `{line}`", lineno + 1))
            })?;
            support.push(k);
            mass.push(p);
        }
        Self::from_mass(support, mass)
    }
}

fn moments(support: &[u64], mass: &[f64]) -> (f64, f64) {
    let mean: f64 = support.iter().zip(mass).map(|(&k, &p)| k as f64 * p).sum();
    let variance = support
        .iter()
        .zip(mass)
        .map(|(&k, &p)| (k as f64 - mean).powi(2) * p)
        .sum();
    (mean, variance)
}

/// Exact empirical `P(k)` of the chosen degree over all nodes.
pub fn degree_histogram(graph: &Graph, kind: DegreeKind) -> DegreeDistribution {
    DegreeDistribution::from_degrees(graph.nodes().map(|v| graph.degree(v, kind) as u64))
        .expect("a graph has at least one node")
}
