//! Hypergeometric detection probabilities for repeated-sample designs.
//!
//! A population of `N` users contains `X` adopters of an item. A sample of
//! `S` users detects the item when it holds at least `x_s` adopters, and a
//! design of `n_s` samples detects it when at least `s` samples do.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Below this population size binomial coefficients are computed exactly.
const EXACT_LIMIT: u64 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionDesign {
    /// Population size `N`.
    pub population: u64,
    /// Users per sample `S`.
    pub sample_size: u64,
    /// Adopters a sample must hold to detect, `x_s`.
    pub min_users: u64,
    /// Number of samples `n_s`.
    pub samples: u64,
    /// Samples that must detect, `s`.
    pub min_samples: u64,
}

impl DetectionDesign {
    pub fn validate(&self) -> Result<()> {
        let d = self;
        if d.sample_size == 0 || d.sample_size > d.population {
            return Err(Error::InvalidParameter(format!(
                "need 0 < S <= N (S = {}, N = {})",
                d.sample_size, d.population
            )));
        }
        if d.min_users == 0 || d.min_users > d.sample_size {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= x_s <= S (x_s = {}, S = {})",
                d.min_users, d.sample_size
            )));
        }
        if d.min_samples == 0 || d.min_samples > d.samples {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= s <= n_s (s = {}, n_s = {})",
                d.min_samples, d.samples
            )));
        }
        Ok(())
    }
}

fn check(n: u64, x: u64, s: u64) -> Result<()> {
    if x > n || s > n {
        return Err(Error::InvalidParameter(format!(
            "need X <= N and S <= N (N = {n}, X = {x}, S = {s})"
        )));
    }
    Ok(())
}

fn exact_binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Probability of exactly `k` adopters in a sample of `s` from a population
/// of `n` holding `x` adopters.
pub fn hypergeom_pmf(k: u64, n: u64, x: u64, s: u64) -> Result<f64> {
    check(n, x, s)?;
    let lo = (s + x).saturating_sub(n);
    if k < lo || k > x.min(s) {
        return Ok(0.0);
    }
    if n <= EXACT_LIMIT {
        let num = exact_binomial(x, k) * exact_binomial(n - x, s - k);
        return Ok(num as f64 / exact_binomial(n, s) as f64);
    }
    Ok((ln_binomial(x, k) + ln_binomial(n - x, s - k) - ln_binomial(n, s)).exp())
}

/// Probability of at most `k` adopters in the sample.
pub fn prob_at_most(k: u64, n: u64, x: u64, s: u64) -> Result<f64> {
    check(n, x, s)?;
    let lo = (s + x).saturating_sub(n);
    let hi = k.min(x.min(s));
    if hi < lo {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for j in lo..=hi {
        total += hypergeom_pmf(j, n, x, s)?;
    }
    Ok(total.min(1.0))
}

/// Probability of at least `x_s` adopters in the sample. Sums whichever tail
/// has fewer terms.
pub fn prob_at_least(x_s: u64, n: u64, x: u64, s: u64) -> Result<f64> {
    check(n, x, s)?;
    let lo = (s + x).saturating_sub(n);
    let hi = x.min(s);
    if x_s <= lo {
        return Ok(1.0);
    }
    if x_s > hi {
        return Ok(0.0);
    }
    if hi - x_s < x_s - lo {
        let mut total = 0.0;
        for j in x_s..=hi {
            total += hypergeom_pmf(j, n, x, s)?;
        }
        Ok(total.clamp(0.0, 1.0))
    } else {
        Ok((1.0 - prob_at_most(x_s - 1, n, x, s)?).clamp(0.0, 1.0))
    }
}

/// Probability that at least `min_samples` of `samples` independent samples
/// detect, each with probability `p`.
pub fn multi_sample_prob(p: f64, samples: u64, min_samples: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    if min_samples == 0 || min_samples > samples {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= s <= n_s (s = {min_samples}, n_s = {samples})"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let total: f64 = (min_samples..=samples)
        .map(|i| {
            if samples <= EXACT_LIMIT {
                exact_binomial(samples, i) as f64
                    * p.powi(i as i32)
                    * (1.0 - p).powi((samples - i) as i32)
            } else {
                (ln_binomial(samples, i) + i as f64 * lp + (samples - i) as f64 * lq).exp()
            }
        })
        .sum();
    Ok(total.clamp(0.0, 1.0))
}

/// Detection probability of `design` for each candidate adopter count.
pub fn detection_curve(design: &DetectionDesign, grid: &[u64]) -> Result<Vec<(u64, f64)>> {
    design.validate()?;
    grid.iter()
        .map(|&x| {
            let p = prob_at_least(design.min_users, design.population, x, design.sample_size)?;
            Ok((x, multi_sample_prob(p, design.samples, design.min_samples)?))
        })
        .collect()
}

pub fn write_curve_csv<W: Write>(curve: &[(u64, f64)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "X_alpha,probability")?;
    for (x, p) in curve {
        writeln!(out, "{x},{p}")?;
    }
    Ok(())
}
