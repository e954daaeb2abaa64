//! Maximum-likelihood fit of a discrete power-law tail `P(k) ∝ k^-alpha`,
//! `k >= k_min`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub k_min: u64,
    pub tail_count: usize,
}

// Euler-Maclaurin correction coefficients B_2j / (2j)!.
const EM_COEFFS: [f64; 5] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
];

/// Hurwitz zeta `sum_{k>=0} (q + k)^-s` for `s > 1`, `q > 0`.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const DIRECT: usize = 16;
    let mut sum: f64 = (0..DIRECT).map(|k| (q + k as f64).powf(-s)).sum();
    let a = q + DIRECT as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Rising products s (s+1) ... (s+2j-2) times a^(-s-2j+1).
    let mut rising = s;
    let mut power = a.powf(-s - 1.0);
    for (j, c) in EM_COEFFS.iter().enumerate() {
        sum += c * rising * power;
        let next = 2.0 * j as f64 + 1.0;
        rising *= (s + next) * (s + next + 1.0);
        power /= a * a;
    }
    sum
}

fn log_likelihood(alpha: f64, k_min: u64, n: f64, sum_log: f64) -> f64 {
    -n * hurwitz_zeta(alpha, k_min as f64).ln() - alpha * sum_log
}

/// Fits the exponent on the values `>= k_min` by golden-section search over
/// the (concave) log-likelihood.
pub fn fit_discrete_tail<I: IntoIterator<Item = u64>>(
    values: I,
    k_min: u64,
) -> Result<PowerLawFit> {
    if k_min == 0 {
        return Err(Error::InvalidParameter("k_min must be at least 1".into()));
    }
    let tail: Vec<f64> = values
        .into_iter()
        .filter(|&k| k >= k_min)
        .map(|k| k as f64)
        .collect();
    if tail.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two values >= {k_min} to fit a tail"
        )));
    }
    let n = tail.len() as f64;
    let sum_log: f64 = tail.iter().map(|k| k.ln()).sum();

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (1.000_001_f64, 12.0_f64);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = log_likelihood(x1, k_min, n, sum_log);
    let mut f2 = log_likelihood(x2, k_min, n, sum_log);
    while hi - lo > 1e-9 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = log_likelihood(x2, k_min, n, sum_log);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = log_likelihood(x1, k_min, n, sum_log);
        }
    }
    Ok(PowerLawFit {
        exponent: 0.5 * (lo + hi),
        k_min,
        tail_count: tail.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_reference_values() {
        // zeta(2) = pi^2 / 6, zeta(3) = Apery's constant
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((hurwitz_zeta(2.0, 1.0) - pi2_6).abs() < 1e-13);
        assert!((hurwitz_zeta(3.0, 1.0) - 1.202_056_903_159_594_2).abs() < 1e-13);
        // Shift property: zeta(s, q) = q^-s + zeta(s, q + 1)
        let (s, q) = (2.5, 3.0);
        assert!((hurwitz_zeta(s, q) - q.powf(-s) - hurwitz_zeta(s, q + 1.0)).abs() < 1e-13);
    }

    #[test]
    fn recovers_exponent_from_expected_counts() {
        // Deterministic sample with counts proportional to k^-2.5 on 1..=2000.
        let mut values = Vec::new();
        for k in 1u64..=2000 {
            let c = (1e6 * (k as f64).powf(-2.5)).round() as usize;
            values.extend(std::iter::repeat_n(k, c));
        }
        let fit = fit_discrete_tail(values, 1).unwrap();
        assert!((fit.exponent - 2.5).abs() < 0.02, "{fit:?}");
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_discrete_tail(vec![5u64], 1).is_err());
        assert!(fit_discrete_tail(vec![5u64, 6], 0).is_err());
    }
}
