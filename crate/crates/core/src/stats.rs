//! Small descriptive and test statistics shared across modules.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator); zero below two values.
pub fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|x| (x - m).powi(2)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Standard error of the mean, `sd / sqrt(n)`; zero below two values.
pub fn sem(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    sample_sd(values) / (values.len() as f64).sqrt()
}

/// Linear-interpolation quantile (R type 7) of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mid-rank percentile of `x` within `values`, in `[0, 1]`.
pub fn percentile_rank(values: &[f64], x: f64) -> f64 {
    let below = values.iter().filter(|&&v| v < x).count() as f64;
    let equal = values.iter().filter(|&&v| v == x).count() as f64;
    (below + 0.5 * equal) / values.len() as f64
}

/// Upper tail of the standard normal.
pub fn normal_sf(z: f64) -> f64 {
    Normal::standard().sf(z)
}

/// Two-sided p-value of the pooled two-proportion z-test of `x1/n1` vs
/// `x2/n2`. Returns 1 when the pooled variance is zero.
pub fn two_proportion_p_value(x1: usize, n1: usize, x2: usize, n2: usize) -> f64 {
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1f + n2f);
    let var = pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f);
    if var <= 0.0 {
        return 1.0;
    }
    let z = (x1 as f64 / n1f - x2 as f64 / n2f) / var.sqrt();
    (2.0 * normal_sf(z.abs())).min(1.0)
}

/// Two-sided Welch t-test p-value. Returns 1 when either sample has fewer
/// than two values or both variances vanish.
pub fn welch_p_value(a: &[f64], b: &[f64]) -> f64 {
    if a.len() < 2 || b.len() < 2 {
        return 1.0;
    }
    let (va, vb) = (sample_sd(a).powi(2), sample_sd(b).powi(2));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se2 = va / na + vb / nb;
    if se2 <= 0.0 {
        return 1.0;
    }
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2.powi(2) / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sem_matches_definition() {
        let v = [1.0, 2.0, 3.0, 4.0];
        let sd = (5.0_f64 / 3.0).sqrt();
        assert!((sample_sd(&v) - sd).abs() < 1e-15);
        assert!((sem(&v) - sd / 2.0).abs() < 1e-15);
        assert_eq!(sem(&[3.0]), 0.0);
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&v, 0.5), 3.0);
        assert_eq!(quantile_sorted(&v, 0.25), 2.0);
        assert!((quantile_sorted(&v, 0.1) - 1.4).abs() < 1e-12);
        assert_eq!(percentile_rank(&v, 3.0), 0.5);
        assert_eq!(percentile_rank(&v, 0.0), 0.0);
    }

    #[test]
    fn proportion_test_reference_value() {
        // 30/100 vs 10/100: pooled 0.2, se = sqrt(0.2*0.8*0.02) = 0.05657, z = 3.5355
        let p = two_proportion_p_value(30, 100, 10, 100);
        assert!((p - 4.0695e-4).abs() < 1e-7, "{p}");
        assert_eq!(two_proportion_p_value(0, 10, 0, 10), 1.0);
        assert_eq!(two_proportion_p_value(5, 10, 5, 10), 1.0);
    }

    #[test]
    fn welch_symmetric_case() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(welch_p_value(&a, &a), 1.0);
        let b = [11.0, 12.0, 13.0];
        assert!(welch_p_value(&a, &b) < 1e-3);
    }
}
