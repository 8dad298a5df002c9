//! Small descriptive-statistics helpers used by the verification harness.

use serde::{Deserialize, Serialize};

/// Two-sided standard normal quantile for 99% intervals.
pub const Z99: f64 = 2.575_829_303_548_901;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Standard error of the mean.
pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Sample moments of a standardized sample with large-sample standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub skewness: f64,
    pub skewness_se: f64,
    pub excess_kurtosis: f64,
    pub excess_kurtosis_se: f64,
}

pub fn moments(xs: &[f64]) -> Moments {
    let n = xs.len() as f64;
    let m = mean(xs);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let var = m2 * n / (n - 1.0);
    Moments {
        n: xs.len(),
        mean: m,
        mean_se: (var / n).sqrt(),
        variance: var,
        variance_se: ((m4 - m2 * m2) / n).sqrt(),
        skewness: m3 / m2.powf(1.5),
        skewness_se: (6.0 / n).sqrt(),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
        excess_kurtosis_se: (24.0 / n).sqrt(),
    }
}

/// Sample autocorrelation at lags `1..=max_lag`.
pub fn acf(xs: &[f64], max_lag: usize) -> Vec<f64> {
    let m = mean(xs);
    let denom: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (1..=max_lag)
        .map(|lag| {
            if lag >= xs.len() || denom == 0.0 {
                return 0.0;
            }
            xs.iter().zip(&xs[lag..]).map(|(a, b)| (a - m) * (b - m)).sum::<f64>() / denom
        })
        .collect()
}

/// Sums of consecutive non-overlapping blocks of `width` values.
pub fn aggregate(xs: &[f64], width: usize) -> Vec<f64> {
    xs.chunks_exact(width).map(|c| c.iter().sum()).collect()
}

/// Linear-interpolated quantile of an unsorted sample.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Batch-means standard error of the mean for an autocorrelated series.
pub fn batch_means_se(xs: &[f64], batches: usize) -> f64 {
    let width = xs.len() / batches;
    let means: Vec<f64> = xs.chunks_exact(width).map(mean).collect();
    std_error(&means)
}

/// One-sample Kolmogorov–Smirnov statistic against a continuous CDF.
pub fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the KS statistic `d` for sample size `n`.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = 2.0 * (-1f64).powf(j - 1.0) * (-2.0 * j * j * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// True if every entry is strictly below its predecessor.
pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
        let m = moments(&xs);
        assert!(m.skewness.abs() < 1e-15);
        assert_eq!(median(&xs), 2.5);
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);
    }

    #[test]
    fn acf_of_alternating_series() {
        let xs: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = acf(&xs, 2);
        assert!((r[0] + 1.0).abs() < 1e-2);
        assert!((r[1] - 1.0).abs() < 1e-2);
        assert_eq!(aggregate(&xs, 2), vec![0.0; 500]);
    }

    #[test]
    fn ks_uniform_grid() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&xs, |x| x);
        assert!(d <= 0.0005 + 1e-12);
        assert!(ks_p_value(d, xs.len()) > 0.99);
        assert!(ks_p_value(0.1, 1000) < 1e-6);
    }

    #[test]
    fn decreasing() {
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
        assert!(!strictly_decreasing(&[3.0, 3.0, 1.0]));
    }
}
