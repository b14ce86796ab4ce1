use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Moments of a replication sample with jackknife standard errors and a
/// Kolmogorov–Smirnov p-value against the normal law with fitted mean and
/// variance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub reps: usize,
    pub mean: f64,
    /// Unbiased (`1/(reps-1)`) sample variance.
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    pub se_skewness: f64,
    pub se_excess_kurtosis: f64,
    /// Asymptotic Kolmogorov p-value. Fitting the parameters makes it
    /// conservative.
    pub normality_p_value: f64,
}

#[derive(Clone, Copy)]
struct Moments {
    mean: f64,
    variance: f64,
    skewness: f64,
    excess_kurtosis: f64,
}

/// Moments from power sums `s[k] = Σ (x - c)^k` of `count` values.
fn moments(c: f64, count: f64, s: [f64; 4]) -> Moments {
    let [s1, s2, s3, s4] = s.map(|v| v / count);
    let a = s1;
    let m2 = s2 - a * a;
    let m3 = s3 - 3.0 * a * s2 + 2.0 * a.powi(3);
    let m4 = s4 - 4.0 * a * s3 + 6.0 * a * a * s2 - 3.0 * a.powi(4);
    Moments {
        mean: c + a,
        variance: m2 * count / (count - 1.0),
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    }
}

fn jackknife_se(full: &[f64]) -> f64 {
    let n = full.len() as f64;
    let mean = full.iter().sum::<f64>() / n;
    ((n - 1.0) / n * full.iter().map(|v| (v - mean).powi(2)).sum::<f64>()).sqrt()
}

impl SummaryStats {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let reps = samples.len();
        if reps < 3 {
            return Err(Error::InvalidConfig(format!("need at least 3 samples, got {reps}")));
        }
        if let Some(v) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite sample {v}")));
        }
        let count = reps as f64;
        let c = samples.iter().sum::<f64>() / count;
        let mut sums = [0.0; 4];
        for &x in samples {
            let d = x - c;
            sums[0] += d;
            sums[1] += d * d;
            sums[2] += d * d * d;
            sums[3] += d * d * d * d;
        }
        let full = moments(c, count, sums);
        if !(full.variance > 0.0) {
            return Err(Error::InvalidConfig("samples have zero variance".into()));
        }

        let mut loo =
            [Vec::with_capacity(reps), Vec::with_capacity(reps), Vec::with_capacity(reps), Vec::with_capacity(reps)];
        for &x in samples {
            let d = x - c;
            let m =
                moments(c, count - 1.0, [sums[0] - d, sums[1] - d * d, sums[2] - d * d * d, sums[3] - d * d * d * d]);
            loo[0].push(m.mean);
            loo[1].push(m.variance);
            loo[2].push(m.skewness);
            loo[3].push(m.excess_kurtosis);
        }

        Ok(Self {
            reps,
            mean: samples.iter().sum::<f64>() / count,
            variance: full.variance,
            skewness: full.skewness,
            excess_kurtosis: full.excess_kurtosis,
            se_mean: jackknife_se(&loo[0]),
            se_variance: jackknife_se(&loo[1]),
            se_skewness: jackknife_se(&loo[2]),
            se_excess_kurtosis: jackknife_se(&loo[3]),
            normality_p_value: ks_normal_p_value(samples, full.mean, full.variance.sqrt()),
        })
    }
}

/// Kolmogorov survival function `P(K > λ)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, effective_n: f64) -> f64 {
    let sn = effective_n.sqrt();
    kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// One-sample KS p-value against `N(mean, sd²)`.
pub fn ks_normal_p_value(samples: &[f64], mean: f64, sd: f64) -> f64 {
    let normal = match Normal::new(mean, sd) {
        Ok(n) => n,
        Err(_) => return 0.0,
    };
    let x = sorted(samples);
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = normal.cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    ks_p_value(d, n)
}

/// Two-sample KS p-value.
pub fn ks_two_sample_p_value(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0_f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    ks_p_value(d, na * nb / (na + nb))
}
