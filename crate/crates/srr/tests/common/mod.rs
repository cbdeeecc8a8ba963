//! Shared statistical machinery for the integration suites: chi-squared
//! and Kolmogorov-Smirnov tests, moment helpers, and a deterministic
//! test-data generator built on the crate's own keyed streams.

// Each test binary uses its own subset of these helpers.
#![allow(dead_code)]

use srr::prng::{uniform_at, GeneratorKey};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Deterministic generator for test data, independent of the streams the
/// pipeline itself consumes.
pub struct TestRng {
    key: GeneratorKey,
    counter: u64,
}

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: GeneratorKey::new(0x7e57_0000_0000_0000_0000 + seed as u128, 0xffff),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = uniform_at(self.key, self.counter);
        self.counter += 1;
        v
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        self.next_u64() % bound
    }

    pub fn next_u128(&mut self) -> u128 {
        (self.next_u64() as u128) | ((self.next_u64() as u128) << 64)
    }

    /// `count` distinct values below `bound`, ascending.
    pub fn distinct_sorted(&mut self, count: usize, bound: u64) -> Vec<u64> {
        assert!(count as u64 <= bound);
        let mut picked = std::collections::BTreeSet::new();
        while picked.len() < count {
            picked.insert(self.next_below(bound));
        }
        picked.into_iter().collect()
    }
}

/// Pearson chi-squared statistic for observed counts against expected
/// probabilities (which must sum to 1).
pub fn chi2_stat(observed: &[u64], expected_probs: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected_probs.len());
    let total: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(expected_probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

/// Upper critical value of the chi-squared distribution: the test passes
/// when the statistic stays below `chi2_threshold(dof, significance)`.
pub fn chi2_threshold(dof: usize, significance: f64) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("valid dof")
        .inverse_cdf(1.0 - significance)
}

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic, with the Stephens
/// small-sample correction).
pub fn ks_2sample_pvalue(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.total_cmp(q));
    ys.sort_by(|p, q| p.total_cmp(q));
    let (n1, n2) = (xs.len(), ys.len());
    assert!(n1 > 0 && n2 > 0);

    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n1 && j < n2 {
        let x = xs[i].min(ys[j]);
        while i < n1 && xs[i] <= x {
            i += 1;
        }
        while j < n2 && ys[j] <= x {
            j += 1;
        }
        let f1 = i as f64 / n1 as f64;
        let f2 = j as f64 / n2 as f64;
        d = d.max((f1 - f2).abs());
    }

    let ne = (n1 as f64 * n2 as f64) / (n1 as f64 + n2 as f64);
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    kolmogorov_sf(lambda)
}

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 * sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2)`.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64).powi(2) * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample mean and the standard error of that mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0);
    (m, (var / xs.len() as f64).sqrt())
}

/// Three-sigma band around a binomial proportion.
pub fn binomial_3sigma(p: f64, trials: u64) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let mid = xs.len() / 2;
    if xs.len() % 2 == 0 {
        (xs[mid - 1] + xs[mid]) / 2.0
    } else {
        xs[mid]
    }
}

/// Ordinary least squares fit `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
