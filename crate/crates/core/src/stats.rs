//! Small statistics helpers: fixed-edge histograms and the two-sample
//! Kolmogorov-Smirnov test used for distribution-matching checks.

use serde::{Deserialize, Serialize};

/// Counts over half-open bins `[edges[i], edges[i+1])`; the last bin is
/// closed. Values outside the edges clamp into the end bins so total mass
/// always equals the number of values offered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(edges: Vec<f64>) -> Histogram {
        assert!(edges.len() >= 2, "need at least two edges");
        assert!(edges.windows(2).all(|w| w[0] < w[1]), "edges must increase");
        let bins = edges.len() - 1;
        Histogram {
            edges,
            counts: vec![0; bins],
        }
    }

    pub fn push(&mut self, value: f64) {
        let bins = self.counts.len();
        let idx = self.edges.partition_point(|&e| e <= value);
        // idx = 0 means below the first edge; idx = edges.len() above the last.
        let bin = idx.saturating_sub(1).min(bins - 1);
        self.counts[bin] += 1;
    }

    pub fn from_values(values: impl IntoIterator<Item = f64>, edges: Vec<f64>) -> Histogram {
        let mut h = Histogram::new(edges);
        for v in values {
            h.push(v);
        }
        h
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Index of the bin a value lands in.
    pub fn bin_of(&self, value: f64) -> usize {
        self.edges
            .partition_point(|&e| e <= value)
            .saturating_sub(1)
            .min(self.counts.len() - 1)
    }
}

pub fn linear_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    assert!(bins >= 1 && hi > lo);
    (0..=bins)
        .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
        .collect()
}

/// Two-sample Kolmogorov-Smirnov statistic: the supremum distance between
/// the empirical distribution functions.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs non-empty samples");
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    ys.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value of the two-sample KS statistic (Kolmogorov
/// distribution with the standard small-sample correction).
pub fn ks_p_value(statistic: f64, n_a: usize, n_b: usize) -> f64 {
    let ne = (n_a as f64 * n_b as f64) / (n_a + n_b) as f64;
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * statistic;
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64 * lambda).powi(2)).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn histogram_mass_is_preserved() {
        let mut h = Histogram::new(linear_edges(0.0, 1.0, 10));
        for v in [-0.5, 0.0, 0.05, 0.5, 0.999, 1.0, 2.0] {
            h.push(v);
        }
        assert_eq!(h.total(), 7);
        assert_eq!(h.counts[0], 3, "below-range and first-bin values");
        assert_eq!(h.counts[9], 3, "last bin, top edge, and above-range values");
    }

    #[test]
    fn ks_statistic_matches_hand_computation() {
        // F1 steps at 1, 2, 3; F2 at 1.5, 2.5, 3.5. Max gap is 1/3.
        let d = ks_statistic(&[1.0, 2.0, 3.0], &[1.5, 2.5, 3.5]);
        assert!((d - 1.0 / 3.0).abs() < 1e-12, "{d}");
        // Identical samples: zero distance, p-value one.
        let d0 = ks_statistic(&[1.0, 2.0], &[1.0, 2.0]);
        assert_eq!(d0, 0.0);
        assert_eq!(ks_p_value(d0, 2, 2), 1.0);
        // Fully separated samples: distance one.
        let d1 = ks_statistic(&[0.0, 0.1], &[5.0, 6.0]);
        assert_eq!(d1, 1.0);
    }

    #[test]
    fn ks_same_distribution_has_high_p() {
        let mut rng = crate::rng::rng_from(2);
        let a: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..1.0)).collect();
        let d = ks_statistic(&a, &b);
        let p = ks_p_value(d, a.len(), b.len());
        assert!(p > 0.01, "same-distribution p-value {p} (d = {d})");
    }

    #[test]
    fn ks_different_distributions_have_low_p() {
        let mut rng = crate::rng::rng_from(3);
        let a: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..1000).map(|_| rng.random_range(0.25..1.25)).collect();
        let p = ks_p_value(ks_statistic(&a, &b), 1000, 1000);
        assert!(p < 1e-6, "shifted distribution p-value {p}");
    }

    #[test]
    fn median_and_mean() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
        assert_eq!(mean(&[1.0, 2.0, 3.0]), Some(2.0));
    }
}
