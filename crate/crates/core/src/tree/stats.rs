//! Per-leaf sufficient statistics: Gaussian class-conditional estimators for
//! numeric features, split evaluation by information gain, and naive Bayes
//! scoring.

use alloc::vec;
use alloc::vec::Vec;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Running weight, mean and sum of squared deviations of one feature within
/// one class.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianEstimator {
    pub weight: f64,
    pub mean: f64,
    pub m2: f64,
    pub min: f64,
    pub max: f64,
}

impl GaussianEstimator {
    pub fn add(&mut self, v: f64) {
        if self.weight == 0.0 {
            self.min = v;
            self.max = v;
        } else {
            self.min = self.min.min(v);
            self.max = self.max.max(v);
        }
        self.weight += 1.0;
        let delta = v - self.mean;
        self.mean += delta / self.weight;
        self.m2 += delta * (v - self.mean);
    }

    /// Sample standard deviation (0 with fewer than two observations).
    pub fn stddev(&self) -> f64 {
        if self.weight > 1.0 {
            libm::sqrt((self.m2 / (self.weight - 1.0)).max(0.0))
        } else {
            0.0
        }
    }

    /// Log density at `v`. A zero-variance estimator is a point mass: 0 at
    /// its mean, `-inf` elsewhere.
    pub fn ln_density(&self, v: f64) -> f64 {
        if self.weight == 0.0 {
            return f64::NEG_INFINITY;
        }
        let sd = self.stddev();
        if sd > 0.0 {
            let z = (v - self.mean) / sd;
            -0.5 * z * z - libm::log(sd) - LN_SQRT_2PI
        } else if v == self.mean {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Estimated weight of observations `<= t`.
    pub fn weight_at_or_below(&self, t: f64) -> f64 {
        if self.weight == 0.0 || t < self.min {
            return 0.0;
        }
        if t >= self.max {
            return self.weight;
        }
        let sd = self.stddev();
        if sd > 0.0 {
            let z = (t - self.mean) / sd;
            self.weight * 0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
        } else if self.mean <= t {
            self.weight
        } else {
            0.0
        }
    }
}

/// Class-conditional estimators for one numeric feature.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureObserver {
    pub per_class: Vec<GaussianEstimator>,
}

impl FeatureObserver {
    pub fn new(n_classes: usize) -> Self {
        Self { per_class: vec![GaussianEstimator::default(); n_classes] }
    }

    pub fn observe(&mut self, v: f64, class: usize) {
        self.per_class[class].add(v);
    }

    /// Smallest and largest value seen over all classes.
    pub fn range(&self) -> Option<(f64, f64)> {
        self.per_class.iter().filter(|e| e.weight > 0.0).fold(None, |acc, e| match acc {
            None => Some((e.min, e.max)),
            Some((lo, hi)) => Some((lo.min(e.min), hi.max(e.max))),
        })
    }

    /// `bins` evenly spaced interior thresholds of the observed range.
    pub fn candidate_thresholds(&self, bins: usize) -> Vec<f64> {
        match self.range() {
            Some((lo, hi)) if hi > lo => (0..bins)
                .map(|i| lo + (hi - lo) * (i + 1) as f64 / (bins + 1) as f64)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Estimated class distributions on each side of `value <= t`.
    pub fn split_distributions(&self, t: f64) -> [Vec<f64>; 2] {
        let mut left = vec![0.0; self.per_class.len()];
        let mut right = vec![0.0; self.per_class.len()];
        for (c, e) in self.per_class.iter().enumerate() {
            let l = e.weight_at_or_below(t);
            left[c] = l;
            right[c] = (e.weight - l).max(0.0);
        }
        [left, right]
    }
}

/// Shannon entropy in bits of an unnormalized distribution.
pub fn entropy(dist: &[f64]) -> f64 {
    let total: f64 = dist.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -dist
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            p * libm::log2(p)
        })
        .sum::<f64>()
}

/// Branches with less than this share of the weight do not count as real
/// branches.
pub const MIN_BRANCH_FRACTION: f64 = 0.01;

/// Information gain of splitting `pre` into `branches`; `None` if fewer than
/// two branches carry at least [`MIN_BRANCH_FRACTION`] of the weight.
pub fn info_gain(pre: &[f64], branches: &[Vec<f64>]) -> Option<f64> {
    let totals: Vec<f64> = branches.iter().map(|b| b.iter().sum()).collect();
    let total: f64 = totals.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let real = totals.iter().filter(|&&t| t / total >= MIN_BRANCH_FRACTION).count();
    if real < 2 {
        return None;
    }
    let after: f64 = branches.iter().zip(&totals).map(|(b, &t)| t / total * entropy(b)).sum();
    Some(entropy(pre) - after)
}

/// Best threshold of one feature by information gain.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub merit: f64,
    pub distributions: [Vec<f64>; 2],
}

pub fn best_split(
    feature: usize,
    observer: &FeatureObserver,
    pre: &[f64],
    bins: usize,
) -> Option<SplitCandidate> {
    let mut best: Option<SplitCandidate> = None;
    for t in observer.candidate_thresholds(bins) {
        let dists = observer.split_distributions(t);
        let Some(merit) = info_gain(pre, &dists) else { continue };
        if best.as_ref().is_none_or(|b| merit > b.merit) {
            best = Some(SplitCandidate { feature, threshold: t, merit, distributions: dists });
        }
    }
    best
}

/// Hoeffding bound `sqrt(R^2 ln(1/delta) / (2 n))`.
pub fn hoeffding_bound(range: f64, delta: f64, n: f64) -> f64 {
    libm::sqrt(range * range * libm::log(1.0 / delta) / (2.0 * n))
}

/// Normalize in place; an all-zero vector becomes uniform.
pub fn normalize_votes(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    if total > 0.0 && total.is_finite() {
        v.iter_mut().for_each(|x| *x /= total);
    } else {
        let u = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|x| *x = u);
    }
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Naive Bayes class probabilities under Gaussian class-conditionals.
/// Returns `None` when no class has a finite score.
pub fn naive_bayes(class_counts: &[f64], observers: &[FeatureObserver], x: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = class_counts.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut scores: Vec<f64> = class_counts
        .iter()
        .enumerate()
        .map(|(c, &w)| {
            if w <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let mut s = libm::log(w / total);
            for (obs, &v) in observers.iter().zip(x) {
                s += obs.per_class[c].ln_density(v);
                if s == f64::NEG_INFINITY {
                    break;
                }
            }
            s
        })
        .collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return None;
    }
    for s in scores.iter_mut() {
        *s = libm::exp(*s - max);
    }
    normalize_votes(&mut scores);
    Some(scores)
}
