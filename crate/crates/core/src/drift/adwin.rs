use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::{Error, Result};

pub const DEFAULT_DELTA: f64 = 0.002;
/// Buckets kept per level before the two oldest are merged.
pub const DEFAULT_MAX_BUCKETS: usize = 5;
/// Both sides of a candidate cut must hold at least this many items.
pub const MIN_SUBWINDOW: usize = 5;

/// A run of `count` consecutive items summarized by their sum and their sum
/// of squared deviations from the bucket mean.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bucket {
    pub total: f64,
    pub m2: f64,
    pub count: usize,
}

impl Bucket {
    fn merge(older: Bucket, newer: Bucket) -> Bucket {
        let (n1, n2) = (older.count as f64, newer.count as f64);
        let d = older.total / n1 - newer.total / n2;
        Bucket {
            total: older.total + newer.total,
            m2: older.m2 + newer.m2 + n1 * n2 / (n1 + n2) * d * d,
            count: older.count + newer.count,
        }
    }
}

/// Adaptive windowing over a stream of values in `[0, 1]`.
///
/// The window is stored as an exponential histogram: level `i` holds buckets
/// of `2^i` items, at most `max_buckets` per level. After every insertion all
/// bucket boundaries are tested as cut points; while some cut splits the
/// window into two sub-windows whose means differ by more than
///
/// ```text
/// eps = sqrt(2 (1/n0 + 1/n1) var ln(2 ln n / delta)) + 2/3 (1/n0 + 1/n1) ln(2 ln n / delta)
/// ```
///
/// the oldest bucket is dropped.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Adwin {
    delta: f64,
    max_buckets: usize,
    /// `levels[i]` is ordered oldest (front) to newest (back).
    levels: Vec<VecDeque<Bucket>>,
    total: f64,
    /// Sum of squared deviations from the window mean.
    m2: f64,
    width: usize,
    detections: u64,
}

impl Default for Adwin {
    fn default() -> Self {
        Self::new(DEFAULT_DELTA).expect("default delta is valid")
    }
}

impl Adwin {
    pub fn new(delta: f64) -> Result<Self> {
        Self::with_capacity(delta, DEFAULT_MAX_BUCKETS)
    }

    pub fn with_capacity(delta: f64, max_buckets: usize) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid(alloc::format!("ADWIN delta {delta} outside (0, 1)")));
        }
        if max_buckets < 2 {
            return Err(Error::invalid("ADWIN needs at least two buckets per level"));
        }
        Ok(Self {
            delta,
            max_buckets,
            levels: Vec::new(),
            total: 0.0,
            m2: 0.0,
            width: 0,
            detections: 0,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn max_buckets(&self) -> usize {
        self.max_buckets
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Population variance of the window.
    pub fn variance(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            self.m2 / self.width as f64
        }
    }

    pub fn detections(&self) -> u64 {
        self.detections
    }

    pub fn bucket_count(&self) -> usize {
        self.levels.iter().map(VecDeque::len).sum()
    }

    /// Buckets from oldest to newest.
    pub fn buckets(&self) -> impl Iterator<Item = &Bucket> {
        self.levels.iter().rev().flat_map(|l| l.iter())
    }

    pub fn mean(&self) -> Result<f64> {
        if self.width == 0 {
            return Err(Error::Empty("ADWIN window is empty"));
        }
        Ok(self.total / self.width as f64)
    }

    /// Window mean, or 0 for an empty window.
    pub fn estimate(&self) -> f64 {
        self.mean().unwrap_or(0.0)
    }

    /// Append a value and shrink the window while a cut is significant.
    /// Returns whether any cut happened.
    pub fn add(&mut self, value: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfUnitRange(value));
        }
        self.insert(value);
        let mut changed = false;
        while self.find_cut() {
            self.drop_oldest();
            changed = true;
        }
        if changed {
            self.detections += 1;
        }
        Ok(changed)
    }

    pub fn reset(&mut self) {
        self.levels.clear();
        self.total = 0.0;
        self.m2 = 0.0;
        self.width = 0;
    }

    fn insert(&mut self, value: f64) {
        if self.width > 0 {
            let mean = self.total / self.width as f64;
            let w = self.width as f64;
            self.m2 += w / (w + 1.0) * (value - mean) * (value - mean);
        }
        self.total += value;
        self.width += 1;
        if self.levels.is_empty() {
            self.levels.push(VecDeque::new());
        }
        self.levels[0].push_back(Bucket { total: value, m2: 0.0, count: 1 });
        let mut level = 0;
        while self.levels[level].len() > self.max_buckets {
            let older = self.levels[level].pop_front().unwrap();
            let newer = self.levels[level].pop_front().unwrap();
            if self.levels.len() == level + 1 {
                self.levels.push(VecDeque::new());
            }
            self.levels[level + 1].push_back(Bucket::merge(older, newer));
            level += 1;
        }
    }

    fn drop_oldest(&mut self) {
        let Some(level) = self.levels.iter().rposition(|l| !l.is_empty()) else {
            return;
        };
        let bucket = self.levels[level].pop_front().unwrap();
        while self.levels.last().is_some_and(VecDeque::is_empty) {
            self.levels.pop();
        }
        self.width -= bucket.count;
        self.total -= bucket.total;
        if self.width == 0 {
            self.total = 0.0;
            self.m2 = 0.0;
            return;
        }
        let n1 = bucket.count as f64;
        let w = self.width as f64;
        let d = bucket.total / n1 - self.total / w;
        self.m2 -= bucket.m2 + n1 * w / (n1 + w) * d * d;
        if self.m2 < 0.0 {
            self.m2 = 0.0;
        }
    }

    fn find_cut(&self) -> bool {
        if self.width < 2 * MIN_SUBWINDOW {
            return false;
        }
        let n = self.width as f64;
        let variance = self.variance();
        let log_term = libm::log(2.0 * libm::log(n) / self.delta);
        let mut n0 = 0usize;
        let mut sum0 = 0.0;
        for bucket in self.buckets() {
            n0 += bucket.count;
            sum0 += bucket.total;
            let n1 = self.width - n0;
            if n1 < MIN_SUBWINDOW {
                break;
            }
            if n0 < MIN_SUBWINDOW {
                continue;
            }
            let mean0 = sum0 / n0 as f64;
            let mean1 = (self.total - sum0) / n1 as f64;
            let inv = 1.0 / n0 as f64 + 1.0 / n1 as f64;
            let eps = libm::sqrt(2.0 * inv * variance * log_term) + 2.0 / 3.0 * inv * log_term;
            if libm::fabs(mean0 - mean1) > eps {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_windows() {
        let mut a = Adwin::default();
        assert!(a.mean().is_err());
        a.add(1.0).unwrap();
        assert_eq!(a.mean().unwrap(), 1.0);
        let mut a = Adwin::default();
        a.add(0.0).unwrap();
        a.add(1.0).unwrap();
        assert_eq!(a.mean().unwrap(), 0.5);
    }

    #[test]
    fn rejects_out_of_range() {
        let mut a = Adwin::default();
        assert_eq!(a.add(1.5), Err(Error::OutOfUnitRange(1.5)));
        assert!(a.add(f64::NAN).is_err());
        assert!(Adwin::new(0.0).is_err());
        assert!(Adwin::new(1.0).is_err());
    }

    #[test]
    fn constant_stream_never_cuts() {
        let mut a = Adwin::default();
        for _ in 0..10_000 {
            assert!(!a.add(0.5).unwrap());
        }
        assert_eq!(a.width(), 10_000);
        assert!((a.mean().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bucket_counts_are_powers_of_two() {
        let mut a = Adwin::default();
        for i in 0..1000 {
            a.add((i % 2) as f64).unwrap();
        }
        for (lvl, l) in a.levels.iter().enumerate() {
            assert!(l.len() <= a.max_buckets);
            assert!(l.iter().all(|b| b.count == 1 << lvl));
        }
        assert_eq!(a.buckets().map(|b| b.count).sum::<usize>(), a.width());
    }

    #[test]
    fn abrupt_step_is_detected() {
        let mut a = Adwin::default();
        for _ in 0..500 {
            a.add(0.0).unwrap();
        }
        let mut hit = None;
        for t in 0..200 {
            if a.add(1.0).unwrap() {
                hit = Some(t);
                break;
            }
        }
        assert!(hit.is_some());
    }
}
