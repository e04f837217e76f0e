use crate::{Error, Result};

/// Thresholds are not evaluated before this many instances since the last
/// reset.
pub const DDM_MIN_INSTANCES: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DdmLevel {
    Stable,
    Warning,
    Drift,
}

/// Drift detection on a stream of 0/1 errors.
///
/// Tracks the error rate `p` and `s = sqrt(p (1 - p) / i)` since the last
/// reset, remembers the point where `p + s` was smallest, and signals a
/// warning when `p + s > p_min + 2 s_min` and a drift when
/// `p + s > p_min + 3 s_min`. A drift resets the statistics. Instance
/// indices `k_w` and `k_d` are counted over the whole stream, starting at 1.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ddm {
    min_instances: u64,
    warning_level: f64,
    drift_level: f64,
    seen: u64,
    n: u64,
    errors: u64,
    p: f64,
    s: f64,
    minimum: Option<(f64, f64)>,
    level: DdmLevel,
    warning_start: Option<u64>,
    last_episode: Option<(u64, u64)>,
    drifts: u64,
}

impl Default for Ddm {
    fn default() -> Self {
        Self::new()
    }
}

impl Ddm {
    pub fn new() -> Self {
        Self::with_levels(DDM_MIN_INSTANCES, 2.0, 3.0)
    }

    pub fn with_levels(min_instances: u64, warning_level: f64, drift_level: f64) -> Self {
        Self {
            min_instances,
            warning_level,
            drift_level,
            seen: 0,
            n: 0,
            errors: 0,
            p: 0.0,
            s: 0.0,
            minimum: None,
            level: DdmLevel::Stable,
            warning_start: None,
            last_episode: None,
            drifts: 0,
        }
    }

    /// Instances since the last reset.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn errors(&self) -> u64 {
        self.errors
    }

    /// Instances over the detector's whole life.
    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p_min(&self) -> Option<f64> {
        self.minimum.map(|m| m.0)
    }

    pub fn s_min(&self) -> Option<f64> {
        self.minimum.map(|m| m.1)
    }

    pub fn level(&self) -> DdmLevel {
        self.level
    }

    pub fn drifts(&self) -> u64 {
        self.drifts
    }

    /// Index where the current warning phase started, if one is open.
    pub fn warning_start(&self) -> Option<u64> {
        self.warning_start
    }

    pub fn add(&mut self, error: bool) -> DdmLevel {
        self.seen += 1;
        self.n += 1;
        self.errors += u64::from(error);
        self.p = self.errors as f64 / self.n as f64;
        self.s = libm::sqrt(self.p * (1.0 - self.p) / self.n as f64);

        if self.n < self.min_instances {
            self.level = DdmLevel::Stable;
            return self.level;
        }
        let current = self.p + self.s;
        if self.minimum.is_none_or(|(pm, sm)| current < pm + sm) {
            self.minimum = Some((self.p, self.s));
        }
        let (p_min, s_min) = self.minimum.unwrap();

        self.level = if current > p_min + self.drift_level * s_min {
            let k_d = self.seen;
            let k_w = self.warning_start.unwrap_or(k_d);
            self.last_episode = Some((k_w, k_d));
            self.drifts += 1;
            self.restart();
            DdmLevel::Drift
        } else if current > p_min + self.warning_level * s_min {
            self.warning_start.get_or_insert(self.seen);
            DdmLevel::Warning
        } else {
            self.warning_start = None;
            DdmLevel::Stable
        };
        self.level
    }

    /// `(k_w, k_d)` of the most recent drift.
    pub fn context_window(&self) -> Result<(u64, u64)> {
        self.last_episode.ok_or(Error::NoDrift)
    }

    /// Clear the running statistics; the stream counter and the last
    /// drift episode are kept.
    pub fn restart(&mut self) {
        self.n = 0;
        self.errors = 0;
        self.p = 0.0;
        self.s = 0.0;
        self.minimum = None;
        self.warning_start = None;
    }
}
