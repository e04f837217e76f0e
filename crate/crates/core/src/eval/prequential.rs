use alloc::vec::Vec;

use super::{Classifier, ConfusionMatrix};
use crate::{Error, Result};

/// RAM-hours are reported in gigabyte-hours with 1 GB = 2^30 bytes.
pub const BYTES_PER_GB: f64 = 1_073_741_824.0;

/// Source of elapsed wall time in seconds.
pub trait Clock {
    fn now(&mut self) -> f64;
}

/// A clock that never advances; runs measured with it report zero time and
/// zero RAM-hours.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now(&mut self) -> f64 {
        0.0
    }
}

/// A clock that advances by a fixed step on every reading.
#[derive(Debug, Clone, Copy)]
pub struct StepClock {
    pub t: f64,
    pub step: f64,
}

impl Clock for StepClock {
    fn now(&mut self) -> f64 {
        let t = self.t;
        self.t += self.step;
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Snapshot {
    /// Number of instances evaluated so far.
    pub instance: u64,
    pub accuracy: f64,
    pub kappa: f64,
    pub model_bytes: u64,
    pub elapsed_seconds: f64,
    /// Cumulative RAM-hours up to this snapshot.
    pub ram_hours: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrequentialReport {
    pub n_evaluated: u64,
    pub accuracy: f64,
    pub kappa: f64,
    pub confusion: ConfusionMatrix,
    pub elapsed_seconds: f64,
    pub ram_hours: f64,
    pub trace: Vec<Snapshot>,
}

impl PrequentialReport {
    pub fn n_classes(&self) -> usize {
        self.confusion.n_classes()
    }
}

/// Accumulates `(predicted, truth)` pairs into a report. Prequential runs
/// drive it; a logged prediction sequence can be replayed through it.
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    confusion: ConfusionMatrix,
    snapshot_every: u64,
    trace: Vec<Snapshot>,
    start: f64,
    last_time: f64,
    last_bytes: u64,
    ram_hours: f64,
}

impl ReportBuilder {
    /// `start` is the clock reading and `bytes` the model size when the run
    /// begins.
    pub fn new(n_classes: usize, snapshot_every: u64, start: f64, bytes: u64) -> Result<Self> {
        if snapshot_every == 0 {
            return Err(Error::invalid("snapshot interval must be positive"));
        }
        Ok(Self {
            confusion: ConfusionMatrix::new(n_classes),
            snapshot_every,
            trace: Vec::new(),
            start,
            last_time: start,
            last_bytes: bytes,
            ram_hours: 0.0,
        })
    }

    pub fn record(&mut self, predicted: usize, truth: usize) -> Result<()> {
        let c = self.confusion.n_classes();
        if truth >= c {
            return Err(Error::LabelOutOfRange { label: truth, classes: c });
        }
        if predicted >= c {
            return Err(Error::LabelOutOfRange { label: predicted, classes: c });
        }
        self.confusion.record(truth, predicted);
        Ok(())
    }

    pub fn due(&self) -> bool {
        self.confusion.total().is_multiple_of(self.snapshot_every)
    }

    pub fn evaluated(&self) -> u64 {
        self.confusion.total()
    }

    /// Close a trace interval at clock reading `now` with model size
    /// `bytes`, integrating the size by the trapezoid rule.
    pub fn snapshot(&mut self, now: f64, bytes: u64) -> Result<()> {
        let n = self.confusion.total();
        let dt_hours = (now - self.last_time).max(0.0) / 3600.0;
        self.ram_hours += 0.5 * (self.last_bytes + bytes) as f64 / BYTES_PER_GB * dt_hours;
        self.last_time = now;
        self.last_bytes = bytes;
        let snap = Snapshot {
            instance: n,
            accuracy: self.confusion.accuracy(),
            kappa: self.confusion.kappa()?,
            model_bytes: bytes,
            elapsed_seconds: now - self.start,
            ram_hours: self.ram_hours,
        };
        // a second reading at the same instance extends the last entry
        match self.trace.last_mut() {
            Some(last) if last.instance == n => *last = snap,
            _ => self.trace.push(snap),
        }
        Ok(())
    }

    pub fn finish(mut self, now: f64, bytes: u64) -> Result<PrequentialReport> {
        if self.confusion.total() == 0 {
            return Err(Error::Empty("prequential run saw no instances"));
        }
        self.snapshot(now, bytes)?;
        let last = self.trace.last().expect("final snapshot");
        Ok(PrequentialReport {
            n_evaluated: self.confusion.total(),
            accuracy: last.accuracy,
            kappa: last.kappa,
            elapsed_seconds: last.elapsed_seconds,
            ram_hours: last.ram_hours,
            confusion: self.confusion,
            trace: self.trace,
        })
    }
}

/// Test-then-train over `stream`: each instance is predicted first, the
/// prediction is recorded, and only then is the model trained on it.
pub fn prequential_run<M, X, I>(
    model: &mut M,
    stream: I,
    snapshot_every: u64,
    clock: &mut impl Clock,
) -> Result<PrequentialReport>
where
    M: Classifier + ?Sized,
    X: AsRef<[f64]>,
    I: IntoIterator<Item = (X, usize)>,
{
    let start = clock.now();
    let mut report = ReportBuilder::new(model.n_classes(), snapshot_every, start, model.model_bytes())?;
    for (i, (x, y)) in stream.into_iter().enumerate() {
        let x = x.as_ref();
        let predicted = model.predict(x).map_err(|e| Error::at(i, e))?.label;
        report.record(predicted, y).map_err(|e| Error::at(i, e))?;
        model.learn(x, y).map_err(|e| Error::at(i, e))?;
        if report.due() {
            let now = clock.now();
            report.snapshot(now, model.model_bytes())?;
        }
    }
    let now = clock.now();
    report.finish(now, model.model_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Prediction;
    use alloc::vec;

    struct Constant(usize);

    impl Classifier for Constant {
        fn n_classes(&self) -> usize {
            2
        }
        fn predict(&self, _: &[f64]) -> Result<Prediction> {
            Ok(Prediction { label: self.0, scores: vec![0.5, 0.5] })
        }
        fn learn(&mut self, _: &[f64], _: usize) -> Result<()> {
            Ok(())
        }
        fn model_bytes(&self) -> u64 {
            1 << 30
        }
    }

    #[test]
    fn empty_stream_errors() {
        let empty: Vec<(Vec<f64>, usize)> = Vec::new();
        assert!(prequential_run(&mut Constant(0), empty, 10, &mut NullClock).is_err());
    }

    #[test]
    fn constant_model_on_balanced_stream() {
        let stream = (0..100).map(|i| (vec![0.0], i % 2));
        let r = prequential_run(&mut Constant(1), stream, 10, &mut NullClock).unwrap();
        assert_eq!(r.accuracy, 0.5);
        assert_eq!(r.kappa, 0.0);
        assert_eq!(r.trace.len(), 10);
        assert_eq!(r.ram_hours, 0.0);
        assert_eq!(r.elapsed_seconds, 0.0);
    }

    #[test]
    fn ram_hours_integrate_constant_size() {
        let stream = (0..10).map(|i| (vec![0.0], i % 2));
        // one hour per clock reading: start, 10 snapshots, final => 11 h
        let mut clock = StepClock { t: 0.0, step: 3600.0 };
        let r = prequential_run(&mut Constant(0), stream, 1, &mut clock).unwrap();
        assert!((r.ram_hours - 11.0).abs() < 1e-12);
        assert_eq!(r.elapsed_seconds, 39_600.0);
        assert_eq!(r.trace.len(), 10);
    }
}
