//! Prequential evaluation and the synthetic streams used to validate the
//! detectors and the tree.

mod kfold;
mod metrics;
mod prequential;
mod stream;

use alloc::vec::Vec;

pub use kfold::{kfold_average, AggregateReport, MeanStd};
pub use metrics::{kappa, ConfusionMatrix};
pub use prequential::{
    prequential_run, Clock, NullClock, PrequentialReport, ReportBuilder, Snapshot, StepClock,
    BYTES_PER_GB,
};
pub use stream::{gen_stream, Generator, StreamSpec};

use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: usize,
    /// Class probabilities, summing to one.
    pub scores: Vec<f64>,
}

/// An incremental classifier evaluated test-then-train.
pub trait Classifier {
    fn n_classes(&self) -> usize;
    fn predict(&self, x: &[f64]) -> Result<Prediction>;
    fn learn(&mut self, x: &[f64], y: usize) -> Result<()>;
    /// Current model size in bytes, for the RAM-hours cost.
    fn model_bytes(&self) -> u64 {
        0
    }
}
