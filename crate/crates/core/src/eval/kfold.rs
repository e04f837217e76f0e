use alloc::format;

use super::PrequentialReport;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
}

impl MeanStd {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count() as f64;
        // shifted by the first value so identical runs average exactly
        let first = values.clone().next().unwrap_or(0.0);
        let mean = first + values.clone().map(|v| v - first).sum::<f64>() / n;
        let std = if n > 1.0 {
            libm::sqrt(values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0))
        } else {
            0.0
        };
        Self { mean, std }
    }
}

/// Fold-averaged metrics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AggregateReport {
    pub folds: usize,
    pub n_classes: usize,
    pub accuracy: MeanStd,
    pub kappa: MeanStd,
    pub elapsed_seconds: MeanStd,
    pub ram_hours: MeanStd,
}

pub fn kfold_average(runs: &[PrequentialReport]) -> Result<AggregateReport> {
    let first = runs.first().ok_or(Error::Empty("no fold reports to average"))?;
    let n_classes = first.n_classes();
    if let Some(r) = runs.iter().find(|r| r.n_classes() != n_classes) {
        return Err(Error::SchemaMismatch(format!(
            "fold reports mix {} and {} classes",
            n_classes,
            r.n_classes()
        )));
    }
    Ok(AggregateReport {
        folds: runs.len(),
        n_classes,
        accuracy: MeanStd::of(runs.iter().map(|r| r.accuracy)),
        kappa: MeanStd::of(runs.iter().map(|r| r.kappa)),
        elapsed_seconds: MeanStd::of(runs.iter().map(|r| r.elapsed_seconds)),
        ram_hours: MeanStd::of(runs.iter().map(|r| r.ram_hours)),
    })
}
