use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Counts indexed `[truth][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self { counts: vec![vec![0; n_classes]; n_classes] }
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let c = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, got: r.len() });
        }
        Ok(Self { counts: rows })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.counts[truth][predicted] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.n_classes()).map(|c| self.counts[c][c]).sum()
    }

    /// Observed agreement; 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.correct() as f64 / total as f64
        }
    }

    /// Agreement expected from a classifier that predicts independently of
    /// the truth with the same marginals.
    pub fn chance_agreement(&self) -> f64 {
        let total = self.total() as f64;
        (0..self.n_classes())
            .map(|c| {
                let row: u64 = self.counts[c].iter().sum();
                let col: u64 = self.counts.iter().map(|r| r[c]).sum();
                (row as f64 / total) * (col as f64 / total)
            })
            .sum()
    }

    pub fn kappa(&self) -> Result<f64> {
        kappa(self)
    }
}

/// Cohen's kappa `(p_o - p_e) / (1 - p_e)`.
///
/// Evaluated as `(N * trace - S) / (N^2 - S)` with `S = sum_c row_c * col_c`
/// in integer arithmetic, so the only rounding is the final division.
pub fn kappa(confusion: &ConfusionMatrix) -> Result<f64> {
    let n = confusion.total() as i128;
    if n == 0 {
        return Err(Error::Empty("kappa of an empty confusion matrix"));
    }
    let trace = confusion.correct() as i128;
    let c = confusion.n_classes();
    let s: i128 = (0..c)
        .map(|k| {
            let row: u64 = confusion.counts[k].iter().sum();
            let col: u64 = confusion.counts.iter().map(|r| r[k]).sum();
            row as i128 * col as i128
        })
        .sum();
    let num = n * trace - s;
    let den = n * n - s;
    if den == 0 {
        return if trace == n { Ok(1.0) } else { Err(Error::KappaUndefined(confusion.accuracy())) };
    }
    Ok(num as f64 / den as f64)
}
