//! Instances, schemas and the preprocessing applied before dictionary
//! learning: z-score normalization, labeled sampling and bad-data injection.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};

use crate::{seed, Error, Result};

/// Standard deviation, in normalized units, of the Gaussian that replaces
/// the features of a corrupted instance.
pub const BAD_DATA_STDDEV: f64 = 3.0;

/// One measurement row. Labels are zero-based class indices.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Instance {
    pub features: Vec<f64>,
    pub label: Option<usize>,
}

impl Instance {
    pub fn labeled(features: Vec<f64>, label: usize) -> Self {
        Self { features, label: Some(label) }
    }

    pub fn unlabeled(features: Vec<f64>) -> Self {
        Self { features, label: None }
    }

    pub fn width(&self) -> usize {
        self.features.len()
    }
}

impl AsRef<[f64]> for Instance {
    fn as_ref(&self) -> &[f64] {
        &self.features
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetSchema {
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl DatasetSchema {
    pub fn new(feature_names: Vec<String>, class_names: Vec<String>) -> Result<Self> {
        if feature_names.is_empty() {
            return Err(Error::invalid("schema needs at least one feature"));
        }
        if class_names.len() < 2 {
            return Err(Error::invalid(format!(
                "schema needs at least two classes, got {}",
                class_names.len()
            )));
        }
        Ok(Self { feature_names, class_names })
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == name)
    }

    /// Check width and label range for every instance.
    pub fn validate(&self, data: &[Instance]) -> Result<()> {
        for (i, inst) in data.iter().enumerate() {
            if inst.width() != self.n_features() {
                return Err(Error::at(
                    i,
                    Error::DimensionMismatch { expected: self.n_features(), got: inst.width() },
                ));
            }
            if let Some(label) = inst.label {
                if label >= self.n_classes() {
                    return Err(Error::at(
                        i,
                        Error::LabelOutOfRange { label, classes: self.n_classes() },
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalizationStats {
    pub mean: Vec<f64>,
    pub stddev: Vec<f64>,
}

impl NormalizationStats {
    pub fn width(&self) -> usize {
        self.mean.len()
    }

    /// Z-score one feature vector. Degenerate columns (stddev 0) map to 0.
    pub fn apply(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.check_width(features.len())?;
        Ok(features
            .iter()
            .zip(self.mean.iter().zip(&self.stddev))
            .map(|(&v, (&mu, &sd))| if sd > 0.0 { (v - mu) / sd } else { 0.0 })
            .collect())
    }

    /// Inverse of [`apply`](Self::apply) on non-degenerate columns;
    /// degenerate columns come back as their mean.
    pub fn invert(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.check_width(features.len())?;
        Ok(features
            .iter()
            .zip(self.mean.iter().zip(&self.stddev))
            .map(|(&z, (&mu, &sd))| z * sd + mu)
            .collect())
    }

    fn check_width(&self, got: usize) -> Result<()> {
        if got != self.width() {
            return Err(Error::DimensionMismatch { expected: self.width(), got });
        }
        Ok(())
    }
}

/// Fit per-feature mean and population standard deviation in one pass
/// (Welford updates).
pub fn fit_normalizer<S: AsRef<[f64]>>(data: &[S]) -> Result<NormalizationStats> {
    let first = data.first().ok_or(Error::Empty("normalizer needs at least one instance"))?;
    let width = first.as_ref().len();
    let mut mean = alloc::vec![0.0; width];
    let mut m2 = alloc::vec![0.0; width];
    for (i, row) in data.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != width {
            return Err(Error::at(i, Error::DimensionMismatch { expected: width, got: row.len() }));
        }
        let count = (i + 1) as f64;
        for ((mu, acc), &v) in mean.iter_mut().zip(m2.iter_mut()).zip(row) {
            let delta = v - *mu;
            *mu += delta / count;
            *acc += delta * (v - *mu);
        }
    }
    let n = data.len() as f64;
    let stddev = m2.iter().map(|&s| libm::sqrt((s / n).max(0.0))).collect();
    Ok(NormalizationStats { mean, stddev })
}

/// Normalize one instance, leaving its label untouched.
pub fn normalize(x: &Instance, stats: &NormalizationStats) -> Result<Instance> {
    Ok(Instance { features: stats.apply(&x.features)?, label: x.label })
}

pub fn normalize_all(data: &[Instance], stats: &NormalizationStats) -> Result<Vec<Instance>> {
    data.iter()
        .enumerate()
        .map(|(i, x)| normalize(x, stats).map_err(|e| Error::at(i, e)))
        .collect()
}

/// Draw `floor(ratio * q)` instances uniformly without replacement, in draw
/// order.
pub fn sample_labeled(data: &[Instance], ratio: f64, seed: u64) -> Result<Vec<Instance>> {
    Ok(sample_indices(data.len(), ratio, seed)?.into_iter().map(|i| data[i].clone()).collect())
}

/// The index draw behind [`sample_labeled`].
pub fn sample_indices(q: usize, ratio: f64, seed: u64) -> Result<Vec<usize>> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::invalid(format!("sampling ratio {ratio} outside (0, 1]")));
    }
    let amount = libm::floor(ratio * q as f64) as usize;
    if amount == 0 {
        return Err(Error::Insufficient(format!(
            "sampling ratio {ratio} of {q} instances selects nothing"
        )));
    }
    let mut rng = seed::rng(seed);
    Ok(index::sample(&mut rng, q, amount).into_vec())
}

/// A uniformly random permutation of `0..len`.
pub fn permutation(len: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut seed::rng(seed));
    order
}

/// Replace the features of a uniformly chosen `floor(fraction * q)` subset
/// with N(0, 3^2) draws. Labels are kept.
pub fn inject_bad_data(data: &[Instance], fraction: f64, seed: u64) -> Result<Vec<Instance>> {
    Ok(inject_bad_data_indexed(data, fraction, seed)?.0)
}

/// Like [`inject_bad_data`], also returning the corrupted indices in
/// ascending order.
pub fn inject_bad_data_indexed(
    data: &[Instance],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<Instance>, Vec<usize>)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::invalid(format!("bad-data fraction {fraction} outside [0, 1)")));
    }
    let mut out = data.to_vec();
    let amount = libm::floor(fraction * data.len() as f64) as usize;
    if amount == 0 {
        return Ok((out, Vec::new()));
    }
    let mut rng = seed::rng(seed);
    let mut chosen = index::sample(&mut rng, data.len(), amount).into_vec();
    chosen.sort_unstable();
    let noise = Normal::new(0.0, BAD_DATA_STDDEV).expect("valid normal");
    for &i in &chosen {
        for v in out[i].features.iter_mut() {
            *v = noise.sample(&mut rng);
        }
    }
    Ok((out, chosen))
}

/// Deterministic stratified split of a labeled pool.
///
/// For each class, `round(labeled_fraction * count)` instances (at least one
/// when the class is present and the fraction is positive) stay labeled; the
/// rest lose their labels and form the unlabeled pool. Both outputs keep the
/// original row order.
pub fn stratified_split(
    data: &[Instance],
    labeled_fraction: f64,
    seed: u64,
) -> Result<(Vec<Instance>, Vec<Instance>)> {
    if !(0.0..=1.0).contains(&labeled_fraction) {
        return Err(Error::invalid(format!(
            "labeled fraction {labeled_fraction} outside [0, 1]"
        )));
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, inst) in data.iter().enumerate() {
        let label = inst.label.ok_or(Error::MissingLabel(i))?;
        by_class.entry(label).or_default().push(i);
    }
    let mut rng = seed::rng(seed);
    let mut keep = alloc::vec![false; data.len()];
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        let mut take = libm::round(labeled_fraction * members.len() as f64) as usize;
        if take == 0 && labeled_fraction > 0.0 {
            take = 1;
        }
        for &i in members.iter().take(take) {
            keep[i] = true;
        }
    }
    let mut labeled = Vec::new();
    let mut unlabeled = Vec::new();
    for (inst, keep) in data.iter().zip(keep) {
        if keep {
            labeled.push(inst.clone());
        } else {
            unlabeled.push(Instance::unlabeled(inst.features.clone()));
        }
    }
    Ok((labeled, unlabeled))
}
