//! Hoeffding adaptive tree with a global DDM supervisor.
//!
//! The tree grows like a Hoeffding tree: every `grace_period` instances a
//! leaf ranks candidate numeric splits by information gain and splits when
//! the best beats the runner-up by more than the Hoeffding bound (or the
//! bound drops below the tie threshold). Each node monitors the 0/1 error
//! of its subtree with ADWIN; when that error rises, the node starts an
//! alternate subtree and swaps it in once it is significantly better.
//!
//! On top of the tree, DDM watches the model's prequential error. From the
//! first warning the incoming instances are buffered; on drift a fresh tree
//! is trained on the buffer and replaces the current one.

mod node;
pub mod stats;

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::mem::size_of;

pub use node::{Counters, Leaf, NodeKind, NodeStats, Split, TreeNode};
use stats::{argmax, GaussianEstimator};

use crate::drift::{Adwin, Ddm, DdmLevel, DEFAULT_DELTA};
use crate::eval::{Classifier, Prediction};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LeafPrediction {
    MajorityClass,
    NaiveBayes,
    /// Per leaf, whichever of majority class and naive Bayes has been right
    /// more often so far.
    NaiveBayesAdaptive,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct HadConfig {
    pub grace_period: u64,
    pub split_confidence: f64,
    pub tie_threshold: f64,
    pub leaf_prediction: LeafPrediction,
    pub numeric_split_points: usize,
    /// Per-node ADWIN error monitoring and alternate subtrees.
    pub adaptive: bool,
    pub adwin_delta: f64,
    /// Both windows must exceed this width before an alternate is compared
    /// with the subtree it shadows.
    pub alternate_min_width: usize,
    pub swap_confidence: f64,
    /// Global DDM supervision with warning-buffer rebuilds.
    pub ddm_enabled: bool,
    pub warning_buffer_capacity: usize,
}

impl Default for HadConfig {
    fn default() -> Self {
        Self {
            grace_period: 200,
            split_confidence: 1e-7,
            tie_threshold: 0.05,
            leaf_prediction: LeafPrediction::NaiveBayesAdaptive,
            numeric_split_points: 10,
            adaptive: true,
            adwin_delta: DEFAULT_DELTA,
            alternate_min_width: 300,
            swap_confidence: 0.05,
            ddm_enabled: true,
            warning_buffer_capacity: 10_000,
        }
    }
}

impl HadConfig {
    /// A plain Hoeffding tree: no alternates, no DDM.
    pub fn non_adaptive() -> Self {
        Self { adaptive: false, ddm_enabled: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if self.grace_period == 0 {
            return Err(Error::invalid("grace_period must be >= 1"));
        }
        if !unit(self.split_confidence) || !unit(self.tie_threshold) {
            return Err(Error::invalid("split_confidence and tie_threshold must lie in (0, 1)"));
        }
        if !unit(self.adwin_delta) || !unit(self.swap_confidence) {
            return Err(Error::invalid("adwin_delta and swap_confidence must lie in (0, 1)"));
        }
        if self.numeric_split_points == 0 {
            return Err(Error::invalid("numeric_split_points must be >= 1"));
        }
        Ok(())
    }
}

/// Statistics recorded when a leaf was split.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitEvent {
    pub feature: usize,
    pub threshold: f64,
    pub n_seen: f64,
    pub epsilon: f64,
    pub best_merit: f64,
    pub second_merit: f64,
    pub tie: bool,
}

/// Byte accounting of a model; see [`HoeffdingAdaptiveTree::cost`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Cost {
    pub leaves: u64,
    pub splits: u64,
    pub adwins: u64,
    pub ddms: u64,
    pub buffered: u64,
    pub bytes: u64,
}

/// Fixed per-item footprints used by [`HoeffdingAdaptiveTree::cost`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Footprint {
    pub leaf: u64,
    pub split: u64,
    pub adwin: u64,
    pub ddm: u64,
    pub buffered_instance: u64,
}

impl Footprint {
    pub fn new(n_features: usize, n_classes: usize) -> Self {
        let f64s = |k: usize| (k * size_of::<f64>()) as u64;
        let node = (size_of::<TreeNode>() - size_of::<Adwin>()) as u64;
        Self {
            // counts, observed weights, one estimator per feature and class
            leaf: node
                + f64s(2 * n_classes)
                + (n_features * n_classes * size_of::<GaussianEstimator>()) as u64,
            split: node + f64s(n_classes) + size_of::<Split>() as u64,
            adwin: size_of::<Adwin>() as u64,
            ddm: size_of::<Ddm>() as u64,
            buffered_instance: f64s(n_features) + size_of::<usize>() as u64,
        }
    }
}

/// The HAD classifier.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HoeffdingAdaptiveTree {
    cfg: HadConfig,
    n_features: usize,
    n_classes: usize,
    root: TreeNode,
    ddm: Ddm,
    buffer: VecDeque<(Vec<f64>, usize)>,
    learned: u64,
    rebuilds: u64,
    counters: Counters,
    splits: Vec<SplitEvent>,
}

impl HoeffdingAdaptiveTree {
    pub fn new(n_features: usize, n_classes: usize, cfg: HadConfig) -> Result<Self> {
        cfg.validate()?;
        if n_features == 0 || n_classes < 2 {
            return Err(Error::invalid(format!(
                "tree needs >= 1 feature and >= 2 classes, got {n_features} and {n_classes}"
            )));
        }
        Ok(Self {
            root: TreeNode::leaf(vec![0.0; n_classes], cfg.adwin_delta),
            cfg,
            n_features,
            n_classes,
            ddm: Ddm::new(),
            buffer: VecDeque::new(),
            learned: 0,
            rebuilds: 0,
            counters: Counters::default(),
            splits: Vec::new(),
        })
    }

    pub fn config(&self) -> &HadConfig {
        &self.cfg
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn ddm(&self) -> &Ddm {
        &self.ddm
    }

    /// Instances learned since the tree was last replaced by a rebuild.
    pub fn learned_since_rebuild(&self) -> u64 {
        self.learned
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn split_log(&self) -> &[SplitEvent] {
        &self.splits
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch { expected: self.n_features, got: x.len() });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<Prediction> {
        self.check(x)?;
        let scores = self.root.votes(x, self.cfg.leaf_prediction);
        Ok(Prediction { label: argmax(&scores), scores })
    }

    pub fn learn_one(&mut self, x: &[f64], y: usize) -> Result<()> {
        self.check(x)?;
        if y >= self.n_classes {
            return Err(Error::LabelOutOfRange { label: y, classes: self.n_classes });
        }
        if !self.cfg.ddm_enabled {
            self.learn_tree(x, y, None);
            return Ok(());
        }
        let pred = argmax(&self.root.votes(x, self.cfg.leaf_prediction));
        match self.ddm.add(pred != y) {
            DdmLevel::Stable => {
                self.buffer.clear();
                self.learn_tree(x, y, Some(pred));
            }
            DdmLevel::Warning => {
                self.push_buffer(x, y);
                self.learn_tree(x, y, Some(pred));
            }
            DdmLevel::Drift => {
                self.push_buffer(x, y);
                let buffer: Vec<_> = core::mem::take(&mut self.buffer).into();
                self.on_drift_rebuild(buffer);
            }
        }
        Ok(())
    }

    /// Replace the tree with a fresh one trained on `buffer`, resetting the
    /// detectors. An empty buffer leaves an empty tree.
    pub fn on_drift_rebuild(&mut self, buffer: Vec<(Vec<f64>, usize)>) {
        self.root = TreeNode::leaf(vec![0.0; self.n_classes], self.cfg.adwin_delta);
        self.learned = 0;
        self.rebuilds += 1;
        self.buffer.clear();
        self.ddm.restart();
        for (x, y) in buffer {
            if x.len() == self.n_features && y < self.n_classes {
                self.learn_tree(&x, y, None);
            }
        }
    }

    fn push_buffer(&mut self, x: &[f64], y: usize) {
        if self.cfg.warning_buffer_capacity == 0 {
            return;
        }
        if self.buffer.len() == self.cfg.warning_buffer_capacity {
            self.buffer.pop_front();
        }
        self.buffer.push_back((x.to_vec(), y));
    }

    fn learn_tree(&mut self, x: &[f64], y: usize, pred: Option<usize>) {
        let mut ctx = node::Ctx {
            cfg: &self.cfg,
            n_classes: self.n_classes,
            counters: &mut self.counters,
            splits: &mut self.splits,
        };
        self.root.learn(x, y, pred, &mut ctx);
        self.learned += 1;
    }

    /// Count nodes (alternates included) and price them with [`Footprint`].
    pub fn cost(&self) -> Cost {
        let fp = Footprint::new(self.n_features, self.n_classes);
        let mut cost = Cost::default();
        self.root.for_each(&mut |n| {
            if n.is_leaf() {
                cost.leaves += 1;
            } else {
                cost.splits += 1;
            }
        });
        if self.cfg.adaptive {
            cost.adwins = cost.leaves + cost.splits;
        }
        cost.ddms = u64::from(self.cfg.ddm_enabled);
        cost.buffered = self.buffer.len() as u64;
        cost.bytes = cost.leaves * fp.leaf
            + cost.splits * fp.split
            + cost.adwins * fp.adwin
            + cost.ddms * fp.ddm
            + cost.buffered * fp.buffered_instance;
        cost
    }

    pub fn model_cost(&self) -> u64 {
        self.cost().bytes
    }
}

impl Classifier for HoeffdingAdaptiveTree {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        self.predict_one(x)
    }

    fn learn(&mut self, x: &[f64], y: usize) -> Result<()> {
        self.learn_one(x, y)
    }

    fn model_bytes(&self) -> u64 {
        self.model_cost()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn untrained_predicts_lowest_class_uniformly() {
        let t = HoeffdingAdaptiveTree::new(2, 3, HadConfig::default()).unwrap();
        let p = t.predict_one(&[0.3, -1.0]).unwrap();
        assert_eq!(p.label, 0);
        assert!(p.scores.iter().all(|&s| (s - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn one_step_bookkeeping() {
        let mut t = HoeffdingAdaptiveTree::new(2, 3, HadConfig::default()).unwrap();
        t.learn_one(&[1.0, 2.0], 1).unwrap();
        assert_eq!(t.root().stats.class_counts, vec![0.0, 1.0, 0.0]);
        assert_eq!(t.predict_one(&[1.0, 2.0]).unwrap().label, 1);
    }

    #[test]
    fn single_class_everywhere() {
        let mut t = HoeffdingAdaptiveTree::new(1, 3, HadConfig::default()).unwrap();
        for i in 0..50 {
            t.learn_one(&[i as f64], 2).unwrap();
        }
        for v in [-100.0, 0.0, 25.0, 1e6] {
            assert_eq!(t.predict_one(&[v]).unwrap().label, 2);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut t = HoeffdingAdaptiveTree::new(2, 2, HadConfig::default()).unwrap();
        assert!(t.learn_one(&[1.0, 2.0], 2).is_err());
        assert!(t.predict_one(&[1.0]).is_err());
        assert!(HoeffdingAdaptiveTree::new(2, 1, HadConfig::default()).is_err());
        let bad = HadConfig { grace_period: 0, ..HadConfig::default() };
        assert!(HoeffdingAdaptiveTree::new(2, 2, bad).is_err());
    }

    #[test]
    fn fresh_cost_is_one_leaf_one_adwin_one_ddm() {
        let t = HoeffdingAdaptiveTree::new(4, 3, HadConfig::default()).unwrap();
        let fp = Footprint::new(4, 3);
        assert_eq!(t.model_cost(), fp.leaf + fp.adwin + fp.ddm);
    }

    #[test]
    fn rebuild_from_homogeneous_buffer() {
        let mut t = HoeffdingAdaptiveTree::new(2, 4, HadConfig::default()).unwrap();
        for i in 0..100 {
            t.learn_one(&[i as f64, 0.0], i % 2).unwrap();
        }
        let buffer = (0..500).map(|i| (vec![i as f64, 1.0], 3)).collect();
        t.on_drift_rebuild(buffer);
        assert_eq!(t.predict_one(&[7.0, 1.0]).unwrap().label, 3);
        assert_eq!(t.learned_since_rebuild(), 500);
        t.on_drift_rebuild(Vec::new());
        assert_eq!(t.root().stats.n_seen(), 0.0);
        assert!(t.root().is_leaf());
    }
}
