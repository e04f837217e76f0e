use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::stats::{self, argmax, best_split, hoeffding_bound, normalize_votes, FeatureObserver};
use super::{HadConfig, LeafPrediction, SplitEvent};
use crate::drift::Adwin;

/// Class weights seen at a node plus the per-feature estimators kept at
/// leaves.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeStats {
    pub class_counts: Vec<f64>,
}

impl NodeStats {
    pub fn n_seen(&self) -> f64 {
        self.class_counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Leaf {
    /// Empty until the leaf learns its first instance.
    pub observers: Vec<FeatureObserver>,
    /// Class weights actually observed here (excludes the prior inherited
    /// from the parent at split time).
    pub observed: Vec<f64>,
    pub weight_at_last_eval: f64,
    pub mc_correct: f64,
    pub nb_correct: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub children: Box<[TreeNode; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NodeKind {
    Leaf(Leaf),
    Split(Split),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeNode {
    pub stats: NodeStats,
    pub kind: NodeKind,
    /// 0/1 error of this subtree's predictions since the node was created.
    pub adwin: Adwin,
    pub alternate: Option<Box<TreeNode>>,
}

/// Event counters, shared by a whole model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Counters {
    pub alternates_started: u64,
    pub alternates_promoted: u64,
    pub alternates_discarded: u64,
}

pub(crate) struct Ctx<'a> {
    pub cfg: &'a HadConfig,
    pub n_classes: usize,
    pub counters: &'a mut Counters,
    pub splits: &'a mut Vec<SplitEvent>,
}

impl TreeNode {
    pub fn leaf(class_counts: Vec<f64>, adwin_delta: f64) -> Self {
        let n: f64 = class_counts.iter().sum();
        let n_classes = class_counts.len();
        TreeNode {
            stats: NodeStats { class_counts },
            kind: NodeKind::Leaf(Leaf {
                observers: Vec::new(),
                observed: vec![0.0; n_classes],
                weight_at_last_eval: n,
                mc_correct: 0.0,
                nb_correct: 0.0,
            }),
            adwin: Adwin::new(adwin_delta).expect("validated delta"),
            alternate: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf(_))
    }

    /// Follow split tests down to a leaf (`value <= threshold` goes left).
    pub fn route(&self, x: &[f64]) -> &TreeNode {
        let mut node = self;
        while let NodeKind::Split(s) = &node.kind {
            node = &s.children[usize::from(x[s.feature] > s.threshold)];
        }
        node
    }

    /// Class probabilities of the leaf reached by `x`.
    pub fn votes(&self, x: &[f64], mode: LeafPrediction) -> Vec<f64> {
        let leaf = self.route(x);
        match &leaf.kind {
            NodeKind::Leaf(l) => leaf_votes(&leaf.stats.class_counts, l, x, mode),
            NodeKind::Split(_) => unreachable!("route ends at a leaf"),
        }
    }

    pub(crate) fn learn(&mut self, x: &[f64], y: usize, pred: Option<usize>, ctx: &mut Ctx<'_>) {
        let pred = pred.unwrap_or_else(|| argmax(&self.votes(x, ctx.cfg.leaf_prediction)));
        if ctx.cfg.adaptive && self.monitor(pred != y, ctx) {
            let alt = self.alternate.take().expect("promotion needs an alternate");
            *self = *alt;
            ctx.counters.alternates_promoted += 1;
            self.learn(x, y, None, ctx);
            return;
        }
        if let Some(alt) = self.alternate.as_mut() {
            alt.learn(x, y, None, ctx);
        }

        self.stats.class_counts[y] += 1.0;
        match &mut self.kind {
            NodeKind::Split(s) => {
                let branch = usize::from(x[s.feature] > s.threshold);
                s.children[branch].learn(x, y, Some(pred), ctx);
            }
            NodeKind::Leaf(leaf) => {
                learn_at_leaf(leaf, &self.stats.class_counts, x, y, ctx);
                let n_seen = self.stats.n_seen();
                if n_seen - leaf.weight_at_last_eval >= ctx.cfg.grace_period as f64 {
                    leaf.weight_at_last_eval = n_seen;
                    self.attempt_split(ctx);
                }
            }
        }
    }

    /// Feed this node's error detector; returns true when the alternate
    /// should replace this node.
    fn monitor(&mut self, error: bool, ctx: &mut Ctx<'_>) -> bool {
        let before = self.adwin.estimate();
        let changed = self.adwin.add(if error { 1.0 } else { 0.0 }).expect("0/1 input");
        // only an increase of the error counts as a change
        let worse = changed && self.adwin.estimate() >= before;
        if worse && self.alternate.is_none() {
            self.alternate = Some(Box::new(TreeNode::leaf(
                vec![0.0; ctx.n_classes],
                ctx.cfg.adwin_delta,
            )));
            ctx.counters.alternates_started += 1;
            return false;
        }
        let Some(alt) = self.alternate.as_ref() else { return false };
        let min = ctx.cfg.alternate_min_width;
        if alt.adwin.is_empty() || self.adwin.width() <= min || alt.adwin.width() <= min {
            return false;
        }
        let old = self.adwin.estimate();
        let new = alt.adwin.estimate();
        let bound = swap_bound(old, self.adwin.width(), alt.adwin.width(), ctx.cfg.swap_confidence);
        if bound < old - new {
            true
        } else {
            if bound < new - old {
                self.alternate = None;
                ctx.counters.alternates_discarded += 1;
            }
            false
        }
    }

    fn attempt_split(&mut self, ctx: &mut Ctx<'_>) {
        let NodeKind::Leaf(leaf) = &self.kind else { return };
        let present = leaf.observed.iter().filter(|&&w| w > 0.0).count();
        if present < 2 || leaf.observers.is_empty() {
            return;
        }
        let mut candidates: Vec<stats::SplitCandidate> = leaf
            .observers
            .iter()
            .enumerate()
            .filter_map(|(f, obs)| best_split(f, obs, &leaf.observed, ctx.cfg.numeric_split_points))
            .collect();
        candidates.sort_by(|a, b| b.merit.total_cmp(&a.merit).then(a.feature.cmp(&b.feature)));
        let Some(best) = candidates.first() else { return };
        // the "no split" option has merit 0
        let second = candidates.get(1).map_or(0.0, |c| c.merit.max(0.0));
        if best.merit <= 0.0 {
            return;
        }
        let n = self.stats.n_seen();
        let range = libm::log2(present.max(2) as f64);
        let epsilon = hoeffding_bound(range, ctx.cfg.split_confidence, n);
        let tie = epsilon < ctx.cfg.tie_threshold;
        if !(best.merit - second > epsilon || tie) {
            return;
        }
        let best = candidates.swap_remove(0);
        ctx.splits.push(SplitEvent {
            feature: best.feature,
            threshold: best.threshold,
            n_seen: n,
            epsilon,
            best_merit: best.merit,
            second_merit: second,
            tie,
        });
        let [left, right] = best.distributions;
        self.kind = NodeKind::Split(Split {
            feature: best.feature,
            threshold: best.threshold,
            children: Box::new([
                TreeNode::leaf(left, ctx.cfg.adwin_delta),
                TreeNode::leaf(right, ctx.cfg.adwin_delta),
            ]),
        });
        self.adwin = Adwin::new(ctx.cfg.adwin_delta).expect("validated delta");
        self.alternate = None;
    }

    /// Visit every node, including alternates and their subtrees.
    pub fn for_each(&self, f: &mut impl FnMut(&TreeNode)) {
        f(self);
        if let NodeKind::Split(s) = &self.kind {
            s.children[0].for_each(f);
            s.children[1].for_each(f);
        }
        if let Some(alt) = &self.alternate {
            alt.for_each(f);
        }
    }

    /// Depth of the main tree (a lone leaf has depth 0).
    pub fn depth(&self) -> usize {
        match &self.kind {
            NodeKind::Leaf(_) => 0,
            NodeKind::Split(s) => 1 + s.children[0].depth().max(s.children[1].depth()),
        }
    }
}

fn swap_bound(old_error: f64, width: usize, alt_width: usize, confidence: f64) -> f64 {
    let inv = 1.0 / alt_width as f64 + 1.0 / width as f64;
    libm::sqrt(2.0 * old_error * (1.0 - old_error) * libm::log(2.0 / confidence) * inv)
}

fn learn_at_leaf(leaf: &mut Leaf, class_counts: &[f64], x: &[f64], y: usize, ctx: &mut Ctx<'_>) {
    if ctx.cfg.leaf_prediction == LeafPrediction::NaiveBayesAdaptive {
        // class_counts already includes y; score against the counts before it
        let mut before = class_counts.to_vec();
        before[y] -= 1.0;
        if argmax(&before) == y && before.iter().sum::<f64>() > 0.0 {
            leaf.mc_correct += 1.0;
        }
        if let Some(nb) = stats::naive_bayes(&before, &leaf.observers, x) {
            if argmax(&nb) == y {
                leaf.nb_correct += 1.0;
            }
        }
    }
    if leaf.observers.is_empty() {
        leaf.observers = vec![FeatureObserver::new(ctx.n_classes); x.len()];
    }
    for (obs, &v) in leaf.observers.iter_mut().zip(x) {
        obs.observe(v, y);
    }
    leaf.observed[y] += 1.0;
}

pub(crate) fn leaf_votes(class_counts: &[f64], leaf: &Leaf, x: &[f64], mode: LeafPrediction) -> Vec<f64> {
    let mut majority = class_counts.to_vec();
    normalize_votes(&mut majority);
    let use_nb = match mode {
        LeafPrediction::MajorityClass => false,
        LeafPrediction::NaiveBayes => true,
        LeafPrediction::NaiveBayesAdaptive => leaf.nb_correct >= leaf.mc_correct,
    };
    if !use_nb {
        return majority;
    }
    stats::naive_bayes(class_counts, &leaf.observers, x).unwrap_or(majority)
}
