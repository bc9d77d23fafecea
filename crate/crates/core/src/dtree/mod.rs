//! Gain-ratio threshold trees with reduced-error pruning, bagging and
//! AdaBoost.M1.
//!
//! Internal nodes test `attribute < threshold`; the left branch holds values
//! below the threshold and the right branch values at or above it. Every
//! internal node keeps the training weight that reached it and the fraction
//! of known-valued weight sent down each branch, which is how instances with
//! an absent attribute are passed down both branches at prediction time.

mod build;
mod data;
mod ensemble;
mod predict;
mod prune;
mod render;
pub mod split;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Label;

pub use build::{build_tree, build_tree_on};
pub use data::{InstanceValues, RowView, TrainingSet};
pub use ensemble::{
    bagging_fit, bagging_fit_on, boosting_fit, boosting_fit_on, ensemble_predict, single_fit_on,
    BoostingTrace, Ensemble, EnsembleKind, EnsemblePrediction, Member, Vote,
};
pub use predict::{predict, PathStep, TestOp, TreePrediction};
pub use prune::{pruning_error, reduced_error_prune, PruneWarning};
pub use render::{format_number, render_ensemble, render_tree};

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("no training rows")]
    EmptyDataset,
    #[error("no continuous predictor columns")]
    NoContinuousPredictors,
    #[error("target column `{0}` not found")]
    UnknownTarget(String),
    #[error("row {row}: target value `{value}` is not Y or N")]
    BadTarget { row: usize, value: String },
    #[error("invalid training parameters: {0}")]
    InvalidParams(String),
}

/// Class weights (or probabilities) for the two labels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    pub n: f64,
    pub y: f64,
}

impl ClassWeights {
    pub fn of(label: Label, w: f64) -> Self {
        match label {
            Label::N => ClassWeights { n: w, y: 0.0 },
            Label::Y => ClassWeights { n: 0.0, y: w },
        }
    }

    pub fn add(&mut self, label: Label, w: f64) {
        match label {
            Label::N => self.n += w,
            Label::Y => self.y += w,
        }
    }

    pub fn get(&self, label: Label) -> f64 {
        match label {
            Label::N => self.n,
            Label::Y => self.y,
        }
    }

    pub fn total(&self) -> f64 {
        self.n + self.y
    }

    /// Heavier label; ties go to `N`.
    pub fn majority(&self) -> Label {
        if self.y > self.n {
            Label::Y
        } else {
            Label::N
        }
    }

    pub fn scaled(&self, f: f64) -> Self {
        ClassWeights {
            n: self.n * f,
            y: self.y * f,
        }
    }

    pub fn plus(&self, other: &ClassWeights) -> Self {
        ClassWeights {
            n: self.n + other.n,
            y: self.y + other.y,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub label: Label,
    /// Training weight of the leaf's own class.
    pub correct: f64,
    /// Training weight of the other class.
    pub misclassified: f64,
}

impl Leaf {
    pub fn from_weights(w: &ClassWeights) -> Leaf {
        let label = w.majority();
        Leaf {
            label,
            correct: w.get(label),
            misclassified: w.get(label.other()),
        }
    }

    /// Class distribution of the training weight at this leaf.
    pub fn distribution(&self) -> ClassWeights {
        let total = self.correct + self.misclassified;
        if total > 0.0 {
            let mut d = ClassWeights::of(self.label, self.correct / total);
            d.add(self.label.other(), self.misclassified / total);
            d
        } else {
            ClassWeights::of(self.label, 1.0)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub attribute: String,
    pub threshold: f64,
    /// `attribute < threshold`
    pub below: Box<Node>,
    /// `attribute >= threshold`
    pub at_or_above: Box<Node>,
    pub below_fraction: f64,
    pub above_fraction: f64,
    /// Training weight that reached this node.
    pub training: ClassWeights,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf(Leaf),
    Split(Split),
}

impl Node {
    /// Number of nodes in the subtree.
    pub fn size(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Split(s) => 1 + s.below.size() + s.at_or_above.size(),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Split(s) => s.below.leaves() + s.at_or_above.leaves(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Split(s) => 1 + s.below.depth().max(s.at_or_above.depth()),
        }
    }

    /// Training weight that reached this node.
    pub fn training_weights(&self) -> ClassWeights {
        match self {
            Node::Leaf(l) => {
                let mut w = ClassWeights::of(l.label, l.correct);
                w.add(l.label.other(), l.misclassified);
                w
            }
            Node::Split(s) => s.training,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
    /// Predictor names the tree was trained with.
    pub attributes: Vec<String>,
}

impl DecisionTree {
    pub fn size(&self) -> usize {
        self.root.size()
    }
}

/// Tree and ensemble training parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainParams {
    /// Minimum training weight on each side of a split.
    pub min_leaf_instances: usize,
    pub max_depth: Option<usize>,
    /// Share of rows held out to prune the single tree; 0 disables pruning.
    pub pruning_holdout_fraction: f64,
    pub rounds: usize,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            min_leaf_instances: 2,
            max_depth: None,
            pruning_holdout_fraction: 1.0 / 3.0,
            rounds: 10,
            seed: 1,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<(), TreeError> {
        if self.min_leaf_instances < 1 {
            return Err(TreeError::InvalidParams("min_leaf_instances must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.pruning_holdout_fraction) {
            return Err(TreeError::InvalidParams(
                "pruning_holdout_fraction must be in [0, 1)".into(),
            ));
        }
        if self.rounds < 1 {
            return Err(TreeError::InvalidParams("rounds must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(TrainParams::default().validate().is_ok());
        let bad = [
            TrainParams { min_leaf_instances: 0, ..Default::default() },
            TrainParams { pruning_holdout_fraction: 1.0, ..Default::default() },
            TrainParams { rounds: 0, ..Default::default() },
        ];
        for p in bad {
            assert!(matches!(p.validate(), Err(TreeError::InvalidParams(_))));
        }
    }

    #[test]
    fn leaf_majority_ties_to_n() {
        let l = Leaf::from_weights(&ClassWeights { n: 2.0, y: 2.0 });
        assert_eq!(l.label, Label::N);
        assert_eq!(l.distribution(), ClassWeights { n: 0.5, y: 0.5 });
    }
}
