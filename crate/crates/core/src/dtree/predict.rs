use serde::{Deserialize, Serialize};

use super::{ClassWeights, DecisionTree, InstanceValues, Node};
use crate::label::Label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestOp {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtOrAbove,
}

impl std::fmt::Display for TestOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TestOp::Below => "<",
            TestOp::AtOrAbove => ">=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathStep {
    /// A test the instance satisfied.
    Test {
        attribute: String,
        op: TestOp,
        threshold: f64,
    },
    /// The attribute was absent; both branches were followed.
    Absent { attribute: String, threshold: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreePrediction {
    pub label: Label,
    /// Probability of `label`.
    pub confidence: f64,
    pub distribution: ClassWeights,
    pub path: Vec<PathStep>,
}

/// Descends the tree. Absent attributes follow both branches, weighted by the
/// training fractions, and the resulting leaf distributions are mixed.
pub fn predict<I: InstanceValues + ?Sized>(tree: &DecisionTree, instance: &I) -> TreePrediction {
    let mut path = Vec::new();
    let distribution = descend(&tree.root, instance, &mut path);
    let label = distribution.majority();
    TreePrediction {
        label,
        confidence: distribution.get(label),
        distribution,
        path,
    }
}

fn descend<I: InstanceValues + ?Sized>(node: &Node, instance: &I, path: &mut Vec<PathStep>) -> ClassWeights {
    match node {
        Node::Leaf(l) => l.distribution(),
        Node::Split(s) => match instance.value(&s.attribute) {
            Some(v) => {
                let (op, child) = if v < s.threshold {
                    (TestOp::Below, &s.below)
                } else {
                    (TestOp::AtOrAbove, &s.at_or_above)
                };
                path.push(PathStep::Test {
                    attribute: s.attribute.clone(),
                    op,
                    threshold: s.threshold,
                });
                descend(child, instance, path)
            }
            None => {
                path.push(PathStep::Absent {
                    attribute: s.attribute.clone(),
                    threshold: s.threshold,
                });
                let b = descend(&s.below, instance, path);
                let a = descend(&s.at_or_above, instance, path);
                b.scaled(s.below_fraction).plus(&a.scaled(s.above_fraction))
            }
        },
    }
}
