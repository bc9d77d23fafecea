use std::fmt;

use super::{DecisionTree, InstanceValues, Leaf, Node, Split, TrainingSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PruneWarning {
    EmptyPruningSet,
}

impl fmt::Display for PruneWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PruneWarning::EmptyPruningSet => f.write_str("pruning set is empty; tree left unpruned"),
        }
    }
}

/// Bottom-up reduced-error pruning: a subtree becomes a leaf labelled with
/// the majority of its training weight whenever that leaf makes no more
/// weighted errors on `pruning` than the subtree does.
pub fn reduced_error_prune(
    tree: &DecisionTree,
    pruning: &TrainingSet,
) -> (DecisionTree, Option<PruneWarning>) {
    if pruning.is_empty() {
        log::warn!("{}", PruneWarning::EmptyPruningSet);
        return (tree.clone(), Some(PruneWarning::EmptyPruningSet));
    }
    let instances: Vec<(usize, f64)> = (0..pruning.len()).map(|i| (i, 1.0)).collect();
    let (root, _) = prune(&tree.root, pruning, instances);
    (
        DecisionTree {
            root,
            attributes: tree.attributes.clone(),
        },
        None,
    )
}

/// Weighted misclassifications on `set`, routing each row to the leaves it
/// reaches (fractionally for absent attributes).
pub fn pruning_error(tree: &DecisionTree, set: &TrainingSet) -> f64 {
    let instances: Vec<(usize, f64)> = (0..set.len()).map(|i| (i, 1.0)).collect();
    routed_error(&tree.root, set, instances)
}

fn errors(label: crate::label::Label, set: &TrainingSet, instances: &[(usize, f64)]) -> f64 {
    instances
        .iter()
        .filter(|&&(r, _)| set.label(r) != label)
        .map(|&(_, w)| w)
        .sum()
}

type Routed = (Vec<(usize, f64)>, Vec<(usize, f64)>);

fn route(s: &Split, set: &TrainingSet, instances: Vec<(usize, f64)>) -> Routed {
    let mut below = Vec::new();
    let mut above = Vec::new();
    for (row, w) in instances {
        match set.row(row).value(&s.attribute) {
            Some(v) if v < s.threshold => below.push((row, w)),
            Some(_) => above.push((row, w)),
            None => {
                below.push((row, w * s.below_fraction));
                above.push((row, w * s.above_fraction));
            }
        }
    }
    (below, above)
}

fn routed_error(node: &Node, set: &TrainingSet, instances: Vec<(usize, f64)>) -> f64 {
    match node {
        Node::Leaf(l) => errors(l.label, set, &instances),
        Node::Split(s) => {
            let (below, above) = route(s, set, instances);
            routed_error(&s.below, set, below) + routed_error(&s.at_or_above, set, above)
        }
    }
}

fn prune(node: &Node, set: &TrainingSet, instances: Vec<(usize, f64)>) -> (Node, f64) {
    match node {
        Node::Leaf(l) => (node.clone(), errors(l.label, set, &instances)),
        Node::Split(s) => {
            let leaf_error = errors(s.training.majority(), set, &instances);
            let (below, above) = route(s, set, instances);
            let (b, be) = prune(&s.below, set, below);
            let (a, ae) = prune(&s.at_or_above, set, above);
            let subtree_error = be + ae;
            if leaf_error <= subtree_error {
                (Node::Leaf(Leaf::from_weights(&s.training)), leaf_error)
            } else {
                (
                    Node::Split(Split {
                        below: Box::new(b),
                        at_or_above: Box::new(a),
                        ..s.clone()
                    }),
                    subtree_error,
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtree::{build_tree_on, TrainParams};
    use crate::label::Label::{self, *};
    use proptest::prelude::*;

    fn one_column(values: &[f64], labels: &[Label]) -> TrainingSet {
        TrainingSet::new(
            vec!["x".into()],
            vec![values.iter().map(|&v| Some(v)).collect()],
            labels.to_vec(),
        )
    }

    #[test]
    fn empty_pruning_set_warns() {
        let d = one_column(&[1.0, 2.0, 3.0, 4.0], &[N, N, Y, Y]);
        let t = build_tree_on(&d, None, &TrainParams::default()).unwrap();
        let (p, w) = reduced_error_prune(&t, &d.subset(&[]));
        assert_eq!(p, t);
        assert_eq!(w, Some(PruneWarning::EmptyPruningSet));
    }

    #[test]
    fn useless_split_collapses() {
        let d = one_column(&[1.0, 2.0, 3.0, 4.0], &[N, N, Y, Y]);
        let t = build_tree_on(&d, None, &TrainParams::default()).unwrap();
        // holdout contradicts the split: all N
        let holdout = one_column(&[1.0, 4.0, 4.0], &[N, N, N]);
        let (p, w) = reduced_error_prune(&t, &holdout);
        assert!(w.is_none());
        assert_eq!(p.size(), 1);
        assert_eq!(pruning_error(&p, &holdout), 0.0);
    }

    #[test]
    fn useful_split_survives() {
        let d = one_column(&[1.0, 2.0, 3.0, 4.0], &[N, N, Y, Y]);
        let t = build_tree_on(&d, None, &TrainParams::default()).unwrap();
        let (p, _) = reduced_error_prune(&t, &d);
        assert_eq!(p, t);
    }

    fn labelled() -> impl Strategy<Value = (Vec<(f64, f64)>, Vec<bool>)> {
        (4usize..40).prop_flat_map(|n| {
            (
                prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
    }

    fn two_columns(rows: &[(f64, f64)], labels: &[bool]) -> TrainingSet {
        TrainingSet::new(
            vec!["a".into(), "b".into()],
            vec![
                rows.iter().map(|r| Some(r.0)).collect(),
                rows.iter().map(|r| Some(r.1)).collect(),
            ],
            labels.iter().map(|&y| if y { Y } else { N }).collect(),
        )
    }

    proptest! {
        #[test]
        fn pruning_never_grows_or_worsens((train, tl) in labelled(), (hold, hl) in labelled()) {
            let d = two_columns(&train, &tl);
            let h = two_columns(&hold, &hl);
            let p = TrainParams { min_leaf_instances: 1, ..Default::default() };
            let t = build_tree_on(&d, None, &p).unwrap();
            let (pruned, _) = reduced_error_prune(&t, &h);
            prop_assert!(pruned.size() <= t.size());
            prop_assert!(pruning_error(&pruned, &h) <= pruning_error(&t, &h) + 1e-9);
        }
    }
}
