use super::split::{choose_split, class_weights, evaluate_candidates};
use super::{DecisionTree, Leaf, Node, Split, TrainParams, TrainingSet, TreeError};
use crate::table::AttributeTable;

/// Grows an unpruned tree on every row of `table` with unit weights.
pub fn build_tree(
    table: &AttributeTable,
    target: &str,
    params: &TrainParams,
) -> Result<DecisionTree, TreeError> {
    let data = TrainingSet::from_table(table, target)?;
    build_tree_on(&data, None, params)
}

/// Grows an unpruned tree. `weights` defaults to 1 per row; rows with zero
/// weight are ignored.
pub fn build_tree_on(
    data: &TrainingSet,
    weights: Option<&[f64]>,
    params: &TrainParams,
) -> Result<DecisionTree, TreeError> {
    params.validate()?;
    if data.is_empty() {
        return Err(TreeError::EmptyDataset);
    }
    if data.attributes().is_empty() {
        return Err(TreeError::NoContinuousPredictors);
    }
    let instances: Vec<(usize, f64)> = match weights {
        Some(w) => {
            assert_eq!(w.len(), data.len());
            w.iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(i, &w)| (i, w))
                .collect()
        }
        None => (0..data.len()).map(|i| (i, 1.0)).collect(),
    };
    if instances.is_empty() {
        return Err(TreeError::EmptyDataset);
    }
    Ok(DecisionTree {
        root: grow(data, instances, 0, params),
        attributes: data.attributes().to_vec(),
    })
}

fn grow(data: &TrainingSet, instances: Vec<(usize, f64)>, depth: usize, params: &TrainParams) -> Node {
    let weights = class_weights(data, &instances);
    let min_leaf = params.min_leaf_instances as f64;
    let stop = weights.n <= 0.0
        || weights.y <= 0.0
        || weights.total() < 2.0 * min_leaf
        || params.max_depth.is_some_and(|d| depth >= d);
    if stop {
        return Node::Leaf(Leaf::from_weights(&weights));
    }
    let candidates = evaluate_candidates(data, &instances, min_leaf);
    let Some(best) = choose_split(&candidates) else {
        return Node::Leaf(Leaf::from_weights(&weights));
    };
    let below_fraction = best.below_fraction();
    let above_fraction = 1.0 - below_fraction;

    let mut below = Vec::new();
    let mut above = Vec::new();
    for &(row, w) in &instances {
        match data.value(best.attribute, row) {
            Some(v) if v < best.threshold => below.push((row, w)),
            Some(_) => above.push((row, w)),
            None => {
                below.push((row, w * below_fraction));
                above.push((row, w * above_fraction));
            }
        }
    }
    Node::Split(Split {
        attribute: data.attributes()[best.attribute].clone(),
        threshold: best.threshold,
        below: Box::new(grow(data, below, depth + 1, params)),
        at_or_above: Box::new(grow(data, above, depth + 1, params)),
        below_fraction,
        above_fraction,
        training: weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label::{self, *};

    fn one_column(values: &[f64], labels: &[Label]) -> TrainingSet {
        TrainingSet::new(
            vec!["x".into()],
            vec![values.iter().map(|&v| Some(v)).collect()],
            labels.to_vec(),
        )
    }

    #[test]
    fn pure_data_is_a_single_leaf() {
        let d = one_column(&[1.0, 2.0, 3.0], &[Y, Y, Y]);
        let t = build_tree_on(&d, None, &TrainParams::default()).unwrap();
        assert_eq!(t.root, Node::Leaf(Leaf { label: Y, correct: 3.0, misclassified: 0.0 }));
    }

    #[test]
    fn four_rows_split_once() {
        let d = one_column(&[1.0, 2.0, 3.0, 4.0], &[N, N, Y, Y]);
        let t = build_tree_on(&d, None, &TrainParams::default()).unwrap();
        let Node::Split(s) = &t.root else { panic!("expected split") };
        assert_eq!(s.threshold, 2.5);
        assert_eq!(t.size(), 3);
    }

    #[test]
    fn max_depth_zero_gives_majority_leaf() {
        let d = one_column(&[1.0, 2.0, 3.0, 4.0], &[N, Y, Y, Y]);
        let p = TrainParams { max_depth: Some(0), ..Default::default() };
        let t = build_tree_on(&d, None, &p).unwrap();
        assert_eq!(t.root, Node::Leaf(Leaf { label: Y, correct: 3.0, misclassified: 1.0 }));
    }

    #[test]
    fn zero_weights_are_dropped() {
        let d = one_column(&[1.0, 2.0, 3.0, 4.0], &[N, N, Y, Y]);
        let t = build_tree_on(&d, Some(&[0.0, 0.0, 2.0, 1.0]), &TrainParams::default()).unwrap();
        assert_eq!(t.root, Node::Leaf(Leaf { label: Y, correct: 3.0, misclassified: 0.0 }));
        assert_eq!(
            build_tree_on(&d, Some(&[0.0; 4]), &TrainParams::default()),
            Err(TreeError::EmptyDataset)
        );
    }

    #[test]
    fn missing_rows_go_both_ways() {
        let d = TrainingSet::new(
            vec!["x".into()],
            vec![vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0), None]],
            vec![N, N, Y, Y, Y],
        );
        let p = TrainParams { min_leaf_instances: 1, ..Default::default() };
        let t = build_tree_on(&d, None, &p).unwrap();
        let Node::Split(s) = &t.root else { panic!("expected split") };
        assert_eq!(s.below_fraction, 0.5);
        assert_eq!(s.below.training_weights(), super::super::ClassWeights { n: 2.0, y: 0.5 });
    }
}
