use std::fmt::Write;

use super::{DecisionTree, Ensemble, EnsembleKind, Leaf, Node};

/// Shortest decimal that round-trips; integral values print without a
/// fraction.
pub fn format_number(x: f64) -> String {
    format!("{x}")
}

/// Leaf weights: integers as-is, fractional weights to two decimals.
fn format_count(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x}")
    } else {
        let s = format!("{x:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn leaf_text(l: &Leaf) -> String {
    format!(
        "{} ({}/{})",
        l.label,
        format_count(l.correct),
        format_count(l.misclassified)
    )
}

fn branches(node: &Node, depth: usize, out: &mut String) {
    let Node::Split(s) = node else { return };
    let indent = "| ".repeat(depth);
    let threshold = format_number(s.threshold);
    for (op, child) in [("<", &s.below), (">=", &s.at_or_above)] {
        match child.as_ref() {
            Node::Leaf(l) => {
                let _ = writeln!(out, "{indent}{} {op} {threshold} : {}", s.attribute, leaf_text(l));
            }
            inner => {
                let _ = writeln!(out, "{indent}{} {op} {threshold}", s.attribute);
                branches(inner, depth + 1, out);
            }
        }
    }
}

/// REPTree-style listing: header, one line per branch with `|` indentation,
/// leaf weights as `(correct/misclassified)`, then the node count.
pub fn render_tree(tree: &DecisionTree) -> String {
    let mut out = String::from("REPTree\n=====\n");
    match &tree.root {
        Node::Leaf(l) => {
            let _ = writeln!(out, ": {}", leaf_text(l));
        }
        root => branches(root, 0, &mut out),
    }
    let _ = writeln!(out, "Size of the tree : {}", tree.size());
    out
}

/// Member trees in order; boosting members are followed by their vote weight.
pub fn render_ensemble(ensemble: &Ensemble) -> String {
    let mut out = String::new();
    for m in &ensemble.members {
        out.push_str(&render_tree(&m.tree));
        if ensemble.kind == EnsembleKind::Boosting {
            let _ = writeln!(out, "Weight: {}", format_number(m.weight));
        }
    }
    out
}
