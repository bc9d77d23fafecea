//! Threshold selection by gain ratio.

use super::{ClassWeights, TrainingSet};

/// Weighted training rows at a node.
pub type Instances = [(usize, f64)];

/// Entropy in bits of a two-class weight vector.
pub fn entropy(w: &ClassWeights) -> f64 {
    let total = w.total();
    if total <= 0.0 {
        return 0.0;
    }
    [w.n, w.y]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| {
            let p = x / total;
            -p * p.log2()
        })
        .sum()
}

fn entropy_of(parts: &[f64]) -> f64 {
    let total: f64 = parts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    parts
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| {
            let p = x / total;
            -p * p.log2()
        })
        .sum()
}

pub fn class_weights(data: &TrainingSet, instances: &Instances) -> ClassWeights {
    let mut w = ClassWeights::default();
    for &(row, weight) in instances {
        w.add(data.label(row), weight);
    }
    w
}

/// Best threshold for one attribute.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSplit {
    pub attribute: usize,
    pub threshold: f64,
    /// Information gain, scaled by the known-valued share of the weight.
    pub gain: f64,
    pub split_info: f64,
    pub gain_ratio: f64,
    pub below: ClassWeights,
    pub above: ClassWeights,
    pub missing: ClassWeights,
}

impl CandidateSplit {
    /// Share of known-valued weight below the threshold.
    pub fn below_fraction(&self) -> f64 {
        let known = self.below.total() + self.above.total();
        self.below.total() / known
    }
}

/// Scans the midpoints between consecutive distinct values of `attribute`
/// and keeps the one with the highest gain. Both sides must carry at least
/// `min_leaf` weight.
pub fn best_threshold(
    data: &TrainingSet,
    attribute: usize,
    instances: &Instances,
    min_leaf: f64,
) -> Option<CandidateSplit> {
    let mut known: Vec<(f64, usize, f64)> = Vec::with_capacity(instances.len());
    let mut missing = ClassWeights::default();
    for &(row, w) in instances {
        match data.value(attribute, row) {
            Some(v) => known.push((v, row, w)),
            None => missing.add(data.label(row), w),
        }
    }
    if known.len() < 2 {
        return None;
    }
    known.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut all_known = ClassWeights::default();
    for &(_, row, w) in &known {
        all_known.add(data.label(row), w);
    }
    let known_total = all_known.total();
    if known_total <= 0.0 {
        return None;
    }
    let base = entropy(&all_known);

    let mut below = ClassWeights::default();
    let mut best: Option<(f64, f64, ClassWeights)> = None;
    for i in 0..known.len() - 1 {
        let (v, row, w) = known[i];
        below.add(data.label(row), w);
        let next = known[i + 1].0;
        if next <= v {
            continue;
        }
        let above = ClassWeights {
            n: all_known.n - below.n,
            y: all_known.y - below.y,
        };
        if below.total() < min_leaf || above.total() < min_leaf {
            continue;
        }
        let gain = base
            - below.total() / known_total * entropy(&below)
            - above.total() / known_total * entropy(&above);
        if best.as_ref().is_none_or(|(g, _, _)| gain > *g) {
            let mut threshold = (v + next) / 2.0;
            if threshold <= v {
                threshold = next;
            }
            best = Some((gain, threshold, below));
        }
    }

    let (gain_known, threshold, below) = best?;
    let above = ClassWeights {
        n: all_known.n - below.n,
        y: all_known.y - below.y,
    };
    let total = known_total + missing.total();
    let gain = known_total / total * gain_known;
    let split_info = entropy_of(&[below.total(), above.total(), missing.total()]);
    let gain_ratio = if split_info > 0.0 { gain / split_info } else { 0.0 };
    Some(CandidateSplit {
        attribute,
        threshold,
        gain,
        split_info,
        gain_ratio,
        below,
        above,
        missing,
    })
}

/// Best candidate for every attribute with positive gain, in attribute order.
pub fn evaluate_candidates(
    data: &TrainingSet,
    instances: &Instances,
    min_leaf: f64,
) -> Vec<CandidateSplit> {
    (0..data.attributes().len())
        .filter_map(|a| best_threshold(data, a, instances, min_leaf))
        .filter(|c| c.gain > 1e-12)
        .collect()
}

/// Highest gain ratio among candidates whose gain reaches the mean gain.
/// Ties keep the earlier attribute.
pub fn choose_split(candidates: &[CandidateSplit]) -> Option<&CandidateSplit> {
    if candidates.is_empty() {
        return None;
    }
    let mean = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
    let mut best: Option<&CandidateSplit> = None;
    for c in candidates.iter().filter(|c| c.gain >= mean - 1e-12) {
        if best.is_none_or(|b| c.gain_ratio > b.gain_ratio) {
            best = Some(c);
        }
    }
    best
}
