use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    build_tree_on, predict, reduced_error_prune, DecisionTree, InstanceValues, PathStep,
    PruneWarning, TrainParams, TrainingSet, TreeError,
};
use crate::exec::Execution;
use crate::label::Label;
use crate::table::AttributeTable;

/// Vote weight of a boosting member with zero training error.
pub const PERFECT_MEMBER_WEIGHT: f64 = 23.025_850_929_940_457; // ln(1e10)

/// RNG stream used to shuffle rows for the single tree's pruning holdout.
const HOLDOUT_STREAM: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// One pruned tree.
    Single,
    Bagging,
    Boosting,
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnsembleKind::Single => "tree",
            EnsembleKind::Bagging => "bagging",
            EnsembleKind::Boosting => "boosting",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub tree: DecisionTree,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub kind: EnsembleKind,
    pub members: Vec<Member>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vote {
    pub label: Label,
    pub weight: f64,
    /// The member's own probability for `label`.
    pub confidence: f64,
    pub path: Vec<PathStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsemblePrediction {
    pub label: Label,
    pub confidence: f64,
    pub votes: Vec<Vote>,
}

/// Per-round boosting state. `weights[0]` is the uniform start and
/// `weights[r + 1]` the distribution after round `r`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoostingTrace {
    pub weights: Vec<Vec<f64>>,
    pub errors: Vec<f64>,
}

fn round_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One tree grown on a shuffled share of the rows and reduced-error pruned on
/// the rest (`pruning_holdout_fraction`; 0 skips pruning).
pub fn single_fit_on(
    data: &TrainingSet,
    params: &TrainParams,
) -> Result<(DecisionTree, Option<PruneWarning>), TreeError> {
    params.validate()?;
    let n = data.len();
    if n == 0 {
        return Err(TreeError::EmptyDataset);
    }
    let holdout = ((n as f64 * params.pruning_holdout_fraction).round() as usize).min(n - 1);
    if holdout == 0 {
        return Ok((build_tree_on(data, None, params)?, None));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = round_rng(params.seed, HOLDOUT_STREAM);
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let (prune_rows, grow_rows) = order.split_at(holdout);
    let mut weights = vec![0.0; n];
    for &r in grow_rows {
        weights[r] = 1.0;
    }
    let tree = build_tree_on(data, Some(&weights), params)?;
    Ok(reduced_error_prune(&tree, &data.subset(prune_rows)))
}

pub fn bagging_fit(
    table: &AttributeTable,
    target: &str,
    params: &TrainParams,
) -> Result<Ensemble, TreeError> {
    let data = TrainingSet::from_table(table, target)?;
    bagging_fit_on(&data, params, Execution::default())
}

/// Bootstrap aggregation. Round `r` draws `n` row indices with replacement
/// from ChaCha8 seeded with `seed` on stream `r`, grows a tree weighted by
/// draw multiplicity and prunes it on the out-of-bag rows. Rounds are
/// independent, so `exec` does not change the result.
pub fn bagging_fit_on(
    data: &TrainingSet,
    params: &TrainParams,
    exec: Execution,
) -> Result<Ensemble, TreeError> {
    params.validate()?;
    let n = data.len();
    if n == 0 {
        return Err(TreeError::EmptyDataset);
    }
    let members = exec.map_range(params.rounds, |round| {
        let mut rng = round_rng(params.seed, round as u64);
        let mut weights = vec![0.0; n];
        for _ in 0..n {
            weights[rng.random_range(0..n)] += 1.0;
        }
        let oob: Vec<usize> = (0..n).filter(|&i| weights[i] == 0.0).collect();
        let tree = build_tree_on(data, Some(&weights), params)?;
        let (tree, _) = reduced_error_prune(&tree, &data.subset(&oob));
        Ok(Member { tree, weight: 1.0 })
    });
    Ok(Ensemble {
        kind: EnsembleKind::Bagging,
        members: members.into_iter().collect::<Result<_, TreeError>>()?,
        seed: params.seed,
    })
}

pub fn boosting_fit(
    table: &AttributeTable,
    target: &str,
    params: &TrainParams,
) -> Result<Ensemble, TreeError> {
    let data = TrainingSet::from_table(table, target)?;
    Ok(boosting_fit_on(&data, params)?.0)
}

/// AdaBoost.M1. Each round grows an unpruned tree on the current instance
/// weights (scaled to sum to `n`) and measures its weighted error ε.
/// ε = 0 keeps the round at [`PERFECT_MEMBER_WEIGHT`] and stops; ε ≥ 0.5
/// stops, keeping the round with weight 1 only if it is the first.
/// Otherwise the member weighs ln((1-ε)/ε) and misclassified instances are
/// multiplied by (1-ε)/ε before renormalising.
pub fn boosting_fit_on(
    data: &TrainingSet,
    params: &TrainParams,
) -> Result<(Ensemble, BoostingTrace), TreeError> {
    params.validate()?;
    let n = data.len();
    if n == 0 {
        return Err(TreeError::EmptyDataset);
    }
    let mut w = vec![1.0 / n as f64; n];
    let mut trace = BoostingTrace {
        weights: vec![w.clone()],
        errors: Vec::new(),
    };
    let mut members = Vec::new();
    for round in 0..params.rounds {
        let scaled: Vec<f64> = w.iter().map(|x| x * n as f64).collect();
        let tree = build_tree_on(data, Some(&scaled), params)?;
        let wrong: Vec<bool> = (0..n)
            .map(|i| predict(&tree, &data.row(i)).label != data.label(i))
            .collect();
        let epsilon: f64 = (0..n).filter(|&i| wrong[i]).map(|i| w[i]).sum();
        trace.errors.push(epsilon);
        if epsilon <= 0.0 {
            members.push(Member { tree, weight: PERFECT_MEMBER_WEIGHT });
            break;
        }
        if epsilon >= 0.5 {
            if round == 0 {
                members.push(Member { tree, weight: 1.0 });
            }
            break;
        }
        let beta = (1.0 - epsilon) / epsilon;
        members.push(Member { tree, weight: beta.ln() });
        for i in 0..n {
            if wrong[i] {
                w[i] *= beta;
            }
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        trace.weights.push(w.clone());
    }
    Ok((
        Ensemble {
            kind: EnsembleKind::Boosting,
            members,
            seed: params.seed,
        },
        trace,
    ))
}

/// Weighted hard vote; ties go to `N`. Confidence is the winning share of
/// the total vote weight, except that a one-member ensemble reports that
/// member's own prediction unchanged.
///
/// # Panics
/// If the ensemble has no members.
pub fn ensemble_predict<I: InstanceValues + ?Sized>(
    ensemble: &Ensemble,
    instance: &I,
) -> EnsemblePrediction {
    assert!(!ensemble.members.is_empty(), "ensemble has no members");
    let votes: Vec<Vote> = ensemble
        .members
        .iter()
        .map(|m| {
            let p = predict(&m.tree, instance);
            Vote {
                label: p.label,
                weight: m.weight,
                confidence: p.confidence,
                path: p.path,
            }
        })
        .collect();
    if let [only] = votes.as_slice() {
        return EnsemblePrediction {
            label: only.label,
            confidence: only.confidence,
            votes,
        };
    }
    let share = |l: Label| -> f64 {
        votes.iter().filter(|v| v.label == l).map(|v| v.weight).sum()
    };
    let (y, n) = (share(Label::Y), share(Label::N));
    let label = if y > n { Label::Y } else { Label::N };
    let total = y + n;
    let confidence = if total > 0.0 {
        share(label) / total
    } else {
        0.5
    };
    EnsemblePrediction {
        label,
        confidence,
        votes,
    }
}
