use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use super::{AttributeMeta, ModelBundle, RuleParams, SdssError, FORMAT_VERSION};
use crate::discretize::{fit_plan, tokenize, BinningPlan, FittedScheme};
use crate::dtree::{
    bagging_fit_on, boosting_fit_on, single_fit_on, ClassWeights, Ensemble, EnsembleKind, Member,
    TrainParams, TrainingSet,
};
use crate::exec::Execution;
use crate::label::TARGET_ATTRIBUTE;
use crate::rulemine::{
    frequent_itemsets_with, generate_rules, AssociationRule, FrequentItemset,
    DEFAULT_MIN_CONFIDENCE, DEFAULT_MIN_SUPPORT,
};
use crate::table::AttributeTable;

/// Hex SHA-256 over the given byte strings in order.
pub fn fingerprint(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug)]
pub struct MinedRules {
    pub fitted: FittedScheme,
    pub itemsets: Vec<FrequentItemset>,
    pub rules: Vec<AssociationRule>,
    pub transactions: usize,
}

/// Bins `table` by `plan`, tokenizes it with the target and mines rules.
pub fn mine_rules(
    table: &AttributeTable,
    plan: &BinningPlan,
    target: &str,
    min_support: f64,
    min_confidence: f64,
    exec: Execution,
) -> Result<MinedRules, SdssError> {
    let fitted = fit_plan(table, plan)?;
    let data = tokenize(table, &fitted.scheme, target)?;
    let itemsets = frequent_itemsets_with(&data.transactions, min_support, exec)?;
    let rules = generate_rules(&itemsets, min_confidence)?;
    Ok(MinedRules {
        fitted,
        itemsets,
        rules,
        transactions: data.transactions.len(),
    })
}

#[derive(Clone, Debug)]
pub struct TrainingConfig {
    pub target: String,
    pub method: EnsembleKind,
    pub params: TrainParams,
    pub binning: BinningPlan,
    pub min_support: f64,
    pub min_confidence: f64,
    /// Display units per attribute.
    pub units: BTreeMap<String, String>,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            target: TARGET_ATTRIBUTE.to_string(),
            method: EnsembleKind::Bagging,
            params: TrainParams::default(),
            binning: BinningPlan::default(),
            min_support: DEFAULT_MIN_SUPPORT,
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            units: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainingOutput {
    pub bundle: ModelBundle,
    pub warnings: Vec<String>,
}

/// Fits bins, mines rules, grows the single pruned tree and the configured
/// ensemble, and assembles the bundle.
pub fn train_bundle(
    table: &AttributeTable,
    dataset_fingerprint: String,
    config: &TrainingConfig,
    exec: Execution,
) -> Result<TrainingOutput, SdssError> {
    config.params.validate()?;
    let mut warnings = Vec::new();
    let mined = mine_rules(
        table,
        &config.binning,
        &config.target,
        config.min_support,
        config.min_confidence,
        exec,
    )?;
    warnings.extend(mined.fitted.warnings.iter().map(|w| format!("{w:?}")));

    let data = TrainingSet::from_table(table, &config.target)?;
    let (single, prune_warning) = single_fit_on(&data, &config.params)?;
    if let Some(w) = prune_warning {
        warnings.push(w.to_string());
    }
    let ensemble = match config.method {
        EnsembleKind::Single => Ensemble {
            kind: EnsembleKind::Single,
            members: vec![Member {
                tree: single.clone(),
                weight: 1.0,
            }],
            seed: config.params.seed,
        },
        EnsembleKind::Bagging => bagging_fit_on(&data, &config.params, exec)?,
        EnsembleKind::Boosting => boosting_fit_on(&data, &config.params)?.0,
    };

    let mut prior = ClassWeights::default();
    for &l in data.labels() {
        prior.add(l, 1.0);
    }
    let attribute_metadata: Vec<AttributeMeta> = data
        .attributes()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let values = (0..data.len()).filter_map(|r| data.value(i, r));
            let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
            AttributeMeta {
                name: name.clone(),
                units: config.units.get(name).cloned().unwrap_or_default(),
                min: if min.is_finite() { min } else { 0.0 },
                max: if max.is_finite() { max } else { 0.0 },
            }
        })
        .collect();
    for name in config.units.keys() {
        if data.attribute_index(name).is_none() {
            warnings.push(format!("units given for unknown attribute `{name}`"));
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let bundle = ModelBundle {
        format_version: FORMAT_VERSION,
        target: config.target.clone(),
        binning: mined.fitted.scheme,
        rules: mined.rules,
        rule_params: RuleParams {
            min_support: config.min_support,
            min_confidence: config.min_confidence,
        },
        ensemble: Some(ensemble),
        single_tree: Some(single),
        attribute_metadata,
        prior,
        dataset_fingerprint,
        training_params: config.params.clone(),
    };
    bundle.validate()?;
    Ok(TrainingOutput { bundle, warnings })
}
