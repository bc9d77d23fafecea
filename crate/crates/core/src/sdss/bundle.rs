use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::SdssError;
use crate::discretize::{token_attribute, BinningScheme};
use crate::dtree::{ClassWeights, DecisionTree, Ensemble, Node, TrainParams};
use crate::label::TARGET_ATTRIBUTE;
use crate::rulemine::AssociationRule;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeMeta {
    pub name: String,
    #[serde(default)]
    pub units: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleParams {
    pub min_support: f64,
    pub min_confidence: f64,
}

/// Everything a running decision-support service needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u64,
    pub target: String,
    pub binning: BinningScheme,
    pub rules: Vec<AssociationRule>,
    pub rule_params: RuleParams,
    pub ensemble: Option<Ensemble>,
    pub single_tree: Option<DecisionTree>,
    pub attribute_metadata: Vec<AttributeMeta>,
    /// Training label counts.
    pub prior: ClassWeights,
    /// Hex SHA-256 of the training data files.
    pub dataset_fingerprint: String,
    pub training_params: TrainParams,
}

impl ModelBundle {
    pub fn attribute(&self, name: &str) -> Option<&AttributeMeta> {
        self.attribute_metadata.iter().find(|a| a.name == name)
    }

    pub fn units(&self, name: &str) -> &str {
        self.attribute(name).map(|a| a.units.as_str()).unwrap_or("")
    }

    /// Every attribute named by the binning, rules or trees has metadata.
    pub fn validate(&self) -> Result<(), SdssError> {
        let known: BTreeSet<&str> = self.attribute_metadata.iter().map(|a| a.name.as_str()).collect();
        let check = |name: &str, place: &str| {
            if name == TARGET_ATTRIBUTE || known.contains(name) {
                Ok(())
            } else {
                Err(SdssError::InvalidBundle(format!("{place} names unknown attribute `{name}`")))
            }
        };
        for b in &self.binning.attributes {
            check(&b.attribute, "binning")?;
        }
        for r in &self.rules {
            for t in r.tokens() {
                let attr = token_attribute(t)
                    .ok_or_else(|| SdssError::InvalidBundle(format!("rule token `{t}` is malformed")))?;
                check(attr, "rule")?;
            }
        }
        let mut trees: Vec<&DecisionTree> = self.single_tree.iter().collect();
        if let Some(e) = &self.ensemble {
            if e.members.is_empty() {
                return Err(SdssError::InvalidBundle("ensemble has no members".into()));
            }
            trees.extend(e.members.iter().map(|m| &m.tree));
        }
        for t in trees {
            let mut stack = vec![&t.root];
            while let Some(node) = stack.pop() {
                if let Node::Split(s) = node {
                    check(&s.attribute, "tree")?;
                    stack.push(&s.below);
                    stack.push(&s.at_or_above);
                }
            }
        }
        Ok(())
    }
}

fn checksum(payload: &Value) -> String {
    let bytes = serde_json::to_vec(payload).expect("value serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// JSON envelope `{format_version, checksum, bundle}`; the checksum is the
/// SHA-256 of the compact serialisation of `bundle`.
pub fn save_bundle(bundle: &ModelBundle) -> Result<String, SdssError> {
    let payload = serde_json::to_value(bundle)
        .map_err(|e| SdssError::InvalidBundle(e.to_string()))?;
    let doc = json!({
        "format_version": bundle.format_version,
        "checksum": checksum(&payload),
        "bundle": payload,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("value serializes"))
}

pub fn load_bundle(text: &str) -> Result<ModelBundle, SdssError> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| SdssError::CorruptBundle(e.to_string()))?;
    let found = doc["format_version"]
        .as_u64()
        .ok_or_else(|| SdssError::CorruptBundle("missing format_version".into()))?;
    if found != FORMAT_VERSION {
        return Err(SdssError::VersionMismatch {
            found,
            expected: FORMAT_VERSION,
        });
    }
    let stored = doc["checksum"]
        .as_str()
        .ok_or_else(|| SdssError::CorruptBundle("missing checksum".into()))?;
    let payload = &doc["bundle"];
    if checksum(payload) != stored {
        return Err(SdssError::CorruptBundle("checksum mismatch".into()));
    }
    let bundle: ModelBundle = serde_json::from_value(payload.clone())
        .map_err(|e| SdssError::CorruptBundle(e.to_string()))?;
    if bundle.format_version != found {
        return Err(SdssError::CorruptBundle("envelope and bundle versions differ".into()));
    }
    bundle.validate()?;
    Ok(bundle)
}

pub fn write_bundle(bundle: &ModelBundle, path: &Path) -> Result<(), SdssError> {
    std::fs::write(path, save_bundle(bundle)?)?;
    Ok(())
}

pub fn read_bundle(path: &Path) -> Result<ModelBundle, SdssError> {
    load_bundle(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::discretize::{AttributeBins, BinStrategy};
    use crate::dtree::{EnsembleKind, Leaf, Member, Split};
    use crate::label::Label;

    /// Stump on PopulationDensity at 420 and one housing rule.
    pub(crate) fn stump_bundle() -> ModelBundle {
        let tree = DecisionTree {
            root: Node::Split(Split {
                attribute: "PopulationDensity".into(),
                threshold: 420.0,
                below: Box::new(Node::Leaf(Leaf { label: Label::N, correct: 40.0, misclassified: 0.0 })),
                at_or_above: Box::new(Node::Leaf(Leaf { label: Label::Y, correct: 22.0, misclassified: 0.0 })),
                below_fraction: 40.0 / 62.0,
                above_fraction: 22.0 / 62.0,
                training: ClassWeights { n: 40.0, y: 22.0 },
            }),
            attributes: vec!["PopulationDensity".into()],
        };
        let bins = |a: &str, cuts: Vec<f64>| AttributeBins {
            attribute: a.into(),
            strategy: BinStrategy::Explicit,
            labels: (0..=cuts.len()).map(|i| format!("{a}_Range{}", i + 2)).collect(),
            cuts,
        };
        ModelBundle {
            format_version: FORMAT_VERSION,
            target: "Target".into(),
            binning: BinningScheme {
                attributes: vec![
                    bins("PopulationDensity", vec![420.0]),
                    bins("HousingUnits", vec![30000.0, 100000.0]),
                    bins("ElectricHeating", vec![20000.0, 50000.0]),
                ],
            },
            rules: vec![
                AssociationRule {
                    antecedent: vec!["HousingUnits_Range3".into()],
                    consequent: vec!["ElectricHeating_Range2".into()],
                    support: 0.3,
                    confidence: 0.9,
                },
                AssociationRule {
                    antecedent: vec!["PopulationDensity_Range3".into()],
                    consequent: vec!["Target_Sprawl".into()],
                    support: 0.35,
                    confidence: 1.0,
                },
            ],
            rule_params: RuleParams { min_support: 0.2, min_confidence: 0.7 },
            ensemble: Some(Ensemble {
                kind: EnsembleKind::Single,
                members: vec![Member { tree: tree.clone(), weight: 1.0 }],
                seed: 1,
            }),
            single_tree: Some(tree),
            attribute_metadata: vec![
                AttributeMeta { name: "PopulationDensity".into(), units: "per square mile".into(), min: 10.0, max: 70000.0 },
                AttributeMeta { name: "HousingUnits".into(), units: "units".into(), min: 1000.0, max: 900000.0 },
                AttributeMeta { name: "ElectricHeating".into(), units: "housing units".into(), min: 100.0, max: 90000.0 },
            ],
            prior: ClassWeights { n: 40.0, y: 22.0 },
            dataset_fingerprint: "00".repeat(32),
            training_params: TrainParams::default(),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let mut b = stump_bundle();
        b.attribute_metadata[0].min = 0.1 + 0.2;
        let back = load_bundle(&save_bundle(&b).unwrap()).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.attribute_metadata[0].min.to_bits(), (0.1f64 + 0.2).to_bits());
    }

    #[test]
    fn tampered_rule_is_corrupt() {
        let text = save_bundle(&stump_bundle()).unwrap();
        let tampered = text.replacen("\"confidence\": 0.9", "\"confidence\": 0.8", 1);
        assert_ne!(tampered, text);
        assert!(matches!(load_bundle(&tampered), Err(SdssError::CorruptBundle(_))));
        assert!(matches!(load_bundle("{not json"), Err(SdssError::CorruptBundle(_))));
    }

    #[test]
    fn future_version_names_both() {
        let text = save_bundle(&stump_bundle()).unwrap();
        let mut doc: Value = serde_json::from_str(&text).unwrap();
        doc["format_version"] = json!(7);
        let err = load_bundle(&doc.to_string()).unwrap_err();
        assert!(matches!(err, SdssError::VersionMismatch { found: 7, expected: 1 }));
        let msg = err.to_string();
        assert!(msg.contains('7') && msg.contains('1'));
    }

    #[test]
    fn unknown_tree_attribute_is_invalid() {
        let mut b = stump_bundle();
        b.attribute_metadata.remove(0);
        b.binning.attributes.remove(0);
        b.rules.pop();
        assert!(matches!(b.validate(), Err(SdssError::InvalidBundle(_))));
    }
}
