use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{format_grouped, ModelBundle, SdssError};
use crate::discretize::{parse_token, FIRST_RANGE};
use crate::dtree::{ensemble_predict, PathStep, TestOp};
use crate::label::{Label, TARGET_ATTRIBUTE, TARGET_SPRAWL};
use crate::rulemine::{filter_rules, AssociationRule, RuleFilter, RulePredicate};

/// Supporting rules cited per prediction.
const MAX_CITED_RULES: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExplanationItem {
    /// A decision-path test satisfied by the assignment.
    Condition {
        attribute: String,
        op: TestOp,
        threshold: f64,
        text: String,
    },
    Rule {
        rule: String,
        support: f64,
        confidence: f64,
    },
    Note { text: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub confidence: f64,
    pub explanation: Vec<ExplanationItem>,
    /// `prior`, `tree`, `bagging` or `boosting`.
    pub provenance: String,
}

fn condition_text(attribute: &str, op: TestOp, threshold: f64, units: &str) -> String {
    let verb = match op {
        TestOp::Below => "is less than",
        TestOp::AtOrAbove => "is at least",
    };
    let units = if units.is_empty() {
        String::new()
    } else {
        format!(" {units}")
    };
    format!("{attribute} {verb} {}{units}", format_grouped(threshold))
}

/// Binned token of each assigned attribute that has bins.
fn assignment_tokens(bundle: &ModelBundle, assignment: &BTreeMap<String, f64>) -> Vec<String> {
    assignment
        .iter()
        .filter_map(|(a, &v)| bundle.binning.token(a, v).map(str::to_string))
        .collect()
}

fn check_assignment(bundle: &ModelBundle, assignment: &BTreeMap<String, f64>) -> Result<(), SdssError> {
    for (name, value) in assignment {
        if bundle.attribute(name).is_none() {
            return Err(SdssError::UnknownAttribute(name.clone()));
        }
        if !value.is_finite() {
            return Err(SdssError::NonFiniteValue(name.clone()));
        }
    }
    Ok(())
}

/// Ensemble vote on a partial assignment. Absent attributes are handled by
/// fractional descent. The explanation lists the path tests of members that
/// voted for the returned label, then up to three rules concluding that
/// label whose antecedents the binned assignment satisfies.
pub fn predict_sprawl(
    bundle: &ModelBundle,
    assignment: &BTreeMap<String, f64>,
) -> Result<Prediction, SdssError> {
    check_assignment(bundle, assignment)?;
    if assignment.is_empty() {
        let label = bundle.prior.majority();
        let total = bundle.prior.total();
        return Ok(Prediction {
            label,
            confidence: if total > 0.0 { bundle.prior.get(label) / total } else { 0.5 },
            explanation: vec![ExplanationItem::Note {
                text: "no conditions supplied".into(),
            }],
            provenance: "prior".into(),
        });
    }
    let ensemble = bundle.ensemble.as_ref().ok_or(SdssError::NoModel)?;
    let result = ensemble_predict(ensemble, assignment);

    let mut explanation = Vec::new();
    for vote in result.votes.iter().filter(|v| v.label == result.label) {
        for step in &vote.path {
            if let PathStep::Test { attribute, op, threshold } = step {
                let item = ExplanationItem::Condition {
                    attribute: attribute.clone(),
                    op: *op,
                    threshold: *threshold,
                    text: condition_text(attribute, *op, *threshold, bundle.units(attribute)),
                };
                if !explanation.contains(&item) {
                    explanation.push(item);
                }
            }
        }
    }

    let tokens = assignment_tokens(bundle, assignment);
    let target = result.label.target_token();
    let cited = bundle
        .rules
        .iter()
        .filter(|r| r.consequent.iter().any(|t| t == target))
        .filter(|r| r.antecedent.iter().all(|t| tokens.contains(t)))
        .take(MAX_CITED_RULES);
    for r in cited {
        explanation.push(ExplanationItem::Rule {
            rule: r.to_string(),
            support: r.support,
            confidence: r.confidence,
        });
    }
    if explanation.is_empty() {
        explanation.push(ExplanationItem::Note {
            text: "no tree test or rule applies to the supplied attributes".into(),
        });
    }
    Ok(Prediction {
        label: result.label,
        confidence: result.confidence,
        explanation,
        provenance: ensemble.kind.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpactReport {
    pub a: String,
    pub b: String,
    pub value: Option<f64>,
    /// Bin of `value` when one was supplied.
    pub a_token: Option<String>,
    /// B's implied range (or sprawl outcome) from the strongest rule.
    pub headline: Option<String>,
    pub b_token: Option<String>,
    pub rules: Vec<AssociationRule>,
    pub note: Option<String>,
}

fn check_subject(bundle: &ModelBundle, name: &str) -> Result<(), SdssError> {
    if name == TARGET_ATTRIBUTE {
        return Ok(());
    }
    if bundle.attribute(name).is_none() {
        return Err(SdssError::UnknownAttribute(name.to_string()));
    }
    if bundle.binning.get(name).is_none() {
        return Err(SdssError::NotBinned(name.to_string()));
    }
    Ok(())
}

/// Text for the range a token stands for, e.g. `less than 20,000`.
fn token_headline(bundle: &ModelBundle, token: &str) -> Option<String> {
    let (attr, k) = parse_token(token)?;
    if attr == TARGET_ATTRIBUTE {
        return Some(if token == TARGET_SPRAWL {
            "sprawl is likely".into()
        } else {
            "sprawl is unlikely".into()
        });
    }
    let range = bundle.binning.get(attr)?.range(k - FIRST_RANGE);
    Some(match (range.lower, range.upper) {
        (None, Some(u)) => format!("less than {}", format_grouped(u)),
        (Some(l), Some(u)) => format!("between {} and {}", format_grouped(l), format_grouped(u)),
        (Some(l), None) => format!("greater than {}", format_grouped(l)),
        (None, None) => "any value".into(),
    })
}

/// Rules whose antecedent mentions `a` and whose consequent mentions `b`,
/// strongest first. A supplied value for `a` keeps only rules whose
/// antecedent contains its bin.
pub fn query_impact(
    bundle: &ModelBundle,
    a: &str,
    b: &str,
    value: Option<f64>,
) -> Result<ImpactReport, SdssError> {
    if a == b {
        return Err(SdssError::SameSubject(a.to_string()));
    }
    check_subject(bundle, a)?;
    check_subject(bundle, b)?;
    let a_token = match value {
        None => None,
        Some(_) if a == TARGET_ATTRIBUTE => return Err(SdssError::ValueNotApplicable(a.to_string())),
        Some(v) if !v.is_finite() => return Err(SdssError::NonFiniteValue(a.to_string())),
        Some(v) => bundle.binning.token(a, v).map(str::to_string),
    };
    let filter = RuleFilter::default()
        .and(RulePredicate::Antecedent(a.to_string()))
        .and(RulePredicate::Consequent(b.to_string()));
    let mut rules = filter_rules(&bundle.rules, &filter);
    if let Some(t) = &a_token {
        rules.retain(|r| r.antecedent.contains(t));
    }
    let b_token = rules.first().and_then(|r| {
        r.consequent
            .iter()
            .find(|t| parse_token(t).is_some_and(|(attr, _)| attr == b))
            .cloned()
    });
    let headline = b_token.as_deref().and_then(|t| token_headline(bundle, t));
    let note = rules.is_empty().then(|| match &a_token {
        Some(t) => format!("no rules link {t} to {b}"),
        None => format!("no rules link {a} to {b}"),
    });
    Ok(ImpactReport {
        a: a.to_string(),
        b: b.to_string(),
        value,
        a_token,
        headline,
        b_token,
        rules,
        note,
    })
}
