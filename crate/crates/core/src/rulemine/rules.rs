use std::cmp::Ordering;
use std::collections::HashMap;

use super::{AssociationRule, FrequentItemset, MineError};

/// Emits every `antecedent -> consequent` partition of each itemset of size
/// two or more whose confidence reaches `min_confidence`. Sorted by
/// confidence, then support (both descending), then antecedent and
/// consequent lexicographically.
pub fn generate_rules(
    itemsets: &[FrequentItemset],
    min_confidence: f64,
) -> Result<Vec<AssociationRule>, MineError> {
    if !(min_confidence > 0.0 && min_confidence <= 1.0) {
        return Err(MineError::InvalidConfidence(min_confidence));
    }
    let counts: HashMap<&[String], usize> = itemsets
        .iter()
        .map(|f| (f.items.as_slice(), f.support_count))
        .collect();

    let mut rules = Vec::new();
    for set in itemsets.iter().filter(|f| f.items.len() >= 2) {
        let m = set.items.len();
        // bit i of mask set => item i in the antecedent
        for mask in 1u64..(1u64 << m) - 1 {
            let mut antecedent = Vec::new();
            let mut consequent = Vec::new();
            for (i, item) in set.items.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    antecedent.push(item.clone());
                } else {
                    consequent.push(item.clone());
                }
            }
            let antecedent_count = *counts
                .get(antecedent.as_slice())
                .ok_or_else(|| MineError::MissingSubsetSupport(antecedent.clone()))?;
            let confidence = set.support_count as f64 / antecedent_count as f64;
            if confidence >= min_confidence {
                rules.push(AssociationRule {
                    antecedent,
                    consequent,
                    support: set.support,
                    confidence,
                });
            }
        }
    }
    rules.sort_by(rule_order);
    Ok(rules)
}

fn rule_order(a: &AssociationRule, b: &AssociationRule) -> Ordering {
    b.confidence
        .total_cmp(&a.confidence)
        .then_with(|| b.support.total_cmp(&a.support))
        .then_with(|| a.antecedent.cmp(&b.antecedent))
        .then_with(|| a.consequent.cmp(&b.consequent))
}

/// One rule per line in `A1 A2 -> B1 B2` form.
pub fn render_rules(rules: &[AssociationRule]) -> String {
    rules.iter().map(|r| format!("{r}\n")).collect()
}
