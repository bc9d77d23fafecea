//! Level-wise Apriori frequent-itemset mining and association rules over
//! range-token transactions.

mod apriori;
mod filter;
mod rules;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use apriori::{frequent_itemsets, frequent_itemsets_with};
pub use filter::{filter_rules, FilterParseError, RuleFilter, RulePredicate};
pub use rules::{generate_rules, render_rules};

pub const DEFAULT_MIN_SUPPORT: f64 = 0.2;
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.7;

#[derive(Debug, Error, PartialEq)]
pub enum MineError {
    #[error("no transactions to mine")]
    EmptyDataset,
    #[error("minimum support must be in (0, 1], got {0}")]
    InvalidSupport(f64),
    #[error("minimum confidence must be in (0, 1], got {0}")]
    InvalidConfidence(f64),
    #[error("support of subset {0:?} is missing from the itemset list")]
    MissingSubsetSupport(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequentItemset {
    /// Sorted, duplicate-free tokens.
    pub items: Vec<String>,
    pub support_count: usize,
    pub support: f64,
}

/// `antecedent -> consequent` with support of the union and confidence
/// `support(union) / support(antecedent)`. Both sides sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssociationRule {
    pub antecedent: Vec<String>,
    pub consequent: Vec<String>,
    pub support: f64,
    pub confidence: f64,
}

impl AssociationRule {
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.antecedent
            .iter()
            .chain(&self.consequent)
            .map(String::as_str)
    }
}

impl fmt::Display for AssociationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {}",
            self.antecedent.join(" "),
            self.consequent.join(" ")
        )
    }
}

pub(crate) fn support_of(count: usize, transactions: usize) -> f64 {
    count as f64 / transactions as f64
}
