use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::AssociationRule;
use crate::discretize::token_attribute;

/// Matches a token or an attribute name (`HousingUnits` matches every
/// `HousingUnits_RangeK` token; `Target` matches both target tokens).
fn term_matches(term: &str, token: &str) -> bool {
    token == term || token_attribute(token) == Some(term)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "side", content = "term", rename_all = "snake_case")]
pub enum RulePredicate {
    /// Term appears on either side.
    Mentions(String),
    Antecedent(String),
    Consequent(String),
}

impl RulePredicate {
    pub fn matches(&self, rule: &AssociationRule) -> bool {
        let any = |side: &[String], term: &str| side.iter().any(|t| term_matches(term, t));
        match self {
            RulePredicate::Mentions(t) => any(&rule.antecedent, t) || any(&rule.consequent, t),
            RulePredicate::Antecedent(t) => any(&rule.antecedent, t),
            RulePredicate::Consequent(t) => any(&rule.consequent, t),
        }
    }
}

/// Conjunction of predicates; the empty filter keeps everything.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleFilter {
    pub predicates: Vec<RulePredicate>,
}

impl RuleFilter {
    pub fn mentions<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        RuleFilter {
            predicates: terms
                .into_iter()
                .map(|t| RulePredicate::Mentions(t.into()))
                .collect(),
        }
    }

    pub fn and(mut self, p: RulePredicate) -> Self {
        self.predicates.push(p);
        self
    }

    pub fn matches(&self, rule: &AssociationRule) -> bool {
        self.predicates.iter().all(|p| p.matches(rule))
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("bad rule filter term `{0}`; expected [ante:|cons:]NAME")]
pub struct FilterParseError(pub String);

/// Parses `term,ante:term,cons:term`. Bare terms match either side.
impl FromStr for RuleFilter {
    type Err = FilterParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut f = RuleFilter::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let p = match part.split_once(':') {
                None => RulePredicate::Mentions(part.to_string()),
                Some(("ante", t)) if !t.is_empty() => RulePredicate::Antecedent(t.to_string()),
                Some(("cons", t)) if !t.is_empty() => RulePredicate::Consequent(t.to_string()),
                Some(("any", t)) if !t.is_empty() => RulePredicate::Mentions(t.to_string()),
                _ => return Err(FilterParseError(part.to_string())),
            };
            f.predicates.push(p);
        }
        Ok(f)
    }
}

/// Rules matching `filter`, in their original order.
pub fn filter_rules(rules: &[AssociationRule], filter: &RuleFilter) -> Vec<AssociationRule> {
    rules.iter().filter(|r| filter.matches(r)).cloned().collect()
}
