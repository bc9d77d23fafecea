//! Range discretization of continuous attributes and row tokenization.
//!
//! Bins are half-open from below: `(lo, hi]`, with the lowest bin closed
//! below, so a value equal to a cut falls in the lower bin. Bin labels are
//! `<Attr>_Range<K>` with `K` starting at 2.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::{Label, TARGET_ATTRIBUTE};
use crate::table::{AttributeTable, ColumnKind};

/// Number of the first range label.
pub const FIRST_RANGE: usize = 2;
pub const DEFAULT_BINS: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum DiscretizeError {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute `{0}` is not continuous")]
    NonContinuousAttribute(String),
    #[error("cannot fit bins on an empty table")]
    EmptyTable,
    #[error("bin count must be at least 2, got {0}")]
    InvalidBinCount(usize),
    #[error("attribute `{attribute}`: {reason}")]
    InvalidCuts { attribute: String, reason: String },
    #[error("binning scheme does not fit the table: {0}")]
    SchemeTableMismatch(String),
    #[error("row `{key}`: target value `{value}` is not Y or N")]
    BadTarget { key: String, value: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinStrategy {
    EqualFrequency,
    EqualWidth,
    Explicit,
}

/// How to bin one attribute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum BinSpec {
    EqualFrequency { bins: usize },
    EqualWidth { bins: usize },
    Explicit { cuts: Vec<f64> },
}

impl Default for BinSpec {
    fn default() -> Self {
        BinSpec::EqualFrequency { bins: DEFAULT_BINS }
    }
}

/// Fitted bins for one attribute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeBins {
    pub attribute: String,
    pub strategy: BinStrategy,
    pub cuts: Vec<f64>,
    pub labels: Vec<String>,
}

/// Bounds of one bin; `None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinRange {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl AttributeBins {
    fn new(attribute: &str, strategy: BinStrategy, cuts: Vec<f64>) -> AttributeBins {
        let labels = (0..=cuts.len())
            .map(|i| range_label(attribute, i + FIRST_RANGE))
            .collect();
        AttributeBins {
            attribute: attribute.to_string(),
            strategy,
            cuts,
            labels,
        }
    }

    /// Zero-based bin of `value`: the number of cuts strictly below it.
    pub fn bin_index(&self, value: f64) -> usize {
        self.cuts.partition_point(|&c| c < value)
    }

    pub fn label_for(&self, value: f64) -> &str {
        &self.labels[self.bin_index(value)]
    }

    pub fn range(&self, index: usize) -> BinRange {
        BinRange {
            lower: index.checked_sub(1).and_then(|i| self.cuts.get(i).copied()),
            upper: self.cuts.get(index).copied(),
        }
    }
}

pub fn range_label(attribute: &str, k: usize) -> String {
    format!("{attribute}_Range{k}")
}

/// Splits `Attr_RangeK` into `("Attr", K)`. Target tokens map to
/// `("Target", 0)` / `("Target", 1)` for no-sprawl / sprawl.
pub fn parse_token(token: &str) -> Option<(&str, usize)> {
    if token == Label::Y.target_token() {
        return Some((TARGET_ATTRIBUTE, 1));
    }
    if token == Label::N.target_token() {
        return Some((TARGET_ATTRIBUTE, 0));
    }
    let (attr, k) = token.rsplit_once("_Range")?;
    let k: usize = k.parse().ok()?;
    (k >= FIRST_RANGE && !attr.is_empty()).then_some((attr, k))
}

/// Attribute a token belongs to.
pub fn token_attribute(token: &str) -> Option<&str> {
    parse_token(token).map(|(a, _)| a)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BinningScheme {
    pub attributes: Vec<AttributeBins>,
}

impl BinningScheme {
    pub fn get(&self, attribute: &str) -> Option<&AttributeBins> {
        self.attributes.iter().find(|b| b.attribute == attribute)
    }

    /// Token for `value` of `attribute`, if the attribute is binned.
    pub fn token(&self, attribute: &str, value: f64) -> Option<&str> {
        self.get(attribute).map(|b| b.label_for(value))
    }

    /// Checks cut ordering and label layout of every entry.
    pub fn validate(&self) -> Result<(), DiscretizeError> {
        for b in &self.attributes {
            check_cuts(&b.attribute, &b.cuts)?;
            let expected = AttributeBins::new(&b.attribute, b.strategy, b.cuts.clone());
            if b.labels != expected.labels {
                return Err(DiscretizeError::InvalidCuts {
                    attribute: b.attribute.clone(),
                    reason: "labels do not match cut count".into(),
                });
            }
        }
        Ok(())
    }
}

/// Per-attribute binning choices; attributes not listed use `default`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BinningPlan {
    pub default: BinSpec,
    pub attributes: BTreeMap<String, BinSpec>,
    pub exclude: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BinningWarning {
    /// Attribute has a single distinct value (or none); one bin produced.
    Constant { attribute: String },
    /// Too few distinct values for the requested bin count.
    FewerBins {
        attribute: String,
        requested: usize,
        produced: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittedScheme {
    pub scheme: BinningScheme,
    pub warnings: Vec<BinningWarning>,
}

fn check_cuts(attribute: &str, cuts: &[f64]) -> Result<(), DiscretizeError> {
    let bad = |reason: &str| DiscretizeError::InvalidCuts {
        attribute: attribute.to_string(),
        reason: reason.to_string(),
    };
    if cuts.iter().any(|c| !c.is_finite()) {
        return Err(bad("cut points must be finite"));
    }
    if cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("cut points must be strictly increasing"));
    }
    Ok(())
}

/// Cut points at the order statistics `round(i·n/k)` for `i in 1..k`,
/// interpolated halfway between neighbouring sorted values.
fn equal_frequency_cuts(sorted: &[f64], bins: usize) -> Vec<f64> {
    let n = sorted.len();
    let mut cuts: Vec<f64> = Vec::with_capacity(bins - 1);
    for i in 1..bins {
        let p = ((i * n + bins / 2) / bins).clamp(1, n - 1);
        if sorted[p - 1] == sorted[p] {
            continue;
        }
        let cut = (sorted[p - 1] + sorted[p]) / 2.0;
        if cuts.last().is_none_or(|&l| cut > l) {
            cuts.push(cut);
        }
    }
    let max = sorted[n - 1];
    cuts.retain(|&c| c < max);
    cuts
}

fn equal_width_cuts(min: f64, max: f64, bins: usize) -> Vec<f64> {
    let width = (max - min) / bins as f64;
    (1..bins).map(|i| min + width * i as f64).collect()
}

fn fit_one(
    table: &AttributeTable,
    attribute: &str,
    spec: &BinSpec,
    warnings: &mut Vec<BinningWarning>,
) -> Result<AttributeBins, DiscretizeError> {
    let column = table
        .column(attribute)
        .ok_or_else(|| DiscretizeError::UnknownAttribute(attribute.to_string()))?;
    if column.kind != ColumnKind::Continuous {
        return Err(DiscretizeError::NonContinuousAttribute(attribute.to_string()));
    }
    let mut values: Vec<f64> = table
        .numeric_column(attribute)
        .expect("column exists")
        .into_iter()
        .flatten()
        .collect();
    values.sort_by(f64::total_cmp);

    let (strategy, requested, cuts) = match spec {
        BinSpec::Explicit { cuts } => {
            check_cuts(attribute, cuts)?;
            return Ok(AttributeBins::new(attribute, BinStrategy::Explicit, cuts.clone()));
        }
        &BinSpec::EqualFrequency { bins } | &BinSpec::EqualWidth { bins } if bins < 2 => {
            return Err(DiscretizeError::InvalidBinCount(bins));
        }
        _ if values.first() == values.last() => {
            log::warn!("attribute `{attribute}` is constant; using one bin");
            warnings.push(BinningWarning::Constant {
                attribute: attribute.to_string(),
            });
            let strategy = match spec {
                BinSpec::EqualWidth { .. } => BinStrategy::EqualWidth,
                _ => BinStrategy::EqualFrequency,
            };
            return Ok(AttributeBins::new(attribute, strategy, Vec::new()));
        }
        &BinSpec::EqualFrequency { bins } => (
            BinStrategy::EqualFrequency,
            bins,
            equal_frequency_cuts(&values, bins),
        ),
        &BinSpec::EqualWidth { bins } => (
            BinStrategy::EqualWidth,
            bins,
            equal_width_cuts(values[0], values[values.len() - 1], bins),
        ),
    };
    if cuts.len() + 1 < requested {
        log::warn!(
            "attribute `{attribute}`: {} bins instead of {requested}",
            cuts.len() + 1
        );
        warnings.push(BinningWarning::FewerBins {
            attribute: attribute.to_string(),
            requested,
            produced: cuts.len() + 1,
        });
    }
    Ok(AttributeBins::new(attribute, strategy, cuts))
}

/// Fits the same bin spec on each named attribute.
pub fn fit_binning(
    table: &AttributeTable,
    attributes: &[&str],
    spec: &BinSpec,
) -> Result<FittedScheme, DiscretizeError> {
    if table.is_empty() {
        return Err(DiscretizeError::EmptyTable);
    }
    let mut warnings = Vec::new();
    let attributes = attributes
        .iter()
        .map(|a| fit_one(table, a, spec, &mut warnings))
        .collect::<Result<_, _>>()?;
    Ok(FittedScheme {
        scheme: BinningScheme { attributes },
        warnings,
    })
}

/// Fits every continuous attribute of `table` not excluded by the plan.
pub fn fit_plan(table: &AttributeTable, plan: &BinningPlan) -> Result<FittedScheme, DiscretizeError> {
    if table.is_empty() {
        return Err(DiscretizeError::EmptyTable);
    }
    for name in plan.attributes.keys() {
        if table.column(name).is_none() {
            return Err(DiscretizeError::UnknownAttribute(name.clone()));
        }
    }
    let exclude: Vec<&str> = plan.exclude.iter().map(String::as_str).collect();
    let mut warnings = Vec::new();
    let attributes = table
        .continuous_columns(&exclude)
        .into_iter()
        .map(|a| {
            let spec = plan.attributes.get(a).unwrap_or(&plan.default);
            fit_one(table, a, spec, &mut warnings)
        })
        .collect::<Result<_, _>>()?;
    Ok(FittedScheme {
        scheme: BinningScheme { attributes },
        warnings,
    })
}

/// Rows as token sets, one range token per binned attribute with a value plus
/// one target token.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TokenizedDataset {
    pub transactions: Vec<Vec<String>>,
    pub vocabulary: Vec<String>,
    pub target_tokens: Vec<String>,
    /// Row key of each transaction.
    pub provenance: Vec<String>,
}

pub fn tokenize(
    table: &AttributeTable,
    scheme: &BinningScheme,
    target_column: &str,
) -> Result<TokenizedDataset, DiscretizeError> {
    let target = table.column_index(target_column).ok_or_else(|| {
        DiscretizeError::SchemeTableMismatch(format!("target column `{target_column}` missing"))
    })?;
    let mut binned = Vec::with_capacity(scheme.attributes.len());
    for bins in &scheme.attributes {
        let idx = table.column_index(&bins.attribute).ok_or_else(|| {
            DiscretizeError::SchemeTableMismatch(format!("attribute `{}` missing", bins.attribute))
        })?;
        if table.columns()[idx].kind != ColumnKind::Continuous {
            return Err(DiscretizeError::SchemeTableMismatch(format!(
                "attribute `{}` is not continuous",
                bins.attribute
            )));
        }
        binned.push((idx, bins));
    }

    let keys = table.keys();
    let mut vocabulary = BTreeSet::new();
    let mut transactions = Vec::with_capacity(table.len());
    for (row, key) in table.rows().iter().zip(&keys) {
        let label: Label = row[target]
            .to_string()
            .parse()
            .map_err(|value| DiscretizeError::BadTarget {
                key: key.clone(),
                value,
            })?;
        let mut tokens: Vec<String> = binned
            .iter()
            .filter_map(|(idx, bins)| row[*idx].as_number().map(|x| bins.label_for(x).to_string()))
            .collect();
        tokens.push(label.target_token().to_string());
        tokens.sort();
        vocabulary.extend(tokens.iter().cloned());
        transactions.push(tokens);
    }
    Ok(TokenizedDataset {
        transactions,
        vocabulary: vocabulary.into_iter().collect(),
        target_tokens: vec![
            Label::Y.target_token().to_string(),
            Label::N.target_token().to_string(),
        ],
        provenance: keys,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo_ingest::parse_csv;
    use proptest::prelude::*;

    fn single_column(values: &[f64]) -> AttributeTable {
        let mut s = String::from("K,X\n");
        for (i, v) in values.iter().enumerate() {
            s.push_str(&format!("{i},{v}\n"));
        }
        parse_csv(&s, "K", None).unwrap()
    }

    #[test]
    fn equal_frequency_midpoint() {
        let t = single_column(&[5.0, 10.0, 15.0, 20.0]);
        let f = fit_binning(&t, &["X"], &BinSpec::EqualFrequency { bins: 2 }).unwrap();
        let b = &f.scheme.attributes[0];
        assert_eq!(b.cuts, vec![12.5]);
        assert_eq!(b.labels, vec!["X_Range2", "X_Range3"]);
        assert!(f.warnings.is_empty());
    }

    #[test]
    fn constant_column_gives_one_bin() {
        let t = single_column(&[7.0, 7.0, 7.0]);
        for spec in [
            BinSpec::EqualFrequency { bins: 3 },
            BinSpec::EqualWidth { bins: 4 },
        ] {
            let f = fit_binning(&t, &["X"], &spec).unwrap();
            assert!(f.scheme.attributes[0].cuts.is_empty());
            assert_eq!(f.scheme.attributes[0].labels, vec!["X_Range2"]);
            assert_eq!(
                f.warnings,
                vec![BinningWarning::Constant { attribute: "X".into() }]
            );
        }
    }

    #[test]
    fn too_few_distinct_values_falls_back() {
        let t = single_column(&[1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        let f = fit_binning(&t, &["X"], &BinSpec::EqualFrequency { bins: 4 }).unwrap();
        assert_eq!(f.scheme.attributes[0].cuts, vec![1.5]);
        assert!(matches!(
            f.warnings[0],
            BinningWarning::FewerBins { requested: 4, produced: 2, .. }
        ));
    }

    #[test]
    fn explicit_income_cut() {
        let t = parse_csv("K,Income\na,8\nb,10\nc,12.5\n", "K", None).unwrap();
        let f = fit_binning(&t, &["Income"], &BinSpec::Explicit { cuts: vec![10.0] }).unwrap();
        let b = &f.scheme.attributes[0];
        assert_eq!(b.label_for(12.5), "Income_Range3");
        assert_eq!(b.label_for(10.0), "Income_Range2");
        assert_eq!(b.label_for(8.0), "Income_Range2");
    }

    #[test]
    fn explicit_cuts_are_validated() {
        let t = single_column(&[1.0, 2.0]);
        let e = fit_binning(&t, &["X"], &BinSpec::Explicit { cuts: vec![3.0, 3.0] });
        assert!(matches!(e, Err(DiscretizeError::InvalidCuts { .. })));
    }

    #[test]
    fn equal_width() {
        let t = single_column(&[0.0, 3.0, 9.0]);
        let f = fit_binning(&t, &["X"], &BinSpec::EqualWidth { bins: 3 }).unwrap();
        assert_eq!(f.scheme.attributes[0].cuts, vec![3.0, 6.0]);
        assert_eq!(f.scheme.attributes[0].label_for(3.0), "X_Range2");
    }

    #[test]
    fn fit_errors() {
        let t = parse_csv("K,Name,X\na,Albany,1\n", "K", None).unwrap();
        assert_eq!(
            fit_binning(&t, &["Y"], &BinSpec::default()),
            Err(DiscretizeError::UnknownAttribute("Y".into()))
        );
        assert_eq!(
            fit_binning(&t, &["Name"], &BinSpec::default()),
            Err(DiscretizeError::NonContinuousAttribute("Name".into()))
        );
        let empty = parse_csv("K,X\n", "K", None).unwrap();
        assert_eq!(
            fit_binning(&empty, &["X"], &BinSpec::default()),
            Err(DiscretizeError::EmptyTable)
        );
    }

    #[test]
    fn tokenize_housing_and_target() {
        let t = parse_csv(
            "FIPS,HousingUnits,Target\n36103,150000,Y\n36079,40000,N\n36027,,N\n",
            "FIPS",
            Some("Target"),
        )
        .unwrap();
        let f = fit_binning(&t, &["HousingUnits"], &BinSpec::Explicit { cuts: vec![100000.0] })
            .unwrap();
        let d = tokenize(&t, &f.scheme, "Target").unwrap();
        assert_eq!(d.transactions[0], vec!["HousingUnits_Range3", "Target_Sprawl"]);
        assert_eq!(d.transactions[1], vec!["HousingUnits_Range2", "Target_NoSprawl"]);
        assert_eq!(d.transactions[2], vec!["Target_NoSprawl"]);
        assert_eq!(d.provenance, vec!["36103", "36079", "36027"]);
        assert!(d
            .transactions
            .iter()
            .flatten()
            .all(|tok| d.vocabulary.contains(tok)));
    }

    #[test]
    fn tokenize_empty_table() {
        let t = parse_csv("FIPS,X,Target\n", "FIPS", Some("Target")).unwrap();
        let scheme = BinningScheme {
            attributes: vec![AttributeBins::new("X", BinStrategy::Explicit, vec![1.0])],
        };
        let d = tokenize(&t, &scheme, "Target").unwrap();
        assert!(d.transactions.is_empty());
    }

    #[test]
    fn tokenize_rejects_mismatched_scheme() {
        let t = parse_csv("FIPS,X,Target\n1,2,Y\n", "FIPS", Some("Target")).unwrap();
        let scheme = BinningScheme {
            attributes: vec![AttributeBins::new("Z", BinStrategy::Explicit, vec![1.0])],
        };
        assert!(matches!(
            tokenize(&t, &scheme, "Target"),
            Err(DiscretizeError::SchemeTableMismatch(_))
        ));
    }

    #[test]
    fn scheme_json_round_trip() {
        let scheme = BinningScheme {
            attributes: vec![AttributeBins::new("X", BinStrategy::EqualFrequency, vec![0.1, 12.5])],
        };
        let text = serde_json::to_string(&scheme).unwrap();
        assert!(text.contains("\"equal_frequency\""));
        let back: BinningScheme = serde_json::from_str(&text).unwrap();
        assert_eq!(back, scheme);
        back.validate().unwrap();
    }

    #[test]
    fn plan_json() {
        let plan: BinningPlan = serde_json::from_str(
            r#"{"default": {"strategy": "equal_frequency", "bins": 3},
                "attributes": {"Income": {"strategy": "explicit", "cuts": [10]}}}"#,
        )
        .unwrap();
        assert_eq!(plan.attributes["Income"], BinSpec::Explicit { cuts: vec![10.0] });
    }

    #[test]
    fn tokens_parse_back() {
        assert_eq!(parse_token("BirthRate_Range2"), Some(("BirthRate", 2)));
        assert_eq!(parse_token("Target_Sprawl"), Some(("Target", 1)));
        assert_eq!(parse_token("Range2"), None);
        assert_eq!(parse_token("X_Range1"), None);
    }

    fn values_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop_oneof![
            prop::collection::vec(-1000.0f64..1000.0, 1..60),
            // heavy ties
            prop::collection::vec((0i32..6).prop_map(f64::from), 1..60),
        ]
    }

    proptest! {
        #[test]
        fn binning_is_monotone(values in values_strategy(), bins in 2usize..6, a in -1200.0f64..1200.0, b in -1200.0f64..1200.0) {
            let t = single_column(&values);
            for spec in [BinSpec::EqualFrequency { bins }, BinSpec::EqualWidth { bins }] {
                let f = fit_binning(&t, &["X"], &spec).unwrap();
                let bins = &f.scheme.attributes[0];
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(bins.bin_index(lo) <= bins.bin_index(hi));
                prop_assert!(bins.cuts.windows(2).all(|w| w[0] < w[1]));
                prop_assert_eq!(bins.labels.len(), bins.cuts.len() + 1);
            }
        }

        #[test]
        fn tokens_invert_to_bins(values in values_strategy(), bins in 2usize..6) {
            let t = single_column(&values);
            let f = fit_binning(&t, &["X"], &BinSpec::EqualFrequency { bins }).unwrap();
            let b = &f.scheme.attributes[0];
            for &v in &values {
                let (attr, k) = parse_token(b.label_for(v)).unwrap();
                prop_assert_eq!(attr, "X");
                prop_assert_eq!(k - FIRST_RANGE, b.bin_index(v));
            }
        }

        /// Each cut leaves `round(i·n/k)` values at or below it, give or take
        /// the number of values tied at the order statistic it was placed on.
        #[test]
        fn equal_frequency_populations(values in values_strategy(), bins in 2usize..6) {
            let t = single_column(&values);
            let f = fit_binning(&t, &["X"], &BinSpec::EqualFrequency { bins }).unwrap();
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len();
            for &cut in &f.scheme.attributes[0].cuts {
                let below = sorted.iter().filter(|&&v| v <= cut).count();
                let matched = (1..bins).any(|i| {
                    let p = ((i * n + bins / 2) / bins).clamp(1, n - 1);
                    let tie = sorted[p - 1];
                    let tie_mass = sorted.iter().filter(|&&v| v == tie).count();
                    below.abs_diff(p) <= tie_mass.saturating_sub(1)
                });
                prop_assert!(matched, "cut {} leaves {} below", cut, below);
            }
            if sorted.iter().all(|v| sorted.iter().filter(|&w| w == v).count() == 1) {
                // without ties the populations differ by at most one
                let b = &f.scheme.attributes[0];
                let mut counts = vec![0usize; b.labels.len()];
                for &v in &values { counts[b.bin_index(v)] += 1; }
                if b.labels.len() == bins {
                    let (min, max) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
                    prop_assert!(max - min <= 1, "{:?}", counts);
                }
            }
        }
    }
}
