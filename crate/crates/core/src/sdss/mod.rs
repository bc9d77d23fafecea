//! Spatial decision support: the persisted model bundle, what-if queries and
//! the training pipeline that produces bundles.

mod bundle;
mod format;
mod query;
mod train;

use thiserror::Error;

pub use bundle::{
    load_bundle, read_bundle, save_bundle, write_bundle, AttributeMeta, ModelBundle, RuleParams,
    FORMAT_VERSION,
};
pub use format::format_grouped;
pub use query::{predict_sprawl, query_impact, ExplanationItem, ImpactReport, Prediction};
pub use train::{fingerprint, mine_rules, train_bundle, MinedRules, TrainingConfig, TrainingOutput};

use crate::discretize::DiscretizeError;
use crate::dtree::TreeError;
use crate::rulemine::MineError;
use crate::table::TableError;

#[derive(Debug, Error)]
pub enum SdssError {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("value for `{0}` is not a finite number")]
    NonFiniteValue(String),
    #[error("bundle has no trained ensemble")]
    NoModel,
    #[error("impact query needs two different subjects, got `{0}` twice")]
    SameSubject(String),
    #[error("attribute `{0}` has no bins, so no rules can mention it")]
    NotBinned(String),
    #[error("a value cannot be supplied for `{0}`")]
    ValueNotApplicable(String),
    #[error("bundle format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("corrupt bundle: {0}")]
    CorruptBundle(String),
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Discretize(#[from] DiscretizeError),
    #[error(transparent)]
    Mine(#[from] MineError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Table(#[from] TableError),
}

impl SdssError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SdssError::UnknownAttribute(_) => "UnknownAttribute",
            SdssError::NonFiniteValue(_) => "NonFiniteValue",
            SdssError::NoModel => "NoModel",
            SdssError::SameSubject(_) => "SameSubject",
            SdssError::NotBinned(_) => "NotBinned",
            SdssError::ValueNotApplicable(_) => "ValueNotApplicable",
            SdssError::VersionMismatch { .. } => "VersionMismatch",
            SdssError::CorruptBundle(_) => "CorruptBundle",
            SdssError::InvalidBundle(_) => "InvalidBundle",
            SdssError::Io(_) => "Io",
            SdssError::Discretize(_) => "Discretize",
            SdssError::Mine(_) => "Mine",
            SdssError::Tree(_) => "Tree",
            SdssError::Table(_) => "Table",
        }
    }
}
