//! Knowledge discovery over county-level GIS data for urban sprawl analysis.
//!
//! The crate is organised as a pipeline:
//!
//! * [`geo_ingest`] reads polygon shapefiles, dBASE sidecars and CSV attribute
//!   tables, and joins attribute data onto geometry keys.
//! * [`discretize`] fits per-attribute range bins and turns rows into
//!   `Attr_RangeK` token transactions.
//! * [`rulemine`] runs level-wise Apriori and generates association rules.
//! * [`dtree`] induces gain-ratio threshold trees, prunes them against held-out
//!   rows and combines them by bagging or AdaBoost.M1.
//! * [`sdss`] bundles the trained artifacts and answers what-if queries.
//! * [`mapviz`] exports per-year sprawl choropleths as GeoJSON.
//!
//! Data-parallel inner loops (support counting, ensemble rounds) go through
//! [`exec::Execution`]; build without the default `parallel` feature for a
//! purely sequential library.

pub mod discretize;
pub mod dtree;
pub mod exec;
pub mod geo_ingest;
pub mod label;
pub mod mapviz;
pub mod rulemine;
pub mod sdss;
pub mod table;

pub use exec::Execution;
pub use label::Label;
pub use table::{AttributeTable, Cell, Column, ColumnKind, TableError};
