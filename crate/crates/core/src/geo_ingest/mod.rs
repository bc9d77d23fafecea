//! Geometry and attribute ingestion: polygon shapefiles, dBASE sidecars, CSV
//! attribute tables, and key joins between them.

mod csv_table;
mod dbf;
mod join;
mod regions;
mod shp;
#[cfg(any(test, feature = "test-harness"))]
pub mod testing;

use thiserror::Error;

use crate::table::TableError;

pub use csv_table::parse_csv;
pub use dbf::{parse_dbf, parse_dbf_records, DbfRecords};
pub use join::{join_tables, Joined};
pub use regions::{attach_keys, labels_from_table, load_regions, LabeledRegionSet};
pub use shp::parse_shapefile;

/// Shapefile `FileCode` (big-endian at offset 0).
pub const SHP_FILE_CODE: i32 = 9994;
/// Shapefile version (little-endian at offset 28).
pub const SHP_VERSION: i32 = 1000;
pub const SHAPE_NULL: i32 = 0;
pub const SHAPE_POLYGON: i32 = 5;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("bad shapefile file code {0}, expected 9994")]
    BadMagic(i32),
    #[error("unsupported shapefile version {0}")]
    BadVersion(i32),
    #[error("unsupported shape type {0}; only polygons (5) are read")]
    UnsupportedShapeType(i32),
    #[error("truncated input: need {needed} bytes at offset {offset}, {available} available")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("record {record}: {reason}")]
    InvalidGeometry { record: i32, reason: String },
    #[error("unknown dBASE field type `{0}`")]
    BadFieldType(char),
    #[error("dBASE record length {declared} does not match field lengths ({computed})")]
    HeaderMismatch { declared: usize, computed: usize },
    #[error("field `{field}`: cannot read `{value}` as a number")]
    BadNumber { field: String, value: String },
    #[error("field `{0}` not found")]
    MissingField(String),
    #[error("label for `{0}` has no matching geometry")]
    OrphanLabel(String),
    #[error("invalid label `{value}` for `{key}`; expected Y or N")]
    BadLabel { key: String, value: String },
    #[error("csv: {0}")]
    Csv(#[from] ::csv::Error),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// One county polygon. Coordinates are (longitude, latitude) in degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct CountyGeometry {
    pub record_id: i32,
    pub key: String,
    pub name: String,
    pub rings: Vec<Vec<(f64, f64)>>,
    /// (min_lon, min_lat, max_lon, max_lat)
    pub bbox: (f64, f64, f64, f64),
}

impl CountyGeometry {
    /// Builds a geometry, checking ring closure and computing the bbox.
    pub fn new(
        record_id: i32,
        rings: Vec<Vec<(f64, f64)>>,
    ) -> Result<CountyGeometry, IngestError> {
        let bad = |reason: String| IngestError::InvalidGeometry {
            record: record_id,
            reason,
        };
        let mut bbox = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        for (i, ring) in rings.iter().enumerate() {
            if ring.len() < 4 {
                return Err(bad(format!("ring {i} has {} points, need 4", ring.len())));
            }
            if ring.first() != ring.last() {
                return Err(bad(format!("ring {i} is not closed")));
            }
            for &(x, y) in ring {
                if !x.is_finite() || !y.is_finite() {
                    return Err(bad(format!("ring {i} has a non-finite coordinate")));
                }
                bbox.0 = bbox.0.min(x);
                bbox.1 = bbox.1.min(y);
                bbox.2 = bbox.2.max(x);
                bbox.3 = bbox.3.max(y);
            }
        }
        if rings.is_empty() {
            return Err(bad("polygon has no rings".into()));
        }
        Ok(CountyGeometry {
            record_id,
            key: String::new(),
            name: String::new(),
            rings,
            bbox,
        })
    }
}
