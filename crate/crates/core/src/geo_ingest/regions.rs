use std::collections::{BTreeMap, HashMap};

use super::{CountyGeometry, IngestError};
use crate::label::Label;
use crate::table::AttributeTable;

/// County geometries with one sprawl label per county for a given year.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledRegionSet {
    geometries: Vec<CountyGeometry>,
    labels: BTreeMap<String, Label>,
    year: i32,
}

impl LabeledRegionSet {
    /// Every label key must name exactly one geometry. Geometries without a
    /// label are allowed here and rejected at export.
    pub fn new(
        geometries: Vec<CountyGeometry>,
        labels: BTreeMap<String, Label>,
        year: i32,
    ) -> Result<Self, IngestError> {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for g in &geometries {
            *counts.entry(g.key.as_str()).or_default() += 1;
        }
        for key in labels.keys() {
            if counts.get(key.as_str()) != Some(&1) {
                return Err(IngestError::OrphanLabel(key.clone()));
            }
        }
        Ok(LabeledRegionSet {
            geometries,
            labels,
            year,
        })
    }

    pub fn geometries(&self) -> &[CountyGeometry] {
        &self.geometries
    }

    pub fn labels(&self) -> &BTreeMap<String, Label> {
        &self.labels
    }

    pub fn year(&self) -> i32 {
        self.year
    }
}

/// Copies keys and names from a shapefile's DBF sidecar onto its geometries,
/// matching on record number.
pub fn attach_keys(
    geometries: &mut [CountyGeometry],
    dbf: &AttributeTable,
    record_numbers: &[i32],
    key_field: &str,
    name_field: &str,
) -> Result<(), IngestError> {
    let k = dbf
        .column_index(key_field)
        .ok_or_else(|| IngestError::MissingField(key_field.to_string()))?;
    let n = dbf
        .column_index(name_field)
        .ok_or_else(|| IngestError::MissingField(name_field.to_string()))?;
    let by_record: HashMap<i32, usize> = record_numbers
        .iter()
        .enumerate()
        .map(|(row, &rec)| (rec, row))
        .collect();
    for g in geometries.iter_mut() {
        let row = by_record
            .get(&g.record_id)
            .map(|&r| &dbf.rows()[r])
            .ok_or_else(|| IngestError::InvalidGeometry {
                record: g.record_id,
                reason: "no attribute record".into(),
            })?;
        g.key = row[k].key_text().unwrap_or_default();
        g.name = row[n].to_string();
    }
    Ok(())
}

/// Reads a shapefile and its DBF sidecar, keys the geometries by
/// `key_field`, and attaches `labels`.
pub fn load_regions(
    shp: &[u8],
    dbf: &[u8],
    key_field: &str,
    name_field: &str,
    labels: BTreeMap<String, Label>,
    year: i32,
) -> Result<LabeledRegionSet, IngestError> {
    let mut geometries = super::parse_shapefile(shp)?;
    let records = super::parse_dbf_records(dbf, Some(key_field))?;
    attach_keys(&mut geometries, &records.table, &records.record_numbers, key_field, name_field)?;
    LabeledRegionSet::new(geometries, labels, year)
}

/// Reads key → label from a table's key column and a Y/N target column.
pub fn labels_from_table(
    table: &AttributeTable,
    target_column: &str,
) -> Result<BTreeMap<String, Label>, IngestError> {
    let t = table
        .column_index(target_column)
        .ok_or_else(|| IngestError::MissingField(target_column.to_string()))?;
    table
        .keys()
        .into_iter()
        .zip(table.rows())
        .map(|(key, row)| {
            let text = row[t].to_string();
            let label = text.parse::<Label>().map_err(|value| IngestError::BadLabel {
                key: key.clone(),
                value,
            })?;
            Ok((key, label))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo_ingest::parse_csv;

    fn square(record_id: i32, key: &str) -> CountyGeometry {
        let mut g = CountyGeometry::new(
            record_id,
            vec![vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (0.0, 0.0)]],
        )
        .unwrap();
        g.key = key.into();
        g
    }

    #[test]
    fn label_without_geometry_is_rejected() {
        let labels = BTreeMap::from([("36079".to_string(), Label::Y)]);
        assert!(matches!(
            LabeledRegionSet::new(vec![square(1, "36103")], labels, 2010),
            Err(IngestError::OrphanLabel(k)) if k == "36079"
        ));
    }

    #[test]
    fn labels_read_from_target_column() {
        let t = parse_csv("FIPS,Target\n36103,Y\n36079,N\n", "FIPS", Some("Target")).unwrap();
        let labels = labels_from_table(&t, "Target").unwrap();
        assert_eq!(labels["36103"], Label::Y);
        assert_eq!(labels["36079"], Label::N);

        let bad = parse_csv("FIPS,Target\n36103,maybe\n", "FIPS", Some("Target")).unwrap();
        assert!(matches!(
            labels_from_table(&bad, "Target"),
            Err(IngestError::BadLabel { .. })
        ));
    }

    #[test]
    fn keys_attach_by_record_number() {
        let dbf = parse_csv("GEOID,NAME\n36103,Suffolk\n36079,Putnam\n", "GEOID", None).unwrap();
        let mut geoms = vec![square(2, ""), square(1, "")];
        attach_keys(&mut geoms, &dbf, &[1, 2], "GEOID", "NAME").unwrap();
        assert_eq!(geoms[0].key, "36079");
        assert_eq!(geoms[1].name, "Suffolk");
    }
}
