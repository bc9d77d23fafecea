use super::IngestError;
use crate::table::{AttributeTable, Cell, Column, ColumnKind, TableError};

/// Cell texts read as missing values.
const MISSING_MARKERS: [&str; 3] = ["", "?", "NA"];

/// Reads a header-first CSV into an [`AttributeTable`].
///
/// The key column is always text, the target column (if given) categorical.
/// Any other column whose non-missing cells all parse as finite numbers is
/// continuous; the rest are text.
pub fn parse_csv(
    csv_text: &str,
    key_column: &str,
    target_column: Option<&str>,
) -> Result<AttributeTable, IngestError> {
    let mut reader = ::csv::ReaderBuilder::new()
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if !header.iter().any(|h| h == key_column) {
        return Err(TableError::MissingKeyColumn(key_column.to_string()).into());
    }
    if let Some(t) = target_column {
        if !header.iter().any(|h| h == t) {
            return Err(IngestError::MissingField(t.to_string()));
        }
    }

    let mut raw: Vec<Vec<String>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(TableError::RaggedRow {
                row: r,
                expected: header.len(),
                found: record.len(),
            }
            .into());
        }
        raw.push(record.iter().map(str::to_string).collect());
    }

    let is_missing = |s: &str| MISSING_MARKERS.contains(&s);
    let columns: Vec<Column> = header
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let kind = if name == key_column {
                ColumnKind::Text
            } else if Some(name.as_str()) == target_column {
                ColumnKind::Categorical
            } else if raw
                .iter()
                .map(|row| row[c].as_str())
                .filter(|s| !is_missing(s))
                .all(|s| s.parse::<f64>().is_ok_and(f64::is_finite))
            {
                ColumnKind::Continuous
            } else {
                ColumnKind::Text
            };
            Column::new(name.clone(), kind)
        })
        .collect();

    let rows = raw
        .into_iter()
        .map(|row| {
            row.into_iter()
                .zip(&columns)
                .map(|(s, col)| {
                    if is_missing(&s) {
                        Cell::Missing
                    } else if col.kind == ColumnKind::Continuous {
                        Cell::Number(s.parse().expect("checked numeric"))
                    } else {
                        Cell::Text(s)
                    }
                })
                .collect()
        })
        .collect();
    Ok(AttributeTable::new(columns, rows, key_column)?)
}
