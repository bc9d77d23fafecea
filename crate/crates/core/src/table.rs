//! Rectangular county × attribute tables.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Column typing. Continuous columns hold finite numbers or [`Cell::Missing`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    Continuous,
    Categorical,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Column {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    /// Text used when the cell serves as a join key. Integral numbers print
    /// without a fractional part so `36103.0` and `"36103"` match.
    pub fn key_text(&self) -> Option<String> {
        match self {
            Cell::Text(s) => Some(s.clone()),
            Cell::Number(x) if x.fract() == 0.0 && x.abs() < 1e15 => Some(format!("{}", *x as i64)),
            Cell::Number(x) => Some(x.to_string()),
            Cell::Missing => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Number(x) => write!(f, "{x}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Missing => Ok(()),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TableError {
    #[error("key column `{0}` not found")]
    MissingKeyColumn(String),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("key cell missing in row {0}")]
    MissingKey(usize),
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column `{column}`: {reason}")]
    BadCell {
        row: usize,
        column: String,
        reason: &'static str,
    },
    #[error("tables do not share a column layout: {0}")]
    SchemaMismatch(String),
}

/// A validated attribute table: rectangular, unique column names, unique
/// non-missing keys, continuous cells finite or missing.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributeTable {
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
    key_column: String,
}

impl AttributeTable {
    pub fn new(
        columns: Vec<Column>,
        rows: Vec<Vec<Cell>>,
        key_column: impl Into<String>,
    ) -> Result<Self, TableError> {
        let key_column = key_column.into();
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(TableError::DuplicateColumn(c.name.clone()));
            }
        }
        let key_idx = columns
            .iter()
            .position(|c| c.name == key_column)
            .ok_or_else(|| TableError::MissingKeyColumn(key_column.clone()))?;

        let mut keys = HashSet::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(TableError::RaggedRow {
                    row: r,
                    expected: columns.len(),
                    found: row.len(),
                });
            }
            for (cell, col) in row.iter().zip(&columns) {
                match (col.kind, cell) {
                    (ColumnKind::Continuous, Cell::Number(x)) if !x.is_finite() => {
                        return Err(TableError::BadCell {
                            row: r,
                            column: col.name.clone(),
                            reason: "non-finite number",
                        })
                    }
                    (ColumnKind::Continuous, Cell::Text(_)) => {
                        return Err(TableError::BadCell {
                            row: r,
                            column: col.name.clone(),
                            reason: "text in continuous column",
                        })
                    }
                    _ => {}
                }
            }
            let key = row[key_idx].key_text().ok_or(TableError::MissingKey(r))?;
            if !keys.insert(key.clone()) {
                return Err(TableError::DuplicateKey(key));
            }
        }
        Ok(AttributeTable {
            columns,
            rows,
            key_column,
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn key_column(&self) -> &str {
        &self.key_column
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Key text of every row, in row order.
    pub fn keys(&self) -> Vec<String> {
        let k = self.column_index(&self.key_column).expect("validated key column");
        self.rows
            .iter()
            .map(|r| r[k].key_text().expect("validated key cell"))
            .collect()
    }

    /// Names of continuous columns other than `exclude`, in column order.
    pub fn continuous_columns<'a>(&'a self, exclude: &[&str]) -> Vec<&'a str> {
        self.columns
            .iter()
            .filter(|c| c.kind == ColumnKind::Continuous)
            .filter(|c| c.name != self.key_column && !exclude.contains(&c.name.as_str()))
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Numeric values of a column; `None` for missing cells.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[idx].as_number()).collect())
    }

    /// Returns the rows at `indices` as a new table with the same layout.
    pub fn select_rows(&self, indices: &[usize]) -> Result<AttributeTable, TableError> {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        AttributeTable::new(self.columns.clone(), rows, self.key_column.clone())
    }

    /// Stacks tables with identical column names, prefixing every key with the
    /// part's tag (`"2000:36103"`) so keys stay unique across parts.
    pub fn stack(parts: &[(&str, &AttributeTable)]) -> Result<AttributeTable, TableError> {
        let Some((_, first)) = parts.first() else {
            return Err(TableError::SchemaMismatch("no tables to stack".into()));
        };
        let mut columns = first.columns.clone();
        for (tag, t) in &parts[1..] {
            let names_match = t.columns.len() == columns.len()
                && t.columns.iter().zip(&columns).all(|(a, b)| a.name == b.name)
                && t.key_column == first.key_column;
            if !names_match {
                return Err(TableError::SchemaMismatch(format!(
                    "part `{tag}` columns differ from the first part"
                )));
            }
            for (merged, other) in columns.iter_mut().zip(&t.columns) {
                if merged.kind != other.kind {
                    return Err(TableError::SchemaMismatch(format!(
                        "column `{}` is {:?} in one part and {:?} in part `{tag}`",
                        merged.name, merged.kind, other.kind
                    )));
                }
            }
        }
        let key_idx = first.column_index(&first.key_column).expect("validated");
        let mut rows = Vec::new();
        for (tag, t) in parts {
            for row in &t.rows {
                let mut row = row.clone();
                let key = row[key_idx].key_text().expect("validated");
                row[key_idx] = Cell::Text(format!("{tag}:{key}"));
                rows.push(row);
            }
        }
        if let Some(c) = columns.get_mut(key_idx) {
            c.kind = ColumnKind::Text;
        }
        AttributeTable::new(columns, rows, first.key_column.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols() -> Vec<Column> {
        vec![
            Column::new("FIPS", ColumnKind::Text),
            Column::new("Density", ColumnKind::Continuous),
        ]
    }

    #[test]
    fn rejects_ragged_and_duplicate_rows() {
        let ragged = AttributeTable::new(cols(), vec![vec![Cell::Text("1".into())]], "FIPS");
        assert!(matches!(ragged, Err(TableError::RaggedRow { .. })));

        let dup = AttributeTable::new(
            cols(),
            vec![
                vec![Cell::Text("36103".into()), Cell::Number(1.0)],
                vec![Cell::Text("36103".into()), Cell::Missing],
            ],
            "FIPS",
        );
        assert_eq!(dup, Err(TableError::DuplicateKey("36103".into())));
    }

    #[test]
    fn rejects_non_finite_continuous_cells() {
        let t = AttributeTable::new(
            cols(),
            vec![vec![Cell::Text("1".into()), Cell::Number(f64::NAN)]],
            "FIPS",
        );
        assert!(matches!(t, Err(TableError::BadCell { .. })));
    }

    #[test]
    fn numeric_key_text_matches_text_key() {
        assert_eq!(Cell::Number(36103.0).key_text().unwrap(), "36103");
        assert_eq!(Cell::Text("36103".into()).key_text().unwrap(), "36103");
    }

    #[test]
    fn stack_prefixes_keys() {
        let a = AttributeTable::new(
            cols(),
            vec![vec![Cell::Text("36103".into()), Cell::Number(1.0)]],
            "FIPS",
        )
        .unwrap();
        let s = AttributeTable::stack(&[("2000", &a), ("2010", &a)]).unwrap();
        assert_eq!(s.keys(), vec!["2000:36103", "2010:36103"]);
    }
}
