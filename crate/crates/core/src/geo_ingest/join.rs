use std::collections::{HashMap, HashSet};

use super::IngestError;
use crate::table::{AttributeTable, Column, TableError};

/// Result of an inner join: the merged table and how many input rows (left
/// plus right) found no partner.
#[derive(Clone, Debug, PartialEq)]
pub struct Joined {
    pub table: AttributeTable,
    pub unmatched: usize,
}

fn key_index(table: &AttributeTable, key: &str) -> Result<HashMap<String, usize>, IngestError> {
    let k = table
        .column_index(key)
        .ok_or_else(|| TableError::MissingKeyColumn(key.to_string()))?;
    let mut index = HashMap::with_capacity(table.len());
    for (r, row) in table.rows().iter().enumerate() {
        let Some(text) = row[k].key_text() else {
            return Err(TableError::MissingKey(r).into());
        };
        if index.insert(text.clone(), r).is_some() {
            return Err(TableError::DuplicateKey(text).into());
        }
    }
    Ok(index)
}

/// Inner join on `key`. Result columns are the left columns followed by the
/// right columns without its key; a right column whose name is already taken
/// gets a `_right` suffix. Rows keep left order.
pub fn join_tables(
    left: &AttributeTable,
    right: &AttributeTable,
    key: &str,
) -> Result<Joined, IngestError> {
    let left_index = key_index(left, key)?;
    let right_index = key_index(right, key)?;
    let lk = left.column_index(key).expect("indexed");
    let rk = right.column_index(key).expect("indexed");

    let mut columns: Vec<Column> = left.columns().to_vec();
    let mut taken: HashSet<String> = columns.iter().map(|c| c.name.clone()).collect();
    let mut right_cols = Vec::new();
    for (i, c) in right.columns().iter().enumerate() {
        if i == rk {
            continue;
        }
        let mut name = c.name.clone();
        while taken.contains(&name) {
            name.push_str("_right");
        }
        taken.insert(name.clone());
        columns.push(Column::new(name, c.kind));
        right_cols.push(i);
    }

    let mut rows = Vec::new();
    for row in left.rows() {
        let k = row[lk].key_text().expect("indexed");
        if let Some(&r) = right_index.get(&k) {
            let other = &right.rows()[r];
            let mut merged = row.clone();
            merged.extend(right_cols.iter().map(|&i| other[i].clone()));
            rows.push(merged);
        }
    }
    let unmatched = (left_index.len() - rows.len()) + (right_index.len() - rows.len());
    if unmatched > 0 {
        log::info!("join on `{key}`: {unmatched} rows without a partner dropped");
    }
    let table = AttributeTable::new(columns, rows, key)?;
    Ok(Joined { table, unmatched })
}
