//! dBASE III/IV attribute table reader for shapefile sidecars.

use byteorder::{ByteOrder, LittleEndian};

use super::IngestError;
use crate::table::{AttributeTable, Cell, Column, ColumnKind};

const DELETED: u8 = 0x2A;
const FIELD_TERMINATOR: u8 = 0x0D;

struct FieldDescriptor {
    name: String,
    kind: u8,
    width: usize,
}

/// A parsed DBF with the 1-based record number of each retained row, for
/// matching rows to shapefile records when some were deleted.
pub struct DbfRecords {
    pub table: AttributeTable,
    pub record_numbers: Vec<i32>,
}

/// Parses a `.dbf`. N/F fields become continuous columns, C/D/L become text.
/// `key_field` defaults to the first field.
pub fn parse_dbf(bytes: &[u8], key_field: Option<&str>) -> Result<AttributeTable, IngestError> {
    parse_dbf_records(bytes, key_field).map(|r| r.table)
}

pub fn parse_dbf_records(bytes: &[u8], key_field: Option<&str>) -> Result<DbfRecords, IngestError> {
    let header = bytes.get(0..32).ok_or(IngestError::Truncated {
        offset: 0,
        needed: 32,
        available: bytes.len(),
    })?;
    let record_count = LittleEndian::read_u32(&header[4..8]) as usize;
    let header_len = LittleEndian::read_u16(&header[8..10]) as usize;
    let record_len = LittleEndian::read_u16(&header[10..12]) as usize;

    let mut fields = Vec::new();
    let mut at = 32;
    loop {
        match bytes.get(at) {
            None => {
                return Err(IngestError::Truncated {
                    offset: at,
                    needed: 1,
                    available: 0,
                })
            }
            Some(&FIELD_TERMINATOR) => break,
            Some(_) => {}
        }
        let d = bytes.get(at..at + 32).ok_or(IngestError::Truncated {
            offset: at,
            needed: 32,
            available: bytes.len() - at,
        })?;
        let raw_name = &d[..11];
        let end = raw_name.iter().position(|&b| b == 0).unwrap_or(11);
        let name = latin1(&raw_name[..end]).trim().to_string();
        let kind = d[11];
        if !matches!(kind, b'C' | b'N' | b'F' | b'D' | b'L') {
            return Err(IngestError::BadFieldType(kind as char));
        }
        fields.push(FieldDescriptor {
            name,
            kind,
            width: d[16] as usize,
        });
        at += 32;
    }

    let computed = 1 + fields.iter().map(|f| f.width).sum::<usize>();
    if computed != record_len {
        return Err(IngestError::HeaderMismatch {
            declared: record_len,
            computed,
        });
    }
    let data_len = record_count * record_len;
    let data = bytes
        .get(header_len..header_len + data_len)
        .ok_or(IngestError::Truncated {
            offset: header_len,
            needed: data_len,
            available: bytes.len().saturating_sub(header_len),
        })?;

    let columns: Vec<Column> = fields
        .iter()
        .map(|f| {
            let kind = match f.kind {
                b'N' | b'F' => ColumnKind::Continuous,
                _ => ColumnKind::Text,
            };
            Column::new(f.name.clone(), kind)
        })
        .collect();

    let mut rows = Vec::with_capacity(record_count);
    let mut record_numbers = Vec::with_capacity(record_count);
    for (r, rec) in data.chunks_exact(record_len).enumerate() {
        if rec[0] == DELETED {
            continue;
        }
        let mut offset = 1;
        let mut row = Vec::with_capacity(fields.len());
        for f in &fields {
            let raw = latin1(&rec[offset..offset + f.width]);
            offset += f.width;
            row.push(decode_cell(f, &raw)?);
        }
        rows.push(row);
        record_numbers.push(r as i32 + 1);
    }

    let key = match key_field {
        Some(k) => k.to_string(),
        None => fields
            .first()
            .map(|f| f.name.clone())
            .ok_or_else(|| IngestError::MissingField("<first field>".into()))?,
    };
    let table = AttributeTable::new(columns, rows, key)?;
    Ok(DbfRecords {
        table,
        record_numbers,
    })
}

fn decode_cell(field: &FieldDescriptor, raw: &str) -> Result<Cell, IngestError> {
    match field.kind {
        b'N' | b'F' => {
            let t = raw.trim();
            if t.is_empty() || t.chars().all(|c| c == '*' || c == '?') {
                return Ok(Cell::Missing);
            }
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Cell::Number)
                .ok_or_else(|| IngestError::BadNumber {
                    field: field.name.clone(),
                    value: t.to_string(),
                })
        }
        _ => {
            let t = raw.trim_end_matches([' ', '\0']);
            if t.is_empty() {
                Ok(Cell::Missing)
            } else {
                Ok(Cell::Text(t.to_string()))
            }
        }
    }
}

// Bytes map one-to-one onto U+0000..U+00FF.
fn latin1(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| b as char).collect()
}
