//! ESRI shapefile main-file reader (polygons only).
//!
//! Layout: a 100-byte header (file code and length big-endian, version and
//! shape type little-endian), then records of an 8-byte big-endian header
//! (record number, content length in 16-bit words) followed by little-endian
//! content. Polygon content is shape type, bbox, part count, point count, part
//! start indices, then x/y pairs.

use byteorder::{BigEndian, ByteOrder, LittleEndian};

use super::{CountyGeometry, IngestError, SHAPE_NULL, SHAPE_POLYGON, SHP_FILE_CODE, SHP_VERSION};

const HEADER_LEN: usize = 100;
const RECORD_HEADER_LEN: usize = 8;

fn need(bytes: &[u8], offset: usize, len: usize) -> Result<&[u8], IngestError> {
    bytes
        .get(offset..offset + len)
        .ok_or(IngestError::Truncated {
            offset,
            needed: len,
            available: bytes.len().saturating_sub(offset),
        })
}

/// Parses a complete `.shp` byte stream into polygons, in record order.
/// Null-shape records are skipped. Keys and names are left empty.
pub fn parse_shapefile(bytes: &[u8]) -> Result<Vec<CountyGeometry>, IngestError> {
    let header = need(bytes, 0, HEADER_LEN)?;
    let file_code = BigEndian::read_i32(&header[0..4]);
    if file_code != SHP_FILE_CODE {
        return Err(IngestError::BadMagic(file_code));
    }
    let version = LittleEndian::read_i32(&header[28..32]);
    if version != SHP_VERSION {
        return Err(IngestError::BadVersion(version));
    }
    let shape_type = LittleEndian::read_i32(&header[32..36]);
    if shape_type != SHAPE_POLYGON && shape_type != SHAPE_NULL {
        return Err(IngestError::UnsupportedShapeType(shape_type));
    }
    let declared = BigEndian::read_i32(&header[24..28]).max(0) as usize * 2;
    if declared > bytes.len() {
        return Err(IngestError::Truncated {
            offset: 0,
            needed: declared,
            available: bytes.len(),
        });
    }
    let end = declared.max(HEADER_LEN);

    let mut out = Vec::new();
    let mut offset = HEADER_LEN;
    while offset < end {
        let rh = need(&bytes[..end], offset, RECORD_HEADER_LEN)?;
        let record = BigEndian::read_i32(&rh[0..4]);
        let content_len = BigEndian::read_i32(&rh[4..8]).max(0) as usize * 2;
        let content = need(&bytes[..end], offset + RECORD_HEADER_LEN, content_len)?;
        if let Some(g) = parse_record(record, content, offset + RECORD_HEADER_LEN)? {
            out.push(g);
        }
        offset += RECORD_HEADER_LEN + content_len;
    }
    Ok(out)
}

fn parse_record(
    record: i32,
    content: &[u8],
    base: usize,
) -> Result<Option<CountyGeometry>, IngestError> {
    let truncated = |at: usize, len: usize| IngestError::Truncated {
        offset: base + at,
        needed: len,
        available: content.len().saturating_sub(at),
    };
    let shape_type = content
        .get(0..4)
        .map(LittleEndian::read_i32)
        .ok_or_else(|| truncated(0, 4))?;
    match shape_type {
        SHAPE_NULL => return Ok(None),
        SHAPE_POLYGON => {}
        other => return Err(IngestError::UnsupportedShapeType(other)),
    }
    // shape type (4) + bbox (32) + part count (4) + point count (4)
    let fixed = content.get(0..44).ok_or_else(|| truncated(0, 44))?;
    let num_parts = LittleEndian::read_i32(&fixed[36..40]);
    let num_points = LittleEndian::read_i32(&fixed[40..44]);
    if num_parts < 0 || num_points < 0 {
        return Err(IngestError::InvalidGeometry {
            record,
            reason: "negative part or point count".into(),
        });
    }
    let (num_parts, num_points) = (num_parts as usize, num_points as usize);
    let parts_at = 44;
    let points_at = parts_at + 4 * num_parts;
    let total = points_at + 16 * num_points;
    if content.len() < total {
        return Err(truncated(0, total));
    }

    let mut starts: Vec<usize> = Vec::with_capacity(num_parts);
    for p in 0..num_parts {
        let s = LittleEndian::read_i32(&content[parts_at + 4 * p..]);
        if s < 0 || s as usize >= num_points.max(1) || starts.last().is_some_and(|&l| s as usize <= l)
        {
            return Err(IngestError::InvalidGeometry {
                record,
                reason: format!("part index {s} out of order or range"),
            });
        }
        starts.push(s as usize);
    }

    let point = |i: usize| {
        let at = points_at + 16 * i;
        (
            LittleEndian::read_f64(&content[at..at + 8]),
            LittleEndian::read_f64(&content[at + 8..at + 16]),
        )
    };
    let rings = starts
        .iter()
        .enumerate()
        .map(|(p, &s)| {
            let e = starts.get(p + 1).copied().unwrap_or(num_points);
            (s..e).map(point).collect()
        })
        .collect();
    CountyGeometry::new(record, rings).map(Some)
}
