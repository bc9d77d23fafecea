//! Minimal shapefile and dBASE writers used to build test fixtures.
//! Not a general-purpose writer: polygons only, C/N fields only.

use byteorder::{BigEndian, ByteOrder, LittleEndian};

use super::{CountyGeometry, SHAPE_POLYGON, SHP_FILE_CODE, SHP_VERSION};

fn bbox_of<'a>(points: impl Iterator<Item = &'a (f64, f64)>) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for &(x, y) in points {
        b[0] = b[0].min(x);
        b[1] = b[1].min(y);
        b[2] = b[2].max(x);
        b[3] = b[3].max(y);
    }
    if b[0].is_infinite() {
        [0.0; 4]
    } else {
        b
    }
}

/// Serializes polygons into `.shp` bytes; record numbers come from `record_id`.
pub fn write_shp(geoms: &[CountyGeometry]) -> Vec<u8> {
    let mut out = vec![0u8; 100];
    for g in geoms {
        let points: Vec<&(f64, f64)> = g.rings.iter().flatten().collect();
        let mut content = Vec::new();
        content.extend_from_slice(&SHAPE_POLYGON.to_le_bytes());
        for v in bbox_of(points.iter().copied()) {
            content.extend_from_slice(&v.to_le_bytes());
        }
        content.extend_from_slice(&(g.rings.len() as i32).to_le_bytes());
        content.extend_from_slice(&(points.len() as i32).to_le_bytes());
        let mut start = 0i32;
        for r in &g.rings {
            content.extend_from_slice(&start.to_le_bytes());
            start += r.len() as i32;
        }
        for &&(x, y) in &points {
            content.extend_from_slice(&x.to_le_bytes());
            content.extend_from_slice(&y.to_le_bytes());
        }
        out.extend_from_slice(&g.record_id.to_be_bytes());
        out.extend_from_slice(&((content.len() / 2) as i32).to_be_bytes());
        out.extend_from_slice(&content);
    }
    BigEndian::write_i32(&mut out[0..4], SHP_FILE_CODE);
    let words = (out.len() / 2) as i32;
    BigEndian::write_i32(&mut out[24..28], words);
    LittleEndian::write_i32(&mut out[28..32], SHP_VERSION);
    LittleEndian::write_i32(&mut out[32..36], SHAPE_POLYGON);
    let all = bbox_of(geoms.iter().flat_map(|g| g.rings.iter().flatten()));
    for (i, v) in all.iter().enumerate() {
        LittleEndian::write_f64(&mut out[36 + 8 * i..44 + 8 * i], *v);
    }
    out
}

/// A dBASE field for [`write_dbf`]: name, type (`b'C'` or `b'N'`), width, decimals.
pub struct DbfField<'a> {
    pub name: &'a str,
    pub kind: u8,
    pub width: u8,
    pub decimals: u8,
}

/// Serializes a dBASE III table. Cell strings are padded to field width
/// (right-aligned for numbers). `deleted` marks records with the 0x2A flag.
pub fn write_dbf(fields: &[DbfField<'_>], records: &[(bool, Vec<String>)]) -> Vec<u8> {
    let header_len = 32 + 32 * fields.len() + 1;
    let record_len = 1 + fields.iter().map(|f| f.width as usize).sum::<usize>();
    let mut out = vec![0u8; 32];
    out[0] = 0x03;
    out[1..4].copy_from_slice(&[124, 1, 1]);
    LittleEndian::write_u32(&mut out[4..8], records.len() as u32);
    LittleEndian::write_u16(&mut out[8..10], header_len as u16);
    LittleEndian::write_u16(&mut out[10..12], record_len as u16);
    for f in fields {
        let mut d = [0u8; 32];
        let name = f.name.as_bytes();
        d[..name.len().min(10)].copy_from_slice(&name[..name.len().min(10)]);
        d[11] = f.kind;
        d[16] = f.width;
        d[17] = f.decimals;
        out.extend_from_slice(&d);
    }
    out.push(0x0D);
    for (deleted, cells) in records {
        out.push(if *deleted { 0x2A } else { 0x20 });
        for (f, cell) in fields.iter().zip(cells) {
            let w = f.width as usize;
            let s = if f.kind == b'C' {
                format!("{cell:<w$}")
            } else {
                format!("{cell:>w$}")
            };
            out.extend_from_slice(&s.as_bytes()[..w]);
        }
    }
    out.push(0x1A);
    out
}
