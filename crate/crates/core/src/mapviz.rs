//! Choropleth GeoJSON export and year-over-year label comparison.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::geo_ingest::{CountyGeometry, LabeledRegionSet};
use crate::label::Label;

pub const SPRAWL_FILL: &str = "#d73027";
pub const NO_SPRAWL_FILL: &str = "#1a9850";

pub fn fill_for(label: Label) -> &'static str {
    match label {
        Label::Y => SPRAWL_FILL,
        Label::N => NO_SPRAWL_FILL,
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("county `{0}` has no sprawl label")]
    MissingLabel(String),
    #[error("key sets differ: only in first {only_in_a:?}, only in second {only_in_b:?}")]
    KeyMismatch {
        only_in_a: Vec<String>,
        only_in_b: Vec<String>,
    },
}

type Ring = Vec<(f64, f64)>;

#[derive(Clone, Debug, PartialEq)]
pub struct ChoroplethFeature {
    pub key: String,
    pub name: String,
    pub sprawl: Label,
    /// Polygons as exterior ring followed by holes, in GeoJSON winding.
    pub polygons: Vec<Vec<Ring>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoroplethDocument {
    pub year: i32,
    pub features: Vec<ChoroplethFeature>,
}

impl ChoroplethDocument {
    pub fn to_geojson(&self) -> Value {
        let coords = |ring: &Ring| -> Value {
            Value::Array(ring.iter().map(|&(x, y)| json!([x, y])).collect())
        };
        let features: Vec<Value> = self
            .features
            .iter()
            .map(|f| {
                let polys: Vec<Value> = f
                    .polygons
                    .iter()
                    .map(|p| Value::Array(p.iter().map(coords).collect()))
                    .collect();
                let geometry = if polys.len() == 1 {
                    json!({ "type": "Polygon", "coordinates": polys[0] })
                } else {
                    json!({ "type": "MultiPolygon", "coordinates": polys })
                };
                json!({
                    "type": "Feature",
                    "geometry": geometry,
                    "properties": {
                        "key": f.key,
                        "name": f.name,
                        "sprawl": f.sprawl.to_string(),
                        "fill": fill_for(f.sprawl),
                    }
                })
            })
            .collect();
        json!({
            "type": "FeatureCollection",
            "year": self.year,
            "features": features,
        })
    }

    pub fn to_geojson_string(&self) -> String {
        self.to_geojson().to_string()
    }
}

/// Twice the signed area; positive for counterclockwise rings.
fn signed_area(ring: &Ring) -> f64 {
    ring.windows(2)
        .map(|w| w[0].0 * w[1].1 - w[1].0 * w[0].1)
        .sum()
}

fn contains(ring: &Ring, (px, py): (f64, f64)) -> bool {
    let mut inside = false;
    for w in ring.windows(2) {
        let ((x1, y1), (x2, y2)) = (w[0], w[1]);
        if (y1 > py) != (y2 > py) && px < (x2 - x1) * (py - y1) / (y2 - y1) + x1 {
            inside = !inside;
        }
    }
    inside
}

/// Shapefile rings (clockwise exteriors, counterclockwise holes) regrouped
/// into GeoJSON polygons (counterclockwise exteriors, clockwise holes).
fn polygons(geom: &CountyGeometry) -> Vec<Vec<Ring>> {
    let mut exteriors: Vec<Vec<Ring>> = Vec::new();
    let mut holes: Vec<Ring> = Vec::new();
    for ring in &geom.rings {
        if signed_area(ring) <= 0.0 {
            let mut r = ring.clone();
            r.reverse();
            exteriors.push(vec![r]);
        } else {
            holes.push(ring.clone());
        }
    }
    if exteriors.is_empty() {
        // every ring wound the hole way: treat them as exteriors as-is
        return holes.into_iter().map(|r| vec![r]).collect();
    }
    for hole in holes {
        let owner = exteriors
            .iter()
            .position(|p| contains(&p[0], hole[0]))
            .unwrap_or(exteriors.len() - 1);
        let mut r = hole;
        r.reverse();
        exteriors[owner].push(r);
    }
    exteriors
}

/// One feature per geometry, sorted by key.
pub fn export_geojson(regions: &LabeledRegionSet) -> Result<ChoroplethDocument, MapError> {
    let mut features = regions
        .geometries()
        .iter()
        .map(|g| {
            let sprawl = *regions
                .labels()
                .get(&g.key)
                .ok_or_else(|| MapError::MissingLabel(g.key.clone()))?;
            Ok(ChoroplethFeature {
                key: g.key.clone(),
                name: g.name.clone(),
                sprawl,
                polygons: polygons(g),
            })
        })
        .collect::<Result<Vec<_>, MapError>>()?;
    features.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(ChoroplethDocument {
        year: regions.year(),
        features,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelChange {
    pub key: String,
    pub from: Label,
    pub to: Label,
}

/// Counties whose label differs between the two sets, sorted by key.
pub fn diff_years(a: &LabeledRegionSet, b: &LabeledRegionSet) -> Result<Vec<LabelChange>, MapError> {
    let ka: BTreeSet<&String> = a.labels().keys().collect();
    let kb: BTreeSet<&String> = b.labels().keys().collect();
    if ka != kb {
        return Err(MapError::KeyMismatch {
            only_in_a: ka.difference(&kb).map(|s| s.to_string()).collect(),
            only_in_b: kb.difference(&ka).map(|s| s.to_string()).collect(),
        });
    }
    Ok(a.labels()
        .iter()
        .filter_map(|(k, &from)| {
            let to = b.labels()[k];
            (from != to).then(|| LabelChange { key: k.clone(), from, to })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use proptest::prelude::*;

    fn square_cw(key: &str, x: f64, y: f64) -> CountyGeometry {
        let ring = vec![(x, y), (x, y + 1.0), (x + 1.0, y + 1.0), (x + 1.0, y), (x, y)];
        let mut g = CountyGeometry::new(1, vec![ring]).unwrap();
        g.key = key.into();
        g.name = format!("County {key}");
        g
    }

    fn labels(pairs: &[(&str, Label)]) -> BTreeMap<String, Label> {
        pairs.iter().map(|(k, l)| (k.to_string(), *l)).collect()
    }

    #[test]
    fn features_sorted_with_properties() {
        let geoms = vec![square_cw("36103", 0.0, 0.0), square_cw("36059", 2.0, 0.0)];
        let set = LabeledRegionSet::new(geoms, labels(&[("36103", Label::Y), ("36059", Label::N)]), 2010).unwrap();
        let doc = export_geojson(&set).unwrap().to_geojson();
        assert_eq!(doc["type"], "FeatureCollection");
        assert_eq!(doc["year"], 2010);
        let f = doc["features"].as_array().unwrap();
        assert_eq!(f[0]["properties"]["key"], "36059");
        assert_eq!(f[0]["properties"]["fill"], NO_SPRAWL_FILL);
        assert_eq!(f[1]["properties"]["sprawl"], "Y");
        assert_eq!(f[1]["properties"]["fill"], SPRAWL_FILL);
        assert_eq!(f[1]["properties"]["name"], "County 36103");
        assert_eq!(f[1]["geometry"]["type"], "Polygon");
    }

    #[test]
    fn exterior_becomes_counterclockwise() {
        let set = LabeledRegionSet::new(vec![square_cw("a", 0.0, 0.0)], labels(&[("a", Label::Y)]), 2000).unwrap();
        let doc = export_geojson(&set).unwrap();
        assert!(signed_area(&doc.features[0].polygons[0][0]) > 0.0);
    }

    #[test]
    fn hole_is_attached_and_clockwise() {
        let outer = vec![(0.0, 0.0), (0.0, 4.0), (4.0, 4.0), (4.0, 0.0), (0.0, 0.0)];
        let hole = vec![(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (1.0, 2.0), (1.0, 1.0)];
        let other = vec![(10.0, 0.0), (10.0, 1.0), (11.0, 1.0), (11.0, 0.0), (10.0, 0.0)];
        let mut g = CountyGeometry::new(1, vec![outer, other, hole]).unwrap();
        g.key = "k".into();
        let set = LabeledRegionSet::new(vec![g], labels(&[("k", Label::N)]), 2000).unwrap();
        let doc = export_geojson(&set).unwrap();
        let polys = &doc.features[0].polygons;
        assert_eq!(polys.len(), 2);
        assert_eq!(polys[0].len(), 2);
        assert!(signed_area(&polys[0][1]) < 0.0);
        assert_eq!(doc.to_geojson()["features"][0]["geometry"]["type"], "MultiPolygon");
    }

    #[test]
    fn missing_label() {
        let geoms = vec![square_cw("a", 0.0, 0.0), square_cw("b", 2.0, 0.0)];
        let set = LabeledRegionSet::new(geoms, labels(&[("a", Label::Y)]), 2000).unwrap();
        assert_eq!(export_geojson(&set), Err(MapError::MissingLabel("b".into())));
    }

    #[test]
    fn empty_set() {
        let set = LabeledRegionSet::new(vec![], BTreeMap::new(), 2000).unwrap();
        let doc = export_geojson(&set).unwrap().to_geojson();
        assert_eq!(doc["features"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn diff_single_flip_and_mismatch() {
        let g = || vec![square_cw("a", 0.0, 0.0), square_cw("b", 2.0, 0.0)];
        let s0 = LabeledRegionSet::new(g(), labels(&[("a", Label::N), ("b", Label::N)]), 2000).unwrap();
        let s1 = LabeledRegionSet::new(g(), labels(&[("a", Label::N), ("b", Label::Y)]), 2010).unwrap();
        assert!(diff_years(&s0, &s0).unwrap().is_empty());
        assert_eq!(
            diff_years(&s0, &s1).unwrap(),
            vec![LabelChange { key: "b".into(), from: Label::N, to: Label::Y }]
        );
        let s2 = LabeledRegionSet::new(g(), labels(&[("a", Label::N)]), 2010).unwrap();
        assert!(matches!(diff_years(&s0, &s2), Err(MapError::KeyMismatch { .. })));
    }

    fn arb_sets() -> impl Strategy<Value = (Vec<(f64, f64)>, Vec<bool>, Vec<bool>)> {
        (1usize..12).prop_flat_map(|n| {
            (
                prop::collection::vec((-180.0f64..180.0, -90.0f64..90.0), n),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
    }

    fn build(origins: &[(f64, f64)], ys: &[bool], year: i32) -> LabeledRegionSet {
        let geoms = origins
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| square_cw(&format!("k{i:02}"), x, y))
            .collect();
        let labels = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| (format!("k{i:02}"), if y { Label::Y } else { Label::N }))
            .collect();
        LabeledRegionSet::new(geoms, labels, year).unwrap()
    }

    proptest! {
        #[test]
        fn coordinates_round_trip((origins, a, _b) in arb_sets()) {
            let set = build(&origins, &a, 2000);
            let doc = export_geojson(&set).unwrap();
            let text = doc.to_geojson_string();
            let parsed: Value = serde_json::from_str(&text).unwrap();
            for (f, pf) in doc.features.iter().zip(parsed["features"].as_array().unwrap()) {
                let ring = &pf["geometry"]["coordinates"][0];
                for (i, &(x, y)) in f.polygons[0][0].iter().enumerate() {
                    prop_assert_eq!(ring[i][0].as_f64().unwrap().to_bits(), x.to_bits());
                    prop_assert_eq!(ring[i][1].as_f64().unwrap().to_bits(), y.to_bits());
                }
            }
            prop_assert_eq!(doc.features.len(), origins.len());
        }

        #[test]
        fn diff_is_symmetric((origins, a, b) in arb_sets()) {
            let sa = build(&origins, &a, 2000);
            let sb = build(&origins, &b, 2010);
            let ab = diff_years(&sa, &sb).unwrap();
            let ba = diff_years(&sb, &sa).unwrap();
            prop_assert_eq!(ab.len(), ba.len());
            for (x, y) in ab.iter().zip(&ba) {
                prop_assert_eq!(&x.key, &y.key);
                prop_assert_eq!((x.from, x.to), (y.to, y.from));
            }
            prop_assert!(diff_years(&sa, &sa).unwrap().is_empty());
        }
    }
}
