//! Line-delimited JSON feature files.
//!
//! One object per line; blank lines and lines starting with `#` are skipped:
//!
//! ```text
//! {"geometry":"polygon","class":"building","coords":[[lon,lat],...],"height_m":24}
//! {"geometry":"polyline","class":"road","coords":[[lon,lat],...],"width_m":7}
//! ```
//!
//! `class` is one of `road`, `highway`, `building`, `vegetation`, `water`,
//! `other`. Optional numeric fields: `height_m` (building or deck top),
//! `min_height_m` (bottom of an elevated structure) and `width_m` (stroke width).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::layout::SemanticClass;
use crate::osm::mercator::check_lon_lat;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Polygon,
    Polyline,
}

/// A tagged polygon or polyline in lon/lat degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoFeature {
    pub geometry: GeometryKind,
    #[serde(with = "class_name")]
    pub class: SemanticClass,
    pub coords: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_height_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width_m: Option<f64>,
}

impl GeoFeature {
    /// Checks coordinate ranges and closes open polygon rings.
    pub fn normalize(mut self) -> Result<Self> {
        if matches!(self.class, SemanticClass::Null | SemanticClass::Vehicle | SemanticClass::BuildingRoof) {
            return Err(Error::invalid(format!("class `{}` cannot be ingested", self.class.name())));
        }
        let min_len = match self.geometry {
            GeometryKind::Polygon => 3,
            GeometryKind::Polyline => 2,
        };
        if self.coords.len() < min_len {
            return Err(Error::invalid(format!(
                "{:?} needs at least {min_len} vertices, got {}",
                self.geometry,
                self.coords.len()
            )));
        }
        for &[lon, lat] in &self.coords {
            check_lon_lat(lon, lat)?;
        }
        for v in [self.height_m, self.min_height_m, self.width_m].into_iter().flatten() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("negative or non-finite attribute {v}")));
            }
        }
        if self.geometry == GeometryKind::Polygon && self.coords.first() != self.coords.last() {
            self.coords.push(self.coords[0]);
        }
        Ok(self)
    }
}

mod class_name {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::layout::SemanticClass;

    pub fn serialize<S: Serializer>(c: &SemanticClass, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(c.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SemanticClass, D::Error> {
        let name = String::deserialize(d)?;
        super::parse_class(&name).ok_or_else(|| serde::de::Error::custom(format!("unknown class `{name}`")))
    }
}

pub fn parse_class(name: &str) -> Option<SemanticClass> {
    Some(match name {
        "road" => SemanticClass::Road,
        "highway" => SemanticClass::Highway,
        "building" => SemanticClass::BUILDING,
        "vegetation" | "greenery" => SemanticClass::Vegetation,
        "water" => SemanticClass::Water,
        "other" | "construction" => SemanticClass::Other,
        _ => return None,
    })
}

/// Parses feature lines; errors carry the 1-based line number.
pub fn parse_features(text: &str, origin: &Path) -> Result<Vec<GeoFeature>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            message: format!("line {}: {message}", lineno + 1),
        };
        let feature: GeoFeature = serde_json::from_str(trimmed).map_err(|e| parse_err(e.to_string()))?;
        out.push(feature.normalize().map_err(|e| parse_err(e.to_string()))?);
    }
    Ok(out)
}

/// Reads a feature file. Files ending in `.osm` or `.xml` go through the
/// OSM XML front-end, everything else is parsed as line-delimited JSON.
pub fn load_features(path: &Path) -> Result<Vec<GeoFeature>> {
    let text = std::fs::read_to_string(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
    if ext.eq_ignore_ascii_case("osm") || ext.eq_ignore_ascii_case("xml") {
        super::osm_xml::parse_osm_xml(&text, path)
    } else {
        parse_features(&text, path)
    }
}

pub fn write_features(features: &[GeoFeature]) -> Result<String> {
    let mut out = String::new();
    for f in features {
        out.push_str(&serde_json::to_string(f)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_closes_rings() {
        let text = r#"
# sample
{"geometry":"polygon","class":"building","coords":[[0,0],[0.001,0],[0.001,0.001]],"height_m":30}
{"geometry":"polyline","class":"road","coords":[[0,0],[0.002,0]],"width_m":7}
"#;
        let fs = parse_features(text, Path::new("x.ndjson")).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].coords.len(), 4);
        assert_eq!(fs[0].coords[0], fs[0].coords[3]);
        assert_eq!(fs[0].class, SemanticClass::BUILDING);
        assert_eq!(fs[1].width_m, Some(7.0));
        let again = parse_features(&write_features(&fs).unwrap(), Path::new("y")).unwrap();
        assert_eq!(again, fs);
    }

    #[test]
    fn errors_name_the_line() {
        let text = "{\"geometry\":\"polyline\",\"class\":\"road\",\"coords\":[[0,0],[1,1]]}\n{\"geometry\":\"polyline\",\"class\":\"road\",\"coords\":[[0,0],[1,89]]}";
        let err = parse_features(text, Path::new("f.ndjson")).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let bad = "{\"geometry\":\"polyline\",\"class\":\"tram\",\"coords\":[[0,0],[1,1]]}";
        assert!(parse_features(bad, Path::new("f")).is_err());
    }
}
