//! Small OSM XML front-end: nodes and ways with their tags.
//!
//! Relations are ignored; closed ways become polygons for area classes.

use std::collections::HashMap;
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::layout::SemanticClass;
use crate::osm::features::{GeoFeature, GeometryKind};
use crate::{Error, Result};

#[derive(Default)]
struct Way {
    refs: Vec<i64>,
    tags: HashMap<String, String>,
}

fn attrs(e: &BytesStart<'_>) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for a in e.attributes() {
        let a = a.map_err(|err| Error::invalid(format!("bad XML attribute: {err}")))?;
        let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
        let value = a
            .unescape_value()
            .map_err(|err| Error::invalid(format!("bad XML attribute value: {err}")))?
            .into_owned();
        out.insert(key, value);
    }
    Ok(out)
}

fn parse_meters(v: &str) -> Option<f64> {
    let v = v.trim().trim_end_matches('m').trim();
    v.parse::<f64>().ok().filter(|x| x.is_finite() && *x >= 0.0)
}

/// Maps a way's tags to a class and geometry kind.
fn classify(tags: &HashMap<String, String>, closed: bool) -> Option<(SemanticClass, GeometryKind)> {
    let tag = |k: &str| tags.get(k).map(String::as_str);
    if let Some(hw) = tag("highway") {
        if matches!(hw, "footway" | "path" | "cycleway" | "steps" | "pedestrian" | "bridleway" | "corridor") {
            return None;
        }
        let class = if hw.starts_with("motorway") || hw.starts_with("trunk") {
            SemanticClass::Highway
        } else {
            SemanticClass::Road
        };
        return Some((class, GeometryKind::Polyline));
    }
    if !closed {
        return None;
    }
    if tag("building").is_some() {
        return Some((SemanticClass::BUILDING, GeometryKind::Polygon));
    }
    if tag("natural") == Some("water") || tag("waterway") == Some("riverbank") || tag("landuse") == Some("reservoir") {
        return Some((SemanticClass::Water, GeometryKind::Polygon));
    }
    let green_leisure = matches!(tag("leisure"), Some("park" | "garden" | "pitch" | "playground"));
    let green_landuse = matches!(tag("landuse"), Some("grass" | "forest" | "meadow" | "recreation_ground" | "village_green"));
    let green_natural = matches!(tag("natural"), Some("wood" | "grassland" | "scrub" | "heath"));
    if green_leisure || green_landuse || green_natural {
        return Some((SemanticClass::Vegetation, GeometryKind::Polygon));
    }
    if matches!(tag("landuse"), Some("construction" | "brownfield")) {
        return Some((SemanticClass::Other, GeometryKind::Polygon));
    }
    None
}

pub fn parse_osm_xml(text: &str, origin: &Path) -> Result<Vec<GeoFeature>> {
    let wrap = |e: Error| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    };
    let mut reader = Reader::from_str(text);
    let mut nodes: HashMap<i64, [f64; 2]> = HashMap::new();
    let mut ways: Vec<Way> = Vec::new();
    let mut current: Option<Way> = None;

    loop {
        let event = reader.read_event().map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: format!("XML error at byte {}: {e}", reader.buffer_position()),
        })?;
        let self_closing = matches!(event, Event::Empty(_));
        match event {
            Event::Start(e) | Event::Empty(e) => {
                let name = e.name();
                match name.as_ref() {
                    b"node" => {
                        let a = attrs(&e).map_err(wrap)?;
                        let get = |k: &str| a.get(k).and_then(|v| v.parse::<f64>().ok());
                        if let (Some(id), Some(lat), Some(lon)) = (a.get("id").and_then(|v| v.parse().ok()), get("lat"), get("lon")) {
                            nodes.insert(id, [lon, lat]);
                        }
                    }
                    b"way" if !self_closing => current = Some(Way::default()),
                    b"nd" => {
                        if let Some(w) = current.as_mut() {
                            let a = attrs(&e).map_err(wrap)?;
                            if let Some(r) = a.get("ref").and_then(|v| v.parse().ok()) {
                                w.refs.push(r);
                            }
                        }
                    }
                    b"tag" => {
                        if let Some(w) = current.as_mut() {
                            let a = attrs(&e).map_err(wrap)?;
                            if let (Some(k), Some(v)) = (a.get("k"), a.get("v")) {
                                w.tags.insert(k.clone(), v.clone());
                            }
                        }
                    }
                    _ => {}
                }
            }
            Event::End(e) if e.name().as_ref() == b"way" => {
                if let Some(w) = current.take() {
                    ways.push(w);
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }

    let mut out = Vec::new();
    for w in ways {
        let closed = w.refs.len() >= 4 && w.refs.first() == w.refs.last();
        let Some((class, geometry)) = classify(&w.tags, closed) else {
            continue;
        };
        let coords: Vec<[f64; 2]> = w.refs.iter().filter_map(|r| nodes.get(r).copied()).collect();
        if coords.len() != w.refs.len() {
            continue;
        }
        let tag = |k: &str| w.tags.get(k).map(String::as_str);
        let height_m = tag("height")
            .and_then(parse_meters)
            .or_else(|| tag("building:levels").and_then(parse_meters).map(|l| l * 3.0));
        let min_height_m = tag("min_height").and_then(parse_meters);
        let width_m = tag("width")
            .and_then(parse_meters)
            .or_else(|| tag("lanes").and_then(parse_meters).map(|l| l * 3.5));
        let feature = GeoFeature {
            geometry,
            class,
            coords,
            height_m,
            min_height_m,
            width_m,
        };
        out.push(feature.normalize().map_err(wrap)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"<?xml version="1.0"?>
<osm version="0.6">
  <node id="1" lat="0.0000" lon="0.0000"/>
  <node id="2" lat="0.0000" lon="0.0010"/>
  <node id="3" lat="0.0010" lon="0.0010"/>
  <node id="4" lat="0.0010" lon="0.0000"/>
  <way id="10">
    <nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="1"/>
    <tag k="building" v="yes"/>
    <tag k="building:levels" v="5"/>
  </way>
  <way id="11">
    <nd ref="1"/><nd ref="3"/>
    <tag k="highway" v="residential"/>
    <tag k="lanes" v="2"/>
  </way>
  <way id="12">
    <nd ref="2"/><nd ref="4"/>
    <tag k="highway" v="footway"/>
  </way>
  <way id="13">
    <nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="1"/>
    <tag k="leisure" v="park"/>
  </way>
</osm>"#;

    #[test]
    fn maps_tags_to_classes() {
        let fs = parse_osm_xml(SAMPLE, Path::new("s.osm")).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(fs[0].class, SemanticClass::BUILDING);
        assert_eq!(fs[0].height_m, Some(15.0));
        assert_eq!(fs[1].class, SemanticClass::Road);
        assert_eq!(fs[1].width_m, Some(7.0));
        assert_eq!(fs[1].geometry, GeometryKind::Polyline);
        assert_eq!(fs[2].class, SemanticClass::Vegetation);
    }
}
