use crate::layout::{CityLayout, SemanticClass};
use crate::osm::features::{GeoFeature, GeometryKind};
use crate::osm::{MercatorGrid, PerlinField};
use crate::Result;

/// Road surface height in meters.
pub const ROAD_HEIGHT_M: f64 = 4.0;
/// Building height used when a footprint carries none.
pub const DEFAULT_BUILDING_HEIGHT_M: f64 = 18.0;
pub const DEFAULT_ROAD_WIDTH_M: f64 = 7.0;
pub const DEFAULT_HIGHWAY_WIDTH_M: f64 = 14.0;

/// Painting priority; higher wins where features overlap.
pub fn class_priority(c: SemanticClass) -> u8 {
    match c {
        SemanticClass::Null => 0,
        SemanticClass::Other => 1,
        SemanticClass::Water => 2,
        SemanticClass::Vegetation => 3,
        SemanticClass::Road => 4,
        SemanticClass::Highway => 5,
        SemanticClass::BuildingFacade | SemanticClass::BuildingRoof => 6,
        SemanticClass::Vehicle => 7,
    }
}

/// Meters to vertical cells.
#[inline]
pub fn meters_to_cells(m: f64, pixel_scale: f64) -> u16 {
    (m / pixel_scale).round().clamp(0.0, u16::MAX as f64) as u16
}

#[derive(Clone, Copy, Default)]
struct Paint {
    class: SemanticClass,
    bu: u16,
    td: u16,
}

impl Paint {
    /// Order-independent merge: higher priority wins, equal classes keep
    /// the tallest extent.
    fn merge(&mut self, other: Paint) {
        let (p, q) = (class_priority(self.class), class_priority(other.class));
        if q > p {
            *self = other;
        } else if q == p && !other.class.is_null() {
            self.td = self.td.max(other.td);
            self.bu = self.bu.min(other.bu);
        }
    }
}

/// Rasterizes features into a layout on `grid`.
///
/// Polygons use even-odd filling at pixel centers; polylines are stroked
/// with round caps and joins. Vegetation heights come from `perlin`,
/// evaluated at global pixel coordinates so neighboring rasters agree.
pub fn rasterize(features: &[GeoFeature], grid: &MercatorGrid, perlin: &PerlinField) -> Result<CityLayout> {
    let (w, h) = grid.size;
    let ps = grid.pixel_scale();
    let mut paint = vec![Paint::default(); w * h];

    for f in features {
        let pts = f
            .coords
            .iter()
            .map(|&[lon, lat]| grid.to_raster(lon, lat))
            .collect::<Result<Vec<_>>>()?;
        let (bu, td) = feature_heights(f, ps);
        let mut put = |x: usize, y: usize| {
            let class = f.class;
            let (bu, td) = if class == SemanticClass::Vegetation {
                let gx = (grid.origin_px.0 + x as i64) as f64;
                let gy = (grid.origin_px.1 + y as i64) as f64;
                (0, meters_to_cells(perlin.sample(gx, gy), ps))
            } else {
                (bu, td)
            };
            paint[y * w + x].merge(Paint { class, bu, td });
        };
        match f.geometry {
            GeometryKind::Polygon => fill_polygon(&pts, w, h, &mut put),
            GeometryKind::Polyline => {
                let width_m = f.width_m.unwrap_or(match f.class {
                    SemanticClass::Highway => DEFAULT_HIGHWAY_WIDTH_M,
                    _ => DEFAULT_ROAD_WIDTH_M,
                });
                let width_px = (width_m / ps).max(1.0);
                stroke_polyline(&pts, width_px / 2.0, w, h, &mut put);
            }
        }
    }

    let mut layout = CityLayout::empty(w, h, ps);
    for y in 0..h {
        for x in 0..w {
            let p = paint[y * w + x];
            layout.set_column(x, y, p.class, p.bu, p.td);
        }
    }
    Ok(layout)
}

fn feature_heights(f: &GeoFeature, ps: f64) -> (u16, u16) {
    let bottom = f.min_height_m.map_or(0, |m| meters_to_cells(m, ps));
    let top = match f.class {
        SemanticClass::Road => meters_to_cells(ROAD_HEIGHT_M, ps),
        SemanticClass::Highway => meters_to_cells(f.height_m.unwrap_or(ROAD_HEIGHT_M), ps),
        SemanticClass::BuildingFacade => meters_to_cells(f.height_m.unwrap_or(DEFAULT_BUILDING_HEIGHT_M), ps),
        _ => 0,
    };
    match f.class {
        SemanticClass::Highway | SemanticClass::BuildingFacade => (bottom.min(top), top),
        _ => (0, top),
    }
}

/// Even-odd scanline fill over pixel centers.
pub fn fill_polygon(pts: &[(f64, f64)], w: usize, h: usize, put: &mut impl FnMut(usize, usize)) {
    if pts.len() < 3 {
        return;
    }
    let (ymin, ymax) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    let y0 = (ymin - 0.5).ceil().max(0.0) as i64;
    let y1 = ((ymax - 0.5).floor() as i64).min(h as i64 - 1);
    let mut xs = Vec::new();
    for y in y0..=y1 {
        let cy = y as f64 + 0.5;
        xs.clear();
        for k in 0..pts.len() {
            let a = pts[k];
            let b = pts[(k + 1) % pts.len()];
            // Half-open rule avoids double counting shared vertices.
            if (a.1 <= cy) != (b.1 <= cy) {
                xs.push(a.0 + (cy - a.1) / (b.1 - a.1) * (b.0 - a.0));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            let xa = (pair[0] - 0.5).ceil().max(0.0) as i64;
            let xb = ((pair[1] - 0.5).ceil() as i64).min(w as i64);
            for x in xa..xb {
                put(x as usize, y as usize);
            }
        }
    }
}

/// Marks pixels whose centers lie within `half_width` of the polyline.
pub fn stroke_polyline(pts: &[(f64, f64)], half_width: f64, w: usize, h: usize, put: &mut impl FnMut(usize, usize)) {
    let mut seen = std::collections::HashSet::new();
    let segs: Vec<((f64, f64), (f64, f64))> = if pts.len() == 1 {
        vec![(pts[0], pts[0])]
    } else {
        pts.windows(2).map(|s| (s[0], s[1])).collect()
    };
    for (a, b) in segs {
        let x0 = ((a.0.min(b.0) - half_width - 0.5).floor() as i64).max(0);
        let x1 = ((a.0.max(b.0) + half_width).ceil() as i64).min(w as i64 - 1);
        let y0 = ((a.1.min(b.1) - half_width - 0.5).floor() as i64).max(0);
        let y1 = ((a.1.max(b.1) + half_width).ceil() as i64).min(h as i64 - 1);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let c = (x as f64 + 0.5, y as f64 + 0.5);
                if point_segment_distance(c, a, b) <= half_width && seen.insert((x, y)) {
                    put(x as usize, y as usize);
                }
            }
        }
    }
}

pub fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::osm::mercator::unproject_mercator;

    fn grid() -> MercatorGrid {
        MercatorGrid::new(18, (33_554_432, 33_554_432), (64, 64)).unwrap()
    }

    fn lonlat(g: &MercatorGrid, x: f64, y: f64) -> [f64; 2] {
        let (lon, lat) = unproject_mercator(x + g.origin_px.0 as f64, y + g.origin_px.1 as f64, g.zoom);
        [lon, lat]
    }

    fn feature(class: SemanticClass, geometry: GeometryKind, g: &MercatorGrid, pts: &[(f64, f64)]) -> GeoFeature {
        GeoFeature {
            geometry,
            class,
            coords: pts.iter().map(|&(x, y)| lonlat(g, x, y)).collect(),
            height_m: None,
            min_height_m: None,
            width_m: None,
        }
        .normalize()
        .unwrap()
    }

    #[test]
    fn empty_features_give_null_layout() {
        let l = rasterize(&[], &grid(), &PerlinField::greenery(0)).unwrap();
        assert!(l.semantic.cells.as_slice().iter().all(|c| c.is_null()));
    }

    #[test]
    fn road_band_height() {
        let g = grid();
        let mut f = feature(SemanticClass::Road, GeometryKind::Polyline, &g, &[(4.0, 32.0), (60.0, 32.0)]);
        f.width_m = Some(7.0);
        let l = rasterize(&[f], &g, &PerlinField::greenery(0)).unwrap();
        let expected = (4.0 / g.pixel_scale()).round() as u16;
        assert_eq!(expected, 7);
        let mut n = 0;
        for y in 0..64 {
            for x in 0..64 {
                let (c, bu, td) = l.column(x, y);
                if c == SemanticClass::Road {
                    n += 1;
                    assert_eq!((bu, td), (0, expected));
                    assert!((y as f64 + 0.5 - 32.0).abs() <= 3.5 / g.pixel_scale() + 1e-9);
                }
            }
        }
        assert!(n > 0);
        assert_eq!(l.column(32, 32).0, SemanticClass::Road);
    }

    #[test]
    fn building_beats_water_and_default_height() {
        let g = grid();
        let water = feature(SemanticClass::Water, GeometryKind::Polygon, &g, &[(0.0, 0.0), (40.0, 0.0), (40.0, 40.0), (0.0, 40.0)]);
        let bldg = feature(SemanticClass::BUILDING, GeometryKind::Polygon, &g, &[(10.0, 10.0), (20.0, 10.0), (20.0, 20.0), (10.0, 20.0)]);
        for order in [vec![water.clone(), bldg.clone()], vec![bldg, water]] {
            let l = rasterize(&order, &g, &PerlinField::greenery(0)).unwrap();
            assert_eq!(l.column(15, 15), (SemanticClass::BUILDING, 0, meters_to_cells(18.0, g.pixel_scale())));
            assert_eq!(l.column(30, 30), (SemanticClass::Water, 0, 0));
        }
    }

    #[test]
    fn vegetation_heights_in_range() {
        let g = grid();
        let veg = feature(SemanticClass::Vegetation, GeometryKind::Polygon, &g, &[(0.0, 0.0), (64.0, 0.0), (64.0, 64.0), (0.0, 64.0)]);
        let l = rasterize(&[veg], &g, &PerlinField::greenery(5)).unwrap();
        let ps = g.pixel_scale();
        let (lo, hi) = (meters_to_cells(8.0, ps), meters_to_cells(16.0, ps));
        for y in 0..64 {
            for x in 0..64 {
                let (c, _, td) = l.column(x, y);
                assert_eq!(c, SemanticClass::Vegetation);
                assert!((lo..=hi).contains(&td));
            }
        }
    }

    #[test]
    fn even_odd_hole() {
        // A ring drawn as one self-overlapping outline leaves the inner square empty.
        let pts = [
            (0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0), (0.0, 0.0),
            (3.0, 3.0), (3.0, 7.0), (7.0, 7.0), (7.0, 3.0), (3.0, 3.0), (0.0, 0.0),
        ];
        let mut hits = std::collections::HashSet::new();
        fill_polygon(&pts, 12, 12, &mut |x, y| {
            hits.insert((x, y));
        });
        assert!(hits.contains(&(1, 1)));
        assert!(!hits.contains(&(5, 5)));
    }

    #[test]
    fn elevated_highway() {
        let g = grid();
        let mut f = feature(SemanticClass::Highway, GeometryKind::Polyline, &g, &[(0.0, 10.0), (63.0, 10.0)]);
        f.min_height_m = Some(6.0);
        f.height_m = Some(8.0);
        let l = rasterize(&[f], &g, &PerlinField::greenery(0)).unwrap();
        let ps = g.pixel_scale();
        assert_eq!(l.column(30, 10), (SemanticClass::Highway, meters_to_cells(6.0, ps), meters_to_cells(8.0, ps)));
    }
}
