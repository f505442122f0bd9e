//! Seeded procedural city generator used as the shipped tile source.

use crate::hashing::{hash_words, unit_f64};
use crate::layout::extrapolate::{tiled_extrapolate, TileRequest, TileSource};
use crate::layout::{CityLayout, SemanticClass};
use crate::osm::{PerlinField, ZOOM18_METERS_PER_PIXEL};
use crate::Result;

/// Street-grid city parameters. Lengths in pixels unless noted.
#[derive(Debug, Clone, PartialEq)]
pub struct ProceduralCity {
    pub seed: u64,
    /// Street pitch: one road centerline every `block` pixels.
    pub block: usize,
    /// Road band width.
    pub road_width: usize,
    /// Building lots per block edge (each block is split into `lots × lots`).
    pub lots: usize,
    /// Building height range in meters.
    pub building_height_m: (f64, f64),
    pub pixel_scale: f64,
}

impl Default for ProceduralCity {
    fn default() -> Self {
        Self {
            seed: 0,
            block: 64,
            road_width: 12,
            lots: 2,
            building_height_m: (10.0, 36.0),
            pixel_scale: ZOOM18_METERS_PER_PIXEL,
        }
    }
}

impl ProceduralCity {
    fn cells(&self, meters: f64) -> u16 {
        (meters / self.pixel_scale).round().max(0.0) as u16
    }

    /// Column at global pixel `(x, y)`; a pure function of location and seed.
    pub fn column(&self, x: i64, y: i64) -> (SemanticClass, u16, u16) {
        let b = self.block as i64;
        let half_road = (self.road_width / 2) as i64;
        let lx = x.rem_euclid(b);
        let ly = y.rem_euclid(b);
        let on_road = |l: i64| l < half_road || l >= b - (self.road_width as i64 - half_road);
        if on_road(lx) || on_road(ly) {
            return (SemanticClass::Road, 0, self.cells(4.0));
        }
        let bx = x.div_euclid(b);
        let by = y.div_euclid(b);
        let kind = unit_f64(hash_words(self.seed, &[0xB10C, bx as u64, by as u64]));
        let inner0 = half_road;
        let inner = b - self.road_width as i64;
        let (ix, iy) = (lx - inner0, ly - inner0);
        if kind < 0.12 {
            let perlin = PerlinField {
                seed: self.seed,
                cell_size: 64.0,
                out_range: (8.0, 16.0),
            };
            let h = perlin.sample(x as f64, y as f64);
            return (SemanticClass::Vegetation, 0, self.cells(h));
        }
        if kind < 0.17 {
            return (SemanticClass::Water, 0, 0);
        }
        // Lots separated by a 3 px setback of open ground.
        let lots = self.lots.max(1) as i64;
        let lot = inner / lots;
        let (qx, qy) = ((ix / lot).min(lots - 1), (iy / lot).min(lots - 1));
        let (ox, oy) = (ix - qx * lot, iy - qy * lot);
        let setback = 3;
        let lot_w = if qx == lots - 1 { inner - qx * lot } else { lot };
        let lot_h = if qy == lots - 1 { inner - qy * lot } else { lot };
        if ox < setback || oy < setback || ox >= lot_w - setback || oy >= lot_h - setback {
            return (SemanticClass::Other, 0, 0);
        }
        let r = unit_f64(hash_words(
            self.seed,
            &[0x107, bx as u64, by as u64, qx as u64, qy as u64],
        ));
        let (lo, hi) = self.building_height_m;
        (SemanticClass::BUILDING, 0, self.cells(lo + (hi - lo) * r))
    }

    /// Generates a whole layout through the sliding-window tiler.
    pub fn generate(&self, width: usize, height: usize, tile: usize) -> Result<CityLayout> {
        let mut src = self.clone();
        let tile = tile.min(width).min(height);
        tiled_extrapolate(&mut src, tile, (width, height), self.pixel_scale)
    }
}

impl TileSource for ProceduralCity {
    fn generate(&mut self, req: &TileRequest<'_>) -> Result<CityLayout> {
        let mut out = CityLayout::empty(req.size, req.size, self.pixel_scale);
        for y in 0..req.size {
            for x in 0..req.size {
                let (c, bu, td) = self.column((req.origin.0 + x) as i64, (req.origin.1 + y) as i64);
                out.set_column(x, y, c, bu, td);
            }
        }
        Ok(out)
    }
}

/// Compact test city: 256×256 pixels with exactly ten buildings and
/// buildings no taller than 63 cells.
pub fn sample_city(seed: u64) -> CityLayout {
    let city = ProceduralCity {
        seed,
        block: 80,
        road_width: 12,
        lots: 1,
        building_height_m: (8.0, 36.0),
        ..ProceduralCity::default()
    };
    let mut layout = city.generate(256, 256, 128).expect("procedural tiles are infallible");
    // Keep the ten largest buildings, turn the rest into open ground.
    let inst = crate::layout::instantiate_buildings(&layout.semantic);
    let counts = inst.pixel_counts();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(counts[i]), i));
    let keep: std::collections::HashSet<u32> = order.iter().take(10).map(|&i| i as u32 + 1).collect();
    for y in 0..layout.height() {
        for x in 0..layout.width() {
            let id = *inst.labels.get(x, y);
            if id != 0 && !keep.contains(&id) {
                layout.set_column(x, y, SemanticClass::Other, 0, 0);
            }
        }
    }
    layout
}
