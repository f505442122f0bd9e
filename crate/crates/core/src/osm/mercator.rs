use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Equatorial circumference of the WGS84 ellipsoid, meters.
pub const EARTH_CIRCUMFERENCE_M: f64 = 40_075_016.686;
/// Latitude limit of the square Web Mercator world.
pub const MAX_LATITUDE: f64 = 85.051_129;
/// Equatorial ground resolution at zoom 18 (about 0.5972 m/px).
pub const ZOOM18_METERS_PER_PIXEL: f64 = EARTH_CIRCUMFERENCE_M / (256.0 * (1u64 << 18) as f64);

/// World extent in pixels at `zoom`.
#[inline]
pub fn world_pixels(zoom: u32) -> f64 {
    256.0 * (1u64 << zoom) as f64
}

/// Equatorial meters per pixel at `zoom`.
pub fn ground_resolution(zoom: u32) -> f64 {
    EARTH_CIRCUMFERENCE_M / world_pixels(zoom)
}

pub fn check_lon_lat(lon: f64, lat: f64) -> Result<()> {
    if !(-180.0..=180.0).contains(&lon) || !lon.is_finite() {
        return Err(Error::Range(format!("longitude {lon} outside [-180, 180]")));
    }
    if !(lat > -MAX_LATITUDE && lat < MAX_LATITUDE) {
        return Err(Error::Range(format!(
            "latitude {lat} outside the Web Mercator band (±{MAX_LATITUDE})"
        )));
    }
    Ok(())
}

/// Global Web Mercator pixel coordinates of a lon/lat point.
pub fn project_mercator(lon: f64, lat: f64, zoom: u32) -> Result<(f64, f64)> {
    check_lon_lat(lon, lat)?;
    let size = world_pixels(zoom);
    let phi = lat.to_radians();
    let x = (lon + 180.0) / 360.0 * size;
    let y = (1.0 - (phi.tan() + 1.0 / phi.cos()).ln() / PI) / 2.0 * size;
    Ok((x, y))
}

/// Inverse of [`project_mercator`].
pub fn unproject_mercator(x: f64, y: f64, zoom: u32) -> (f64, f64) {
    let size = world_pixels(zoom);
    let lon = x / size * 360.0 - 180.0;
    let lat = (PI * (1.0 - 2.0 * y / size)).sinh().atan().to_degrees();
    (lon, lat)
}

/// A raster window on the global pixel grid of one zoom level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MercatorGrid {
    pub zoom: u32,
    /// Global pixel coordinates of the raster's top-left corner.
    pub origin_px: (i64, i64),
    /// Raster size in pixels.
    pub size: (usize, usize),
}

impl MercatorGrid {
    pub fn new(zoom: u32, origin_px: (i64, i64), size: (usize, usize)) -> Result<Self> {
        let world = world_pixels(zoom);
        let fits = origin_px.0 >= 0
            && origin_px.1 >= 0
            && (origin_px.0 as f64 + size.0 as f64) <= world
            && (origin_px.1 as f64 + size.1 as f64) <= world;
        if !fits || size.0 == 0 || size.1 == 0 {
            return Err(Error::Range(format!(
                "raster {:?} at {:?} does not fit the zoom-{zoom} world",
                size, origin_px
            )));
        }
        Ok(Self {
            zoom,
            origin_px,
            size,
        })
    }

    /// Smallest pixel-aligned grid covering a lon/lat bounding box.
    pub fn from_bbox(lon0: f64, lat0: f64, lon1: f64, lat1: f64, zoom: u32) -> Result<Self> {
        let (west, east) = (lon0.min(lon1), lon0.max(lon1));
        let (south, north) = (lat0.min(lat1), lat0.max(lat1));
        let (x0, y0) = project_mercator(west, north, zoom)?;
        let (x1, y1) = project_mercator(east, south, zoom)?;
        let origin = (x0.floor() as i64, y0.floor() as i64);
        let size = (
            ((x1.ceil() as i64 - origin.0).max(1)) as usize,
            ((y1.ceil() as i64 - origin.1).max(1)) as usize,
        );
        Self::new(zoom, origin, size)
    }

    /// Nominal meters per pixel (the equatorial ground resolution).
    pub fn pixel_scale(&self) -> f64 {
        ground_resolution(self.zoom)
    }

    /// Raster-local continuous pixel coordinates of a lon/lat point.
    pub fn to_raster(&self, lon: f64, lat: f64) -> Result<(f64, f64)> {
        let (x, y) = project_mercator(lon, lat, self.zoom)?;
        Ok((x - self.origin_px.0 as f64, y - self.origin_px.1 as f64))
    }
}
