//! Geodata ingestion: feature parsing, Web Mercator projection and
//! rasterization into a city layout.

pub mod features;
mod mercator;
pub mod osm_xml;
mod perlin;
pub mod rasterize;

pub use features::{load_features, parse_features, GeoFeature, GeometryKind};
pub use mercator::{
    ground_resolution, project_mercator, unproject_mercator, world_pixels, MercatorGrid, EARTH_CIRCUMFERENCE_M,
    MAX_LATITUDE, ZOOM18_METERS_PER_PIXEL,
};
pub use perlin::{perlin_sample, PerlinField};
pub use rasterize::{meters_to_cells, rasterize};
