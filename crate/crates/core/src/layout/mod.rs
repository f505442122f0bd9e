//! Bird's-eye-view city layouts and the label volumes they imply.

mod class;
pub mod extrapolate;
mod instances;
pub mod io;
pub mod procedural;
mod raster;
mod volume;
mod window;

pub use class::SemanticClass;
pub use extrapolate::{tiled_extrapolate, ReplayTileSource, TileRequest, TileSource, TilingPlan};
pub use instances::{instantiate_buildings, InstanceMap};
pub use raster::{CityLayout, Grid, HeightFieldPair, SemanticMap};
pub use volume::{volume_lookup, CellBounds, DenseVolume, Volume};
pub use window::{extract_local_window, isolate_instance, relabel_facade_roof, LocalWindow, WindowSize};
