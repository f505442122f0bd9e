use crate::layout::{CityLayout, Grid};
use crate::{Error, Result};

/// What a tile source sees when asked for a tile.
pub struct TileRequest<'a> {
    /// Top-left pixel of the tile in the target layout.
    pub origin: (usize, usize),
    /// Tile side in pixels.
    pub size: usize,
    /// Tile-sized crop of the layout assembled so far.
    pub conditioning: &'a CityLayout,
    /// `true` where `conditioning` holds committed pixels that will be kept.
    pub committed: &'a Grid<bool>,
}

/// Produces fixed-size layout tiles, optionally conditioned on neighbors.
pub trait TileSource {
    fn generate(&mut self, request: &TileRequest<'_>) -> Result<CityLayout>;
}

impl<F> TileSource for F
where
    F: FnMut(&TileRequest<'_>) -> Result<CityLayout>,
{
    fn generate(&mut self, request: &TileRequest<'_>) -> Result<CityLayout> {
        self(request)
    }
}

/// Tile origins along both axes for a sliding window with 25% overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingPlan {
    pub tile: usize,
    pub stride: usize,
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
}

impl TilingPlan {
    pub fn new(tile: usize, target: (usize, usize)) -> Result<Self> {
        if tile == 0 {
            return Err(Error::invalid("tile size must be positive"));
        }
        if target.0 < tile || target.1 < tile {
            return Err(Error::invalid(format!(
                "target {}x{} is smaller than the {tile}px tile",
                target.0, target.1
            )));
        }
        let stride = (tile - tile / 4).max(1);
        Ok(Self {
            tile,
            stride,
            xs: axis_origins(tile, stride, target.0),
            ys: axis_origins(tile, stride, target.1),
        })
    }

    pub fn steps(&self) -> usize {
        self.xs.len() * self.ys.len()
    }
}

fn axis_origins(tile: usize, stride: usize, extent: usize) -> Vec<usize> {
    let n = (extent - tile).div_ceil(stride) + 1;
    (0..n).map(|k| (k * stride).min(extent - tile)).collect()
}

/// Assembles a layout of `target = (width, height)` pixels by sliding a
/// `tile`-sized window in raster order. Pixels already written are passed
/// back as conditioning and never overwritten.
pub fn tiled_extrapolate(
    source: &mut dyn TileSource,
    tile: usize,
    target: (usize, usize),
    pixel_scale: f64,
) -> Result<CityLayout> {
    let plan = TilingPlan::new(tile, target)?;
    let mut layout = CityLayout::empty(target.0, target.1, pixel_scale);
    let mut committed = Grid::filled(target.0, target.1, false);

    for &oy in &plan.ys {
        for &ox in &plan.xs {
            let mut cond = CityLayout::empty(tile, tile, pixel_scale);
            let mut cond_mask = Grid::filled(tile, tile, false);
            for y in 0..tile {
                for x in 0..tile {
                    if *committed.get(ox + x, oy + y) {
                        let (c, bu, td) = layout.column(ox + x, oy + y);
                        cond.set_column(x, y, c, bu, td);
                        cond_mask.set(x, y, true);
                    }
                }
            }
            let request = TileRequest {
                origin: (ox, oy),
                size: tile,
                conditioning: &cond,
                committed: &cond_mask,
            };
            let produced = source
                .generate(&request)
                .map_err(|e| Error::TileSource(format!("tile at ({ox}, {oy}): {e}")))?;
            if produced.semantic.cells.dims() != (tile, tile) || produced.heights.dims() != (tile, tile) {
                return Err(Error::TileSource(format!(
                    "tile at ({ox}, {oy}) has size {:?}, expected {tile}x{tile}",
                    produced.semantic.cells.dims()
                )));
            }
            for y in 0..tile {
                for x in 0..tile {
                    if *cond_mask.get(x, y) {
                        continue;
                    }
                    let (c, bu, td) = produced.column(x, y);
                    layout.set_column(ox + x, oy + y, c, bu, td);
                    committed.set(ox + x, oy + y, true);
                }
            }
        }
    }
    Ok(layout)
}

/// Replays tiles cut from an existing layout.
pub struct ReplayTileSource<'a> {
    pub layout: &'a CityLayout,
}

impl TileSource for ReplayTileSource<'_> {
    fn generate(&mut self, req: &TileRequest<'_>) -> Result<CityLayout> {
        let mut out = CityLayout::empty(req.size, req.size, self.layout.pixel_scale());
        for y in 0..req.size {
            for x in 0..req.size {
                let (px, py) = (req.origin.0 + x, req.origin.1 + y);
                if px < self.layout.width() && py < self.layout.height() {
                    let (c, bu, td) = self.layout.column(px, py);
                    out.set_column(x, y, c, bu, td);
                }
            }
        }
        Ok(out)
    }
}
