//! PNG triplet storage: `<base>.sem.png`, `<base>.hbu.png`, `<base>.htd.png`.

use std::path::{Path, PathBuf};

use crate::layout::{CityLayout, Grid, HeightFieldPair, InstanceMap, SemanticClass, SemanticMap};
use crate::png_io;
use crate::{Error, Result};

pub fn triplet_paths(base: &Path) -> [PathBuf; 3] {
    let s = base.as_os_str().to_string_lossy();
    [
        PathBuf::from(format!("{s}.sem.png")),
        PathBuf::from(format!("{s}.hbu.png")),
        PathBuf::from(format!("{s}.htd.png")),
    ]
}

pub fn class_palette() -> Vec<[u8; 3]> {
    SemanticClass::ALL.iter().map(|c| c.palette_rgb()).collect()
}

pub fn encode_semantic(map: &SemanticMap) -> Result<Vec<u8>> {
    let idx: Vec<u8> = map.cells.as_slice().iter().map(|c| c.id()).collect();
    png_io::encode_indexed(map.width(), map.height(), &idx, &class_palette())
}

pub fn decode_semantic(bytes: &[u8], pixel_scale: f64) -> Result<SemanticMap> {
    let (w, h, idx) = png_io::decode_indexed(bytes)?;
    let cells = idx
        .into_iter()
        .map(SemanticClass::try_from)
        .collect::<Result<Vec<_>>>()?;
    Ok(SemanticMap {
        cells: Grid::from_vec(w, h, cells)?,
        pixel_scale,
    })
}

/// Writes the three PNGs. Each file is written to a temporary sibling and
/// renamed into place.
pub fn save_layout(layout: &CityLayout, base: &Path) -> Result<[PathBuf; 3]> {
    let paths = triplet_paths(base);
    let (w, h) = layout.semantic.cells.dims();
    png_io::write_atomic(&paths[0], &encode_semantic(&layout.semantic)?)?;
    png_io::write_atomic(
        &paths[1],
        &png_io::encode_gray16(w, h, layout.heights.bottom_up.as_slice())?,
    )?;
    png_io::write_atomic(
        &paths[2],
        &png_io::encode_gray16(w, h, layout.heights.top_down.as_slice())?,
    )?;
    Ok(paths)
}

pub fn load_layout(base: &Path, pixel_scale: f64) -> Result<CityLayout> {
    let paths = triplet_paths(base);
    for p in &paths {
        if !p.exists() {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("missing layout file {}", p.display()),
            )));
        }
    }
    let semantic = decode_semantic(&std::fs::read(&paths[0])?, pixel_scale)?;
    let (w, h) = semantic.cells.dims();
    let load16 = |p: &Path| -> Result<Grid<u16>> {
        let (gw, gh, data) = png_io::decode_gray16(&std::fs::read(p)?)?;
        if (gw, gh) != (w, h) {
            return Err(Error::DimensionMismatch {
                expected: (w, h),
                found: (gw, gh),
            });
        }
        Grid::from_vec(gw, gh, data)
    };
    let heights = HeightFieldPair {
        bottom_up: load16(&paths[1])?,
        top_down: load16(&paths[2])?,
    };
    CityLayout::new(semantic, heights)
}

pub fn save_instances(map: &InstanceMap, path: &Path) -> Result<()> {
    let data: Vec<u16> = map
        .labels
        .as_slice()
        .iter()
        .map(|&v| v.min(u16::MAX as u32) as u16)
        .collect();
    png_io::write_atomic(path, &png_io::encode_gray16(map.labels.width(), map.labels.height(), &data)?)
}

pub fn load_instances(path: &Path) -> Result<InstanceMap> {
    let (w, h, data) = png_io::decode_gray16(&std::fs::read(path)?)?;
    let labels = Grid::from_vec(w, h, data.into_iter().map(u32::from).collect())?;
    Ok(InstanceMap::from_labels(labels))
}
