use std::path::{Path, PathBuf};

use crate::layout::io::class_palette;
use crate::layout::SemanticClass;
use crate::render::buffers::RenderBuffers;
use crate::render::camera::V3;
use crate::{png_io, Error, Result};

pub const LAYER_FILES: [&str; 5] = ["color.png", "semantic.png", "instance.png", "depth.png", "alpha.png"];

pub fn to_rgb8(colors: &[V3]) -> Vec<u8> {
    colors
        .iter()
        .flat_map(|c| c.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8))
        .collect()
}

/// Depth in cells as 16-bit: rounded and kept in 1..=65535, with 0 for a miss.
pub fn encode_depth(d: f64) -> u16 {
    if d.is_finite() {
        d.round().clamp(1.0, u16::MAX as f64) as u16
    } else {
        0
    }
}

pub fn write_rgb(path: &Path, w: usize, h: usize, colors: &[V3]) -> Result<()> {
    png_io::write_atomic(path, &png_io::encode_rgb8(w, h, &to_rgb8(colors))?)
}

/// Writes the five layer images into `dir` and returns their paths.
pub fn write_layers(b: &RenderBuffers, dir: &Path) -> Result<Vec<PathBuf>> {
    let (w, h) = b.dims();
    let semantic: Vec<u8> = b.semantic.iter().map(|c| c.id()).collect();
    let instance: Vec<u16> = b.instance.iter().map(|&i| i.min(u16::MAX as u32) as u16).collect();
    let depth: Vec<u16> = b.depth.iter().map(|&d| encode_depth(d)).collect();
    let alpha: Vec<u8> = b.alpha.iter().map(|a| (a.clamp(0.0, 1.0) * 255.0).round() as u8).collect();
    let images = [
        png_io::encode_rgb8(w, h, &to_rgb8(&b.color))?,
        png_io::encode_indexed(w, h, &semantic, &class_palette())?,
        png_io::encode_gray16(w, h, &instance)?,
        png_io::encode_gray16(w, h, &depth)?,
        png_io::encode_gray8(w, h, &alpha)?,
    ];
    let mut paths = Vec::new();
    for (name, bytes) in LAYER_FILES.iter().zip(images) {
        let p = dir.join(name);
        png_io::write_atomic(&p, &bytes)?;
        paths.push(p);
    }
    Ok(paths)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads layer images written by [`write_layers`]. Values come back at the
/// stored precision; normals are not stored and read as zero.
pub fn read_layers(dir: &Path) -> Result<RenderBuffers> {
    let with_path = |name: &str, e: Error| Error::Parse {
        path: dir.join(name),
        message: e.to_string(),
    };
    let (w, h, rgb) = png_io::decode_rgb8(&read(&dir.join("color.png"))?).map_err(|e| with_path("color.png", e))?;
    let (sw, sh, sem) = png_io::decode_indexed(&read(&dir.join("semantic.png"))?).map_err(|e| with_path("semantic.png", e))?;
    let (iw, ih, inst) = png_io::decode_gray16(&read(&dir.join("instance.png"))?).map_err(|e| with_path("instance.png", e))?;
    let (dw, dh, depth) = png_io::decode_gray16(&read(&dir.join("depth.png"))?).map_err(|e| with_path("depth.png", e))?;
    let (aw, ah, alpha) = png_io::decode_gray8(&read(&dir.join("alpha.png"))?).map_err(|e| with_path("alpha.png", e))?;
    for found in [(sw, sh), (iw, ih), (dw, dh), (aw, ah)] {
        if found != (w, h) {
            return Err(Error::DimensionMismatch { expected: (w, h), found });
        }
    }
    let mut b = RenderBuffers::empty(w, h, [0.0; 3]);
    for i in 0..w * h {
        b.color[i] = std::array::from_fn(|k| rgb[3 * i + k] as f64 / 255.0);
        b.semantic[i] = SemanticClass::try_from(sem[i]).map_err(|e| with_path("semantic.png", e))?;
        b.instance[i] = inst[i] as u32;
        b.depth[i] = if depth[i] == 0 { f64::INFINITY } else { depth[i] as f64 };
        b.alpha[i] = alpha[i] as f64 / 255.0;
        b.transmittance[i] = 1.0 - b.alpha[i];
    }
    Ok(b)
}
