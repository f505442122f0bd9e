//! Minimal PNG encode/decode helpers over the `png` crate.

use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

fn encoder<'a>(out: &'a mut Vec<u8>, w: usize, h: usize, color: png::ColorType, depth: png::BitDepth) -> png::Encoder<'a, &'a mut Vec<u8>> {
    let mut enc = png::Encoder::new(out, w as u32, h as u32);
    enc.set_color(color);
    enc.set_depth(depth);
    enc.set_compression(png::Compression::Balanced);
    enc
}

pub fn encode_indexed(w: usize, h: usize, idx: &[u8], palette: &[[u8; 3]]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = encoder(&mut out, w, h, png::ColorType::Indexed, png::BitDepth::Eight);
        enc.set_palette(palette.iter().flatten().copied().collect::<Vec<u8>>());
        let mut writer = enc.write_header()?;
        writer.write_image_data(idx)?;
    }
    Ok(out)
}

pub fn encode_gray8(w: usize, h: usize, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let enc = encoder(&mut out, w, h, png::ColorType::Grayscale, png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(data)?;
    }
    Ok(out)
}

pub fn encode_gray16(w: usize, h: usize, data: &[u16]) -> Result<Vec<u8>> {
    let bytes: Vec<u8> = data.iter().flat_map(|v| v.to_be_bytes()).collect();
    let mut out = Vec::new();
    {
        let enc = encoder(&mut out, w, h, png::ColorType::Grayscale, png::BitDepth::Sixteen);
        let mut writer = enc.write_header()?;
        writer.write_image_data(&bytes)?;
    }
    Ok(out)
}

pub fn encode_rgb8(w: usize, h: usize, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let enc = encoder(&mut out, w, h, png::ColorType::Rgb, png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(data)?;
    }
    Ok(out)
}

struct Decoded {
    w: usize,
    h: usize,
    color: png::ColorType,
    depth: png::BitDepth,
    data: Vec<u8>,
}

fn decode(bytes: &[u8]) -> Result<Decoded> {
    let mut dec = png::Decoder::new(std::io::Cursor::new(bytes));
    dec.set_transformations(png::Transformations::IDENTITY);
    let mut reader = dec.read_info()?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Png("image too large".into()))?;
    let mut data = vec![0; size];
    let info = reader.next_frame(&mut data)?;
    data.truncate(info.buffer_size());
    Ok(Decoded {
        w: info.width as usize,
        h: info.height as usize,
        color: info.color_type,
        depth: info.bit_depth,
        data,
    })
}

pub fn decode_indexed(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let d = decode(bytes)?;
    if d.depth != png::BitDepth::Eight || !matches!(d.color, png::ColorType::Indexed | png::ColorType::Grayscale) {
        return Err(Error::Png(format!("expected 8-bit indexed PNG, got {:?} {:?}", d.color, d.depth)));
    }
    Ok((d.w, d.h, d.data))
}

pub fn decode_gray8(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let d = decode(bytes)?;
    if d.depth != png::BitDepth::Eight || d.color != png::ColorType::Grayscale {
        return Err(Error::Png(format!("expected 8-bit grayscale PNG, got {:?} {:?}", d.color, d.depth)));
    }
    Ok((d.w, d.h, d.data))
}

pub fn decode_gray16(bytes: &[u8]) -> Result<(usize, usize, Vec<u16>)> {
    let d = decode(bytes)?;
    if d.depth != png::BitDepth::Sixteen || d.color != png::ColorType::Grayscale {
        return Err(Error::Png(format!("expected 16-bit grayscale PNG, got {:?} {:?}", d.color, d.depth)));
    }
    let vals = d.data.chunks_exact(2).map(|b| u16::from_be_bytes([b[0], b[1]])).collect();
    Ok((d.w, d.h, vals))
}

pub fn decode_rgb8(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let d = decode(bytes)?;
    if d.depth != png::BitDepth::Eight || d.color != png::ColorType::Rgb {
        return Err(Error::Png(format!("expected 8-bit RGB PNG, got {:?} {:?}", d.color, d.depth)));
    }
    Ok((d.w, d.h, d.data))
}

/// Writes `bytes` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray16_round_trip() {
        let data: Vec<u16> = (0..12).map(|v| v * 5000).collect();
        let png = encode_gray16(4, 3, &data).unwrap();
        assert_eq!(decode_gray16(&png).unwrap(), (4, 3, data));
    }

    #[test]
    fn indexed_round_trip() {
        let idx = vec![0u8, 1, 2, 8, 3, 3];
        let pal = vec![[1u8, 2, 3]; 9];
        let png = encode_indexed(3, 2, &idx, &pal).unwrap();
        assert_eq!(decode_indexed(&png).unwrap(), (3, 2, idx));
    }
}
