//! Merging background, building and vehicle layers into one frame.
//!
//! Each layer contributes only where its mask is set. Where several masks
//! overlap the nearest surface wins; exact depth ties go to vehicles, then
//! buildings, then the background, then the lower instance id.

use crate::render::buffers::{PixelSample, RenderBuffers};
use crate::render::camera::V3;
use crate::{Error, Exec, Result};

/// Depths closer than this count as equal.
pub const DEPTH_TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LayerKind {
    Background = 0,
    Building = 1,
    Vehicle = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    pub background: RenderBuffers,
    pub buildings: Vec<RenderBuffers>,
    pub vehicles: Vec<RenderBuffers>,
}

impl LayerStack {
    pub fn new(background: RenderBuffers) -> Self {
        Self {
            background,
            buildings: Vec::new(),
            vehicles: Vec::new(),
        }
    }

    pub fn layers(&self) -> impl Iterator<Item = (LayerKind, &RenderBuffers)> {
        std::iter::once((LayerKind::Background, &self.background))
            .chain(self.buildings.iter().map(|b| (LayerKind::Building, b)))
            .chain(self.vehicles.iter().map(|b| (LayerKind::Vehicle, b)))
    }

    pub fn dims(&self) -> (usize, usize) {
        self.background.dims()
    }

    fn check_dims(&self) -> Result<()> {
        let expected = self.dims();
        for (_, l) in self.layers() {
            if l.dims() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    found: l.dims(),
                });
            }
        }
        Ok(())
    }
}

/// Whether candidate `(depth, kind, instance)` beats the current winner.
fn wins(a: (f64, LayerKind, u32), b: (f64, LayerKind, u32)) -> bool {
    if (a.0 - b.0).abs() > DEPTH_TIE {
        return a.0 < b.0;
    }
    (std::cmp::Reverse(a.1), a.2) < (std::cmp::Reverse(b.1), b.2)
}

/// Per-pixel depth-ordered merge. Pixels no mask covers get `sky`.
pub fn compose(stack: &LayerStack, sky: V3, exec: Exec) -> Result<RenderBuffers> {
    stack.check_dims()?;
    let (w, h) = stack.dims();
    let layers: Vec<(LayerKind, &RenderBuffers)> = stack.layers().collect();
    let picks = exec.map_range(w * h, |i| {
        let mut best: Option<(usize, (f64, LayerKind, u32))> = None;
        for (k, (kind, l)) in layers.iter().enumerate() {
            if !l.mask(i) {
                continue;
            }
            let key = (l.depth[i], *kind, l.instance[i]);
            if best.is_none_or(|(_, b)| wins(key, b)) {
                best = Some((k, key));
            }
        }
        best.map(|(k, _)| k)
    });
    let mut out = RenderBuffers::empty(w, h, sky);
    for (i, pick) in picks.into_iter().enumerate() {
        if let Some(k) = pick {
            let l = layers[k].1;
            out.put(i, &l.sample(i));
            out.instance[i] = l.instance[i];
        } else {
            out.put(i, &PixelSample::miss(sky));
        }
    }
    Ok(out)
}
