use std::ops::ControlFlow;

use crate::layout::{SemanticClass, Volume};
use crate::render::buffers::{PixelSample, RenderBuffers};
use crate::render::camera::{norm3, sub3, Camera, V3};
use crate::render::dda::{dda_visit, Segment};
use crate::{Error, Exec, Result};

/// Rays stop once the remaining transmittance drops below this.
const MIN_TRANSMITTANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ShadingConfig {
    /// Unit vector pointing toward the light.
    pub light_dir: V3,
    pub ambient: f64,
    /// Density of occupied voxels, per cell.
    pub sigma: f64,
    /// Albedo per semantic class, linear RGB.
    pub palette: [V3; SemanticClass::COUNT],
    pub sky: V3,
    pub style_seed: u64,
}

impl Default for ShadingConfig {
    fn default() -> Self {
        let l = [-0.35, 0.45, 0.82];
        let n = norm3(l);
        Self {
            light_dir: [l[0] / n, l[1] / n, l[2] / n],
            ambient: 0.2,
            sigma: 20.0,
            palette: SemanticClass::ALL.map(|c| c.palette_rgb().map(|v| v as f64 / 255.0)),
            sky: [0.62, 0.75, 0.9],
            style_seed: 0,
        }
    }
}

impl ShadingConfig {
    pub fn validate(&self) -> Result<()> {
        if (norm3(self.light_dir) - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("light direction must be a unit vector"));
        }
        if !(0.0..=1.0).contains(&self.ambient) {
            return Err(Error::invalid("ambient must lie in [0, 1]"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("density must be positive"));
        }
        Ok(())
    }

    pub fn albedo(&self, class: SemanticClass) -> V3 {
        self.palette[class.id() as usize]
    }

    pub fn with_seed(&self, style_seed: u64) -> Self {
        Self {
            style_seed,
            ..self.clone()
        }
    }
}

/// Opacity `1 − e^{−σℓ}` of a constant-density segment.
#[inline]
pub fn segment_alpha(sigma: f64, len: f64) -> f64 {
    -(-sigma * len).exp_m1()
}

/// Mean distance at which a ray entering a segment at `t0` is absorbed,
/// given that it is absorbed within the segment.
pub fn expected_hit(t0: f64, len: f64, sigma: f64) -> f64 {
    let x = sigma * len;
    if x < 1e-4 {
        return t0 + len * (0.5 - x / 12.0);
    }
    t0 + 1.0 / sigma - len * (-x).exp() / -(-x).exp_m1()
}

/// Far distance that reaches every cell of `bounds` from `o`.
pub fn far_plane(bounds_min: [i64; 3], bounds_max: [i64; 3], o: V3) -> f64 {
    let lo = bounds_min.map(|v| v as f64);
    let hi = bounds_max.map(|v| v as f64);
    let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, (lo[2] + hi[2]) / 2.0];
    norm3(sub3(o, center)) + norm3(sub3(hi, lo)) / 2.0 + 1.0
}

/// Integrates one ray front to back through `volume`.
///
/// `shade` returns the color of a segment in an occupied cell, or `None`
/// for cells that block light without belonging to the layer. Their
/// weight lands in `hidden` and is painted with the sky color.
pub fn march<V: Volume + ?Sized>(
    volume: &V,
    o: V3,
    d: V3,
    t_max: f64,
    sigma: f64,
    sky: V3,
    mut shade: impl FnMut(&Segment, SemanticClass) -> Option<V3>,
) -> PixelSample {
    let Some(bounds) = volume.content_bounds() else {
        return PixelSample::miss(sky);
    };
    let mut t_rem = 1.0;
    let mut alpha = 0.0;
    let mut hidden = 0.0;
    let mut color = [0.0; 3];
    let mut class_w = [0.0; SemanticClass::COUNT];
    let mut depth_num = 0.0;
    let mut best = (0.0, [0.0; 3]);
    let walked = dda_visit(&bounds, o, d, t_max, |seg| {
        let class = volume.label(seg.cell[0], seg.cell[1], seg.cell[2]);
        if class.is_null() {
            return ControlFlow::Continue(());
        }
        let len = seg.t1 - seg.t0;
        let w = t_rem * segment_alpha(sigma, len);
        t_rem -= w;
        match shade(&seg, class) {
            Some(c) => {
                alpha += w;
                for k in 0..3 {
                    color[k] += w * c[k];
                }
                class_w[class.id() as usize] += w;
                depth_num += w * expected_hit(seg.t0, len, sigma);
                if w > best.0 {
                    best = (w, seg.normal().unwrap_or([-d[0], -d[1], -d[2]]));
                }
            }
            None => hidden += w,
        }
        if t_rem < MIN_TRANSMITTANCE {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if walked.is_err() {
        return PixelSample::miss(sky);
    }
    let rest = t_rem + hidden;
    let color = [color[0] + rest * sky[0], color[1] + rest * sky[1], color[2] + rest * sky[2]];
    if alpha <= 0.0 {
        return PixelSample {
            color,
            transmittance: t_rem,
            hidden,
            ..PixelSample::miss(sky)
        };
    }
    let mut semantic = SemanticClass::Null;
    let mut top = 0.0;
    for (id, &w) in class_w.iter().enumerate() {
        if w > top {
            top = w;
            semantic = SemanticClass::ALL[id];
        }
    }
    PixelSample {
        color,
        semantic,
        depth: depth_num / alpha,
        alpha,
        normal: best.1,
        transmittance: t_rem,
        hidden,
    }
}

/// Evaluates `pixel(u, v)` over `rect = [u0, u1, v0, v1]` (the whole image
/// when `None`); pixels outside the rectangle are misses.
pub fn render_pixels(
    camera: &Camera,
    rect: Option<[usize; 4]>,
    sky: V3,
    exec: Exec,
    pixel: impl Fn(usize, usize) -> PixelSample + Sync + Send,
) -> RenderBuffers {
    let (w, h) = (camera.width, camera.height);
    let mut out = RenderBuffers::empty(w, h, sky);
    let [u0, u1, v0, v1] = rect.unwrap_or([0, w, 0, h]);
    let (u1, v1) = (u1.min(w), v1.min(h));
    if u0 >= u1 || v0 >= v1 {
        return out;
    }
    let rows = exec.map_range(v1 - v0, |r| (u0..u1).map(|u| pixel(u, v0 + r)).collect::<Vec<_>>());
    for (r, row) in rows.into_iter().enumerate() {
        for (k, s) in row.iter().enumerate() {
            out.put((v0 + r) * w + u0 + k, s);
        }
    }
    out
}
