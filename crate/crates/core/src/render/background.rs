use crate::encoders::{hash_feature_into, scene_feature_global, FeatureTable, HashGridConfig, GLOBAL_FEATURE_DIM};
use crate::layout::{LocalWindow, Volume};
use crate::render::buffers::RenderBuffers;
use crate::render::camera::{Camera, V3};
use crate::render::march::{far_plane, march, render_pixels, ShadingConfig};
use crate::{Exec, Result};

/// Hash-grid levels used for surface texture.
const TEXTURE_LEVELS: usize = 6;
/// Peak relative change of the albedo from texture.
const TEXTURE_GAIN: f64 = 0.12;

/// Albedo jitter in [−1, 1]³ at a window point, averaged over the coarse
/// hash-grid levels.
pub(crate) fn texture_jitter(p_unit: V3, f: &[f64], table: &FeatureTable, cfg: &HashGridConfig) -> V3 {
    let mut buf = [0.0; TEXTURE_LEVELS * 3];
    hash_feature_into(p_unit, f, table, cfg, 0..TEXTURE_LEVELS, 3, &mut buf);
    let mut j = [0.0; 3];
    for level in buf.chunks_exact(3) {
        for k in 0..3 {
            j[k] += level[k] / TEXTURE_LEVELS as f64;
        }
    }
    j
}

/// Renders the static scene of a window. Building cells block rays but
/// are left out of the layer's mask and colors; they come from the
/// building layers.
pub fn render_background(window: &LocalWindow, camera: &Camera, shading: &ShadingConfig, exec: Exec) -> Result<RenderBuffers> {
    shading.validate()?;
    let Some(bounds) = window.content_bounds() else {
        return Ok(RenderBuffers::empty(camera.width, camera.height, shading.sky));
    };
    let f = scene_feature_global(window, GLOBAL_FEATURE_DIM, shading.style_seed)?;
    let table = FeatureTable::new(shading.style_seed);
    let cfg = HashGridConfig::default();
    let dims = window.dims().map(|v| v as f64);
    let shift = [window.origin.0 as f64, window.origin.1 as f64, 0.0];
    let o = [camera.position[0] - shift[0], camera.position[1] - shift[1], camera.position[2]];
    let t_max = far_plane(bounds.min, bounds.max, o);
    let lo = [bounds.min[0] as f64 + shift[0], bounds.min[1] as f64 + shift[1], bounds.min[2] as f64];
    let hi = [bounds.max[0] as f64 + shift[0], bounds.max[1] as f64 + shift[1], bounds.max[2] as f64];
    let Some(rect) = camera.screen_rect(lo, hi) else {
        return Ok(RenderBuffers::empty(camera.width, camera.height, shading.sky));
    };
    Ok(render_pixels(camera, Some(rect), shading.sky, exec, |u, v| {
        march(window, o, camera.ray_dir(u, v), t_max, shading.sigma, shading.sky, |seg, class| {
            if class.is_building() {
                return None;
            }
            let p = std::array::from_fn(|a| (seg.cell[a] as f64 + 0.5) / dims[a]);
            let j = texture_jitter(p, &f, &table, &cfg);
            let c = shading.albedo(class);
            Some(std::array::from_fn(|k| c[k] * (1.0 + TEXTURE_GAIN * j[k])))
        })
    }))
}
