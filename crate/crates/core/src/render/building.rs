use crate::encoders::{building_column_encoding, normalized_height, sincos_encode, SINCOS_LEVELS};
use crate::hashing::{hash_words, signed_unit};
use crate::layout::{LocalWindow, Volume};
use crate::render::buffers::RenderBuffers;
use crate::render::camera::{Camera, V3};
use crate::render::march::{far_plane, march, render_pixels, ShadingConfig};
use crate::{Exec, Result};

/// Peak relative change of the albedo driven by the point feature.
const STYLE_GAIN: f64 = 0.3;

/// Seeded linear map from a point feature to three color channels. It
/// stands in for a learned color head; the seed plays the style code.
#[derive(Debug, Clone)]
pub struct ColorDecoder {
    weights: Vec<V3>,
}

impl ColorDecoder {
    pub fn new(seed: u64, inputs: usize) -> Self {
        let scale = 1.0 / (inputs as f64).sqrt();
        let weights = (0..inputs)
            .map(|k| std::array::from_fn(|c| scale * signed_unit(hash_words(seed, &[0x636f6c6f72, k as u64, c as u64]))))
            .collect();
        Self { weights }
    }

    pub fn inputs(&self) -> usize {
        self.weights.len()
    }

    /// Dot product of `x` with the weights starting at input `offset`.
    pub fn partial(&self, x: &[f64], offset: usize) -> V3 {
        let mut acc = [0.0; 3];
        for (v, w) in x.iter().zip(&self.weights[offset..]) {
            for c in 0..3 {
                acc[c] += v * w[c];
            }
        }
        acc
    }

    /// Albedo modulated by the decoded feature.
    pub fn modulate(albedo: V3, logits: V3, gain: f64) -> V3 {
        std::array::from_fn(|c| albedo[c] * (1.0 + gain * logits[c].tanh()))
    }
}

/// Per-column decoder logits over the window's content columns, so each
/// sample only has to encode its height.
struct ColumnCache {
    x0: i64,
    y0: i64,
    w: usize,
    logits: Vec<V3>,
}

impl ColumnCache {
    fn build(window: &LocalWindow, decoder: &ColorDecoder, seed: u64, exec: Exec) -> Option<Self> {
        let b = window.content_bounds()?;
        let (x0, y0) = (b.min[0], b.min[1]);
        let w = (b.max[0] - x0) as usize;
        let h = (b.max[1] - y0) as usize;
        let logits = exec.map_range(w * h, |i| {
            let (x, y) = ((x0 as usize) + i % w, (y0 as usize) + i / w);
            if window.column(x, y).0.is_null() {
                [0.0; 3]
            } else {
                decoder.partial(&building_column_encoding(window, x, y, seed), 0)
            }
        });
        Some(Self { x0, y0, w, logits })
    }

    fn get(&self, x: i64, y: i64) -> V3 {
        self.logits[(y - self.y0) as usize * self.w + (x - self.x0) as usize]
    }
}

/// Color of a building point from the full 1280-value feature; the
/// reference for the cached path used while rendering.
pub fn building_color(window: &LocalWindow, p: V3, shading: &ShadingConfig) -> Result<V3> {
    let feat = crate::encoders::building_point_feature(p, window, shading.style_seed)?;
    let decoder = ColorDecoder::new(shading.style_seed, feat.len());
    let class = window.label(p[0].floor() as i64, p[1].floor() as i64, p[2].floor() as i64);
    Ok(ColorDecoder::modulate(shading.albedo(class), decoder.partial(&feat, 0), STYLE_GAIN))
}

/// A building window with its view-independent shading state, ready to be
/// rendered from any number of cameras.
pub struct PreparedBuilding {
    window: LocalWindow,
    shift: V3,
    decoder: ColorDecoder,
    cache: Option<ColumnCache>,
    shading: ShadingConfig,
}

impl PreparedBuilding {
    /// Rays will be shifted by the building center `(c_x, c_y)` and then by
    /// half the window, so the center lands on the middle column.
    pub fn new(window: LocalWindow, center: (i64, i64), shading: &ShadingConfig, exec: Exec) -> Result<Self> {
        shading.validate()?;
        let shift = [
            center.0 as f64 - (window.size.w / 2) as f64,
            center.1 as f64 - (window.size.h / 2) as f64,
            0.0,
        ];
        let seed = shading.style_seed;
        let decoder = ColorDecoder::new(seed, crate::encoders::BUILDING_FEATURE_CHANNELS * 2 * SINCOS_LEVELS + 2 * SINCOS_LEVELS);
        let cache = ColumnCache::build(&window, &decoder, seed, exec);
        Ok(Self {
            window,
            shift,
            decoder,
            cache,
            shading: shading.clone(),
        })
    }

    pub fn window(&self) -> &LocalWindow {
        &self.window
    }

    /// World-space box around the building's content.
    pub fn world_bounds(&self) -> Option<(V3, V3)> {
        let b = self.window.content_bounds()?;
        Some((
            std::array::from_fn(|a| b.min[a] as f64 + self.shift[a]),
            std::array::from_fn(|a| b.max[a] as f64 + self.shift[a]),
        ))
    }

    pub fn render(&self, camera: &Camera, exec: Exec) -> RenderBuffers {
        let shading = &self.shading;
        let empty = || RenderBuffers::empty(camera.width, camera.height, shading.sky);
        let (Some(bounds), Some(cache), Some((lo, hi))) = (self.window.content_bounds(), &self.cache, self.world_bounds())
        else {
            return empty();
        };
        let Some(rect) = camera.screen_rect(lo, hi) else {
            return empty();
        };
        let height_inputs = 2 * SINCOS_LEVELS;
        let z_offset = self.decoder.inputs() - height_inputs;
        let o: V3 = std::array::from_fn(|a| camera.position[a] - self.shift[a]);
        let t_max = far_plane(bounds.min, bounds.max, o);
        let depth = self.window.size.d;
        let mut out = render_pixels(camera, Some(rect), shading.sky, exec, |u, v| {
            let d = camera.ray_dir(u, v);
            march(&self.window, o, d, t_max, shading.sigma, shading.sky, |seg, class| {
                let tm = 0.5 * (seg.t0 + seg.t1);
                let z = o[2] + tm * d[2];
                let zenc = sincos_encode(&[normalized_height(z, depth)], SINCOS_LEVELS);
                let zl = self.decoder.partial(&zenc, z_offset);
                let xy = cache.get(seg.cell[0], seg.cell[1]);
                let logits = [xy[0] + zl[0], xy[1] + zl[1], xy[2] + zl[2]];
                Some(ColorDecoder::modulate(shading.albedo(class), logits, STYLE_GAIN))
            })
        });
        out.tag_instance(self.window.instance().unwrap_or(0));
        out
    }
}

/// Renders one isolated building window centered on `center`. Masked
/// pixels carry the window's instance id.
pub fn render_building(
    window: &LocalWindow,
    center: (i64, i64),
    camera: &Camera,
    shading: &ShadingConfig,
    exec: Exec,
) -> Result<RenderBuffers> {
    Ok(PreparedBuilding::new(window.clone(), center, shading, exec)?.render(camera, exec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{
        extract_local_window, instantiate_buildings, isolate_instance, relabel_facade_roof, CityLayout, SemanticClass,
        WindowSize,
    };

    fn tower() -> (CityLayout, (i64, i64)) {
        let mut l = CityLayout::empty(64, 64, 1.0);
        for y in 28..36 {
            for x in 26..38 {
                l.set_column(x, y, SemanticClass::BuildingFacade, 0, 19);
            }
        }
        (l, (32, 32))
    }

    fn building_window(l: &CityLayout, center: (i64, i64), size: WindowSize) -> LocalWindow {
        let inst = instantiate_buildings(&l.semantic);
        let w = extract_local_window(l, center, size);
        relabel_facade_roof(&isolate_instance(&w, &inst, 1), 1)
    }

    const SIZE: WindowSize = WindowSize::new(48, 48, 32);

    #[test]
    fn wall_view_is_facade() {
        let (l, c) = tower();
        let w = building_window(&l, c, SIZE);
        let cam = Camera::look_at([32.0, 70.0, 8.0], [32.0, 32.0, 8.0], [0.0, 0.0, 1.0], 30.0, 30.0, 24, 16).unwrap();
        let b = render_building(&w, c, &cam, &ShadingConfig::default(), Exec::Sequential).unwrap();
        let visible: Vec<_> = (0..b.len()).filter(|&i| b.mask(i)).collect();
        assert!(!visible.is_empty());
        assert!(visible.iter().all(|&i| b.semantic[i] == SemanticClass::BuildingFacade));
        assert!(visible.iter().all(|&i| b.instance[i] == 1));
    }

    #[test]
    fn top_view_is_roof() {
        let (l, c) = tower();
        let w = building_window(&l, c, SIZE);
        let cam = Camera::look_at([32.0, 32.0, 80.0], [32.0, 32.0, 0.0], [0.0, -1.0, 0.0], 60.0, 60.0, 24, 16).unwrap();
        let b = render_building(&w, c, &cam, &ShadingConfig::default(), Exec::Sequential).unwrap();
        assert!(b.mask_count() > 0);
        assert!((0..b.len()).filter(|&i| b.mask(i)).all(|i| b.semantic[i] == SemanticClass::BuildingRoof));
    }

    #[test]
    fn style_changes_color_only() {
        let (l, c) = tower();
        let w = building_window(&l, c, SIZE);
        let cam = Camera::look_at([60.0, 70.0, 30.0], [32.0, 32.0, 8.0], [0.0, 0.0, 1.0], 30.0, 30.0, 32, 24).unwrap();
        let s = ShadingConfig::default();
        let a = render_building(&w, c, &cam, &s.with_seed(1), Exec::Parallel).unwrap();
        let b = render_building(&w, c, &cam, &s.with_seed(2), Exec::Parallel).unwrap();
        assert_eq!(a.alpha, b.alpha);
        assert_eq!(a.depth, b.depth);
        assert_eq!(a.semantic, b.semantic);
        assert_eq!(a.instance, b.instance);
        assert_ne!(a.color, b.color);
    }

    #[test]
    fn recentering_matches_untranslated_window() {
        let (l, c) = tower();
        let moved = building_window(&l, c, SIZE);
        let home_center = ((SIZE.w / 2) as i64, (SIZE.h / 2) as i64);
        let home = building_window(&l, home_center, SIZE);
        assert_eq!(home.origin, (0, 0));
        let cam = Camera::look_at([5.0, 60.0, 25.0], [32.0, 32.0, 5.0], [0.0, 0.0, 1.0], 30.0, 30.0, 32, 24).unwrap();
        let s = ShadingConfig::default();
        let a = render_building(&moved, c, &cam, &s, Exec::Sequential).unwrap();
        let b = render_building(&home, home_center, &cam, &s, Exec::Sequential).unwrap();
        assert!(a.mask_count() > 0);
        for i in 0..a.len() {
            assert!((a.alpha[i] - b.alpha[i]).abs() < 1e-9);
            assert!(a.depth[i] == b.depth[i] || (a.depth[i] - b.depth[i]).abs() < 1e-9);
            for k in 0..3 {
                assert!((a.color[i][k] - b.color[i][k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cached_color_matches_full_feature() {
        let (l, c) = tower();
        let w = building_window(&l, c, SIZE);
        let s = ShadingConfig::default().with_seed(77);
        let cam = Camera::look_at([32.0, 32.0, 80.0], [32.0, 32.0, 0.0], [0.0, -1.0, 0.0], 60.0, 60.0, 8, 8).unwrap();
        let b = render_building(&w, c, &cam, &s, Exec::Sequential).unwrap();
        // A straight-down ray spends its weight in the roof cell, entering at
        // the top face; recover the sampled midpoint from the ray geometry.
        let (u, v) = (4, 4);
        let i = v * 8 + u;
        assert!(b.mask(i));
        let d = cam.ray_dir(u, v);
        let shift = [c.0 as f64 - 24.0, c.1 as f64 - 24.0, 0.0];
        let o: V3 = std::array::from_fn(|a| cam.position[a] - shift[a]);
        let segs = crate::render::dda::dda_traverse(&w.content_bounds().unwrap(), o, d, 1e3).unwrap();
        let hit = segs.iter().find(|s| !w.label(s.cell[0], s.cell[1], s.cell[2]).is_null()).unwrap();
        let tm = 0.5 * (hit.t0 + hit.t1);
        let p: V3 = std::array::from_fn(|a| o[a] + tm * d[a]);
        let full = building_color(&w, p, &s).unwrap();
        let sky_part = b.transmittance[i] + b.hidden[i];
        for k in 0..3 {
            let only_hit = (b.color[i][k] - sky_part * s.sky[k]) / b.alpha[i];
            assert!((only_hit - full[k]).abs() < 1e-6, "{only_hit} vs {}", full[k]);
        }
    }
}
