use std::ops::ControlFlow;

use crate::layout::{CellBounds, CityLayout, SemanticClass, Volume};
use crate::render::buffers::RenderBuffers;
use crate::render::camera::{dot, Camera, V3};
use crate::render::dda::dda_visit;
use crate::render::march::ShadingConfig;
use crate::{Error, Exec, Result};

/// A layout with a second layout drawn over it, e.g. static city plus one
/// frame of traffic rasters. Non-NULL overlay cells win.
pub struct OverlayVolume<'a> {
    pub base: &'a CityLayout,
    pub overlay: &'a CityLayout,
}

impl Volume for OverlayVolume<'_> {
    fn dims(&self) -> [usize; 3] {
        let (a, b) = (self.base.dims(), self.overlay.dims());
        std::array::from_fn(|k| a[k].max(b[k]))
    }

    fn label(&self, x: i64, y: i64, z: i64) -> SemanticClass {
        let top = self.overlay.label(x, y, z);
        if top.is_null() {
            self.base.label(x, y, z)
        } else {
            top
        }
    }
}

/// Hard-shadow query: a point is lit when the ray toward the light leaves
/// the volume without touching an occupied cell.
pub struct ShadowMap<'a> {
    volume: &'a dyn Volume,
    bounds: Option<CellBounds>,
    light_dir: V3,
    extent: f64,
}

impl<'a> ShadowMap<'a> {
    pub fn new(volume: &'a dyn Volume, light_dir: V3, extent: f64) -> Result<Self> {
        if (dot(light_dir, light_dir).sqrt() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("light direction must be a unit vector"));
        }
        Ok(Self {
            bounds: volume.content_bounds(),
            volume,
            light_dir,
            extent,
        })
    }

    /// Shadow map whose rays may cross the whole volume.
    pub fn covering(volume: &'a dyn Volume, light_dir: V3) -> Result<Self> {
        let d = volume.dims();
        let extent = ((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) as f64).sqrt() * 2.0 + 2.0;
        Self::new(volume, light_dir, extent)
    }

    pub fn visible(&self, p: V3) -> bool {
        let Some(bounds) = self.bounds else {
            return true;
        };
        let mut lit = true;
        // The light direction was validated as unit, so the walk cannot fail.
        let _ = dda_visit(&bounds, p, self.light_dir, self.extent, |seg| {
            if self.volume.label(seg.cell[0], seg.cell[1], seg.cell[2]).is_null() {
                ControlFlow::Continue(())
            } else {
                lit = false;
                ControlFlow::Break(())
            }
        });
        lit
    }
}

/// Lambertian factor `ambient + (1 − ambient)·max(0, n·l)·visibility`.
#[inline]
pub fn lambert(normal: V3, light_dir: V3, ambient: f64, visible: bool) -> f64 {
    let ndl = dot(normal, light_dir).max(0.0);
    ambient + (1.0 - ambient) * ndl * if visible { 1.0 } else { 0.0 }
}

/// Relit color of every pixel. Masked pixels are shaded with their normal
/// and, when a shadow map is given, tested for visibility from a point just
/// off the surface; other pixels keep their color.
pub fn relight(
    buffers: &RenderBuffers,
    camera: &Camera,
    shadows: Option<&ShadowMap<'_>>,
    shading: &ShadingConfig,
    exec: Exec,
) -> Vec<V3> {
    // The expected hit sits at most 1/σ inside the surface voxel.
    let lift = 2.0 / shading.sigma + 1e-3;
    exec.map_range(buffers.len(), |i| {
        let c = buffers.color[i];
        if !buffers.mask(i) {
            return c;
        }
        let n = buffers.normal[i];
        let visible = shadows.is_none_or(|sm| {
            let (u, v) = (i % buffers.width, i / buffers.width);
            let d = camera.ray_dir(u, v);
            let t = buffers.depth[i];
            let p = std::array::from_fn(|k| camera.position[k] + t * d[k] + lift * n[k]);
            sm.visible(p)
        });
        let f = lambert(n, shading.light_dir, shading.ambient, visible);
        [c[0] * f, c[1] * f, c[2] * f]
    })
}
