use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compositor::{compose, LayerStack};
use crate::hashing::hash_words;
use crate::layout::{
    extract_local_window, isolate_instance, relabel_facade_roof, CityLayout, InstanceMap, LocalWindow, WindowSize,
};
use crate::render::background::render_background;
use crate::render::buffers::RenderBuffers;
use crate::render::building::PreparedBuilding;
use crate::render::camera::{Camera, V3};
use crate::render::light::{relight, OverlayVolume, ShadowMap};
use crate::render::march::ShadingConfig;
use crate::render::vehicle::render_vehicle;
use crate::traffic::{boxes_to_maps, VehicleState};
use crate::{png_io, Error, Exec, Result};

/// Window sizes for one rendering scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderProfile {
    pub background: WindowSize,
    pub building: WindowSize,
}

impl RenderProfile {
    pub const GOOGLE_EARTH: RenderProfile = RenderProfile {
        background: WindowSize::GOOGLE_EARTH_BACKGROUND,
        building: WindowSize::GOOGLE_EARTH_BUILDING,
    };
    pub const CITYTOPIA: RenderProfile = RenderProfile {
        background: WindowSize::CITYTOPIA_BACKGROUND,
        building: WindowSize::CITYTOPIA_BUILDING,
    };

    pub fn by_name(name: &str) -> Option<RenderProfile> {
        match name.to_ascii_lowercase().as_str() {
            "google-earth" | "googleearth" | "ge" => Some(Self::GOOGLE_EARTH),
            "citytopia" | "ct" => Some(Self::CITYTOPIA),
            _ => None,
        }
    }
}

/// Style seed of building `id` under a scene seed.
pub fn building_style_seed(scene_seed: u64, id: u32) -> u64 {
    hash_words(scene_seed, &[1, id as u64])
}

/// Style seed of vehicle `id` under a scene seed.
pub fn vehicle_style_seed(scene_seed: u64, id: usize) -> u64 {
    hash_words(scene_seed, &[2, id as u64])
}

/// Per-instance style seeds that replace the ones derived from the scene
/// seed. Used for localized edits of single buildings or vehicles.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneStyles {
    #[serde(default)]
    pub buildings: BTreeMap<u32, u64>,
    #[serde(default)]
    pub vehicles: BTreeMap<usize, u64>,
}

impl SceneStyles {
    pub fn building_seed(&self, scene_seed: u64, id: u32) -> u64 {
        self.buildings.get(&id).copied().unwrap_or_else(|| building_style_seed(scene_seed, id))
    }

    pub fn vehicle_seed(&self, scene_seed: u64, id: usize) -> u64 {
        self.vehicles.get(&id).copied().unwrap_or_else(|| vehicle_style_seed(scene_seed, id))
    }

    pub fn load(path: &Path) -> Result<SceneStyles> {
        let bytes = std::fs::read(path)?;
        serde_json::from_slice(&bytes).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        png_io::write_atomic(path, &bytes)
    }
}

/// Building window for instance `id`: centered on its footprint and no
/// wider than the footprint needs, capped by the profile size.
fn building_window_size(bbox: [usize; 4], profile: WindowSize) -> WindowSize {
    let span = (bbox[2] - bbox[0]).max(bbox[3] - bbox[1]) + 4;
    let side = |cap: usize| (span + span % 2).min(cap);
    WindowSize::new(side(profile.h), side(profile.w), profile.d)
}

/// The view-independent part of a scene: the background window and every
/// building prepared for rendering. Reuse it across cameras and frames.
pub struct PreparedScene<'a> {
    layout: &'a CityLayout,
    background: LocalWindow,
    buildings: Vec<PreparedBuilding>,
    shading: ShadingConfig,
    styles: SceneStyles,
}

impl<'a> PreparedScene<'a> {
    pub fn new(
        layout: &'a CityLayout,
        instances: &InstanceMap,
        profile: &RenderProfile,
        shading: &ShadingConfig,
        exec: Exec,
    ) -> Result<Self> {
        Self::with_styles(layout, instances, profile, shading, SceneStyles::default(), exec)
    }

    /// Like [`PreparedScene::new`] with per-instance style overrides.
    pub fn with_styles(
        layout: &'a CityLayout,
        instances: &InstanceMap,
        profile: &RenderProfile,
        shading: &ShadingConfig,
        styles: SceneStyles,
        exec: Exec,
    ) -> Result<Self> {
        shading.validate()?;
        let center = ((layout.width() / 2) as i64, (layout.height() / 2) as i64);
        let background = extract_local_window(layout, center, profile.background);
        let mut buildings = Vec::new();
        for (k, (bbox, c)) in instances.bounding_boxes().into_iter().zip(instances.centers()).enumerate() {
            if bbox[0] > bbox[2] {
                continue;
            }
            let id = k as u32 + 1;
            let size = building_window_size(bbox, profile.building);
            let win = relabel_facade_roof(&isolate_instance(&extract_local_window(layout, c, size), instances, id), id);
            let style = shading.with_seed(styles.building_seed(shading.style_seed, id));
            buildings.push(PreparedBuilding::new(win, c, &style, exec)?);
        }
        Ok(Self {
            layout,
            background,
            buildings,
            shading: shading.clone(),
            styles,
        })
    }

    pub fn layout(&self) -> &CityLayout {
        self.layout
    }

    /// Renders every layer seen by `camera`: the static background, each
    /// building on screen, and each vehicle.
    pub fn render_layers(&self, vehicles: &[VehicleState], camera: &Camera, exec: Exec) -> Result<LayerStack> {
        let mut stack = LayerStack::new(render_background(&self.background, camera, &self.shading, exec)?);
        for b in &self.buildings {
            let layer = b.render(camera, exec);
            if layer.mask_count() > 0 {
                stack.buildings.push(layer);
            }
        }
        for v in vehicles {
            let style = self.shading.with_seed(self.styles.vehicle_seed(self.shading.style_seed, v.id));
            let layer = render_vehicle(v, camera, &style, exec)?;
            if layer.mask_count() > 0 {
                stack.vehicles.push(layer);
            }
        }
        Ok(stack)
    }

    /// Renders, composes and relights one frame, casting shadows from the
    /// layout and the frame's vehicles.
    pub fn render_frame(&self, vehicles: &[VehicleState], camera: &Camera, exec: Exec) -> Result<Frame> {
        let layers = self.render_layers(vehicles, camera, exec)?;
        let composed = compose(&layers, self.shading.sky, exec)?;
        let layout = self.layout;
        let traffic = boxes_to_maps(vehicles, layout.width(), layout.height(), layout.pixel_scale(), exec);
        let volume = OverlayVolume {
            base: layout,
            overlay: &traffic,
        };
        let shadows = ShadowMap::covering(&volume, self.shading.light_dir)?;
        let lit = relight(&composed, camera, Some(&shadows), &self.shading, exec);
        Ok(Frame { layers, composed, lit })
    }
}

/// A rendered frame: its layers, their composition, and the relit colors.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub layers: LayerStack,
    pub composed: RenderBuffers,
    pub lit: Vec<V3>,
}

/// One-off [`PreparedScene::render_layers`].
pub fn render_scene(
    layout: &CityLayout,
    instances: &InstanceMap,
    vehicles: &[VehicleState],
    camera: &Camera,
    profile: &RenderProfile,
    shading: &ShadingConfig,
    exec: Exec,
) -> Result<LayerStack> {
    PreparedScene::new(layout, instances, profile, shading, exec)?.render_layers(vehicles, camera, exec)
}

/// One-off [`PreparedScene::render_frame`].
pub fn render_frame(
    layout: &CityLayout,
    instances: &InstanceMap,
    vehicles: &[VehicleState],
    camera: &Camera,
    profile: &RenderProfile,
    shading: &ShadingConfig,
    exec: Exec,
) -> Result<Frame> {
    PreparedScene::new(layout, instances, profile, shading, exec)?.render_frame(vehicles, camera, exec)
}

/// Camera on a circle of `radius` around the layout center at `height`,
/// looking at the center; `k` of `n` steps around the circle.
pub fn orbit_camera(layout: &CityLayout, radius: f64, height: f64, k: usize, n: usize, fx: f64, w: usize, h: usize) -> Result<Camera> {
    let c = [layout.width() as f64 / 2.0, layout.height() as f64 / 2.0, 0.0];
    let a = std::f64::consts::TAU * k as f64 / n.max(1) as f64;
    let pos = [c[0] + radius * a.cos(), c[1] + radius * a.sin(), height];
    Camera::look_at(pos, c, [0.0, 0.0, 1.0], fx, fx, w, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::instantiate_buildings;
    use crate::layout::procedural::sample_city;

    #[test]
    fn frame_is_deterministic_and_normalized() {
        let l = sample_city(2);
        let inst = instantiate_buildings(&l.semantic);
        let cam = orbit_camera(&l, 120.0, 80.0, 1, 8, 40.0, 48, 27).unwrap();
        let sh = ShadingConfig::default();
        let a = render_frame(&l, &inst, &[], &cam, &RenderProfile::GOOGLE_EARTH, &sh, Exec::Parallel).unwrap();
        let b = render_frame(&l, &inst, &[], &cam, &RenderProfile::GOOGLE_EARTH, &sh, Exec::Sequential).unwrap();
        assert_eq!(a, b);
        assert!(!a.layers.buildings.is_empty());
        for (_, layer) in a.layers.layers() {
            assert!(layer.energy_error() < 1e-9);
            layer.check_coverage().unwrap();
        }
        a.composed.check_coverage().unwrap();
        assert!(a.composed.mask_count() > a.composed.len() / 2);
    }
}
