use crate::encoders::{scene_feature_global, vehicle_point_feature, GLOBAL_FEATURE_DIM, VEHICLE_HALF_EXTENT};
use crate::layout::{HeightFieldPair, LocalWindow, SemanticClass, SemanticMap, Volume, WindowSize};
use crate::render::buffers::RenderBuffers;
use crate::render::building::ColorDecoder;
use crate::render::camera::{Camera, V3};
use crate::render::march::{far_plane, march, render_pixels, ShadingConfig};
use crate::traffic::pose::{mat_vec, rotation_matrix, transpose};
use crate::traffic::VehicleState;
use crate::{Exec, Result};

/// Vehicle instance ids start here so they never collide with building ids.
pub const VEHICLE_INSTANCE_BASE: u32 = 0x8000;
/// Headroom so the box never touches the canonical window border.
const VOXEL_MARGIN: f64 = 1.05;
const STYLE_GAIN: f64 = 0.35;

/// Edge length of one canonical voxel in layout cells.
pub fn vehicle_voxel_size(v: &VehicleState) -> f64 {
    let m = v.dims.iter().copied().fold(0.0, f64::max);
    (m / WindowSize::VEHICLE.w as f64 * VOXEL_MARGIN).max(1e-6)
}

/// The vehicle's shape as a 32³ dual-height window in its canonical frame
/// (facing −y, z up, centered on voxel 16): a lower body over the full
/// footprint with a narrower cabin set toward the rear.
pub fn canonical_vehicle_window(v: &VehicleState) -> LocalWindow {
    let n = WindowSize::VEHICLE.w;
    let s = vehicle_voxel_size(v);
    let half = n as f64 / 2.0;
    let (hl, hw, hh) = (v.dims[0] / 2.0 / s, v.dims[1] / 2.0 / s, v.dims[2] / 2.0 / s);
    let mut sem = SemanticMap::new(n, n, 1.0);
    let mut heights = HeightFieldPair::zeros(n, n);
    let z_floor = (half - hh).round().max(0.0) as u16;
    let z_body = ((half - hh + 1.2 * hh).round() as u16).max(z_floor + 1) - 1;
    let z_roof = ((half + hh).round() as u16).max(z_body + 1) - 1;
    for j in 0..n {
        for i in 0..n {
            let (cx, cy) = (i as f64 + 0.5 - half, j as f64 + 0.5 - half);
            if cx.abs() > hw || cy.abs() > hl {
                continue;
            }
            let cabin = cx.abs() <= 0.85 * hw && (-0.3 * hl..=0.6 * hl).contains(&cy);
            sem.cells.set(i, j, SemanticClass::Vehicle);
            heights.bottom_up.set(i, j, z_floor);
            heights.top_down.set(i, j, if cabin { z_roof } else { z_body });
        }
    }
    LocalWindow::from_parts((0, 0), n, sem, heights)
}

/// Renders one vehicle. Rays are mapped into the canonical frame with the
/// vehicle's rotation, so appearance follows front, rear and body rather
/// than the world pose. Masked pixels carry `VEHICLE_INSTANCE_BASE + id`.
pub fn render_vehicle(v: &VehicleState, camera: &Camera, shading: &ShadingConfig, exec: Exec) -> Result<RenderBuffers> {
    shading.validate()?;
    let empty = || RenderBuffers::empty(camera.width, camera.height, shading.sky);
    let r = 0.5 * (v.dims[0].powi(2) + v.dims[1].powi(2) + v.dims[2].powi(2)).sqrt() + 1.0;
    let lo = [v.center[0] - r, v.center[1] - r, v.center[2] - r];
    let hi = [v.center[0] + r, v.center[1] + r, v.center[2] + r];
    let Some(rect) = camera.screen_rect(lo, hi) else {
        return Ok(empty());
    };
    let window = canonical_vehicle_window(v);
    let Some(bounds) = window.content_bounds() else {
        return Ok(empty());
    };
    let s = vehicle_voxel_size(v);
    let rot = rotation_matrix(v.yaw, v.pitch);
    let rot_t = transpose(&rot);
    let f_global = scene_feature_global(&window, GLOBAL_FEATURE_DIM, shading.style_seed)?;
    let decoder = ColorDecoder::new(shading.style_seed, 2 * crate::encoders::SINCOS_LEVELS * (GLOBAL_FEATURE_DIM + 3));
    let rel: V3 = std::array::from_fn(|a| camera.position[a] - v.center[a]);
    let oc = mat_vec(&rot, rel).map(|c| c / s + VEHICLE_HALF_EXTENT);
    let t_max = far_plane(bounds.min, bounds.max, oc);
    let sigma = shading.sigma * s;
    let albedo = shading.albedo(SemanticClass::Vehicle);
    let mut out = render_pixels(camera, Some(rect), shading.sky, exec, |u, px_v| {
        let dc = mat_vec(&rot, camera.ray_dir(u, px_v));
        let mut sample = march(&window, oc, dc, t_max, sigma, shading.sky, |seg, _| {
            let tm = 0.5 * (seg.t0 + seg.t1);
            let p: V3 = std::array::from_fn(|a| oc[a] + tm * dc[a] - VEHICLE_HALF_EXTENT);
            let feat = vehicle_point_feature(p, &f_global);
            Some(ColorDecoder::modulate(albedo, decoder.partial(&feat, 0), STYLE_GAIN))
        });
        sample.depth *= s;
        if sample.alpha > 0.0 {
            sample.normal = mat_vec(&rot_t, sample.normal);
        }
        sample
    });
    out.tag_instance(VEHICLE_INSTANCE_BASE + v.id as u32);
    Ok(out)
}
