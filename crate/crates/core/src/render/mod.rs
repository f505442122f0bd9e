//! Volumetric rendering of layout windows and vehicles.
//!
//! Rays walk the voxel grid cell by cell and each occupied segment is
//! integrated in closed form, so a pixel's weights and its residual
//! transmittance always sum to one.

pub mod background;
pub mod buffers;
pub mod building;
pub mod camera;
pub mod dda;
pub mod io;
pub mod light;
pub mod march;
pub mod scene;
pub mod vehicle;

pub use background::render_background;
pub use buffers::{PixelSample, RenderBuffers, MASK_THRESHOLD};
pub use building::{render_building, PreparedBuilding};
pub use camera::{Camera, CameraSpec};
pub use dda::{dda_traverse, dda_visit, Segment};
pub use light::{relight, OverlayVolume, ShadowMap};
pub use march::{march, ShadingConfig};
pub use scene::{
    building_style_seed, orbit_camera, render_frame, render_scene, vehicle_style_seed, Frame, PreparedScene, RenderProfile,
    SceneStyles,
};
pub use vehicle::{render_vehicle, VEHICLE_INSTANCE_BASE};
