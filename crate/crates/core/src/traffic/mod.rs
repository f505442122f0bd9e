//! Kinematic traffic on the lane graph, vehicle poses and the per-frame
//! traffic rasters.

pub mod pose;
pub mod raster;
pub mod sim;

pub use pose::{canonicalize, decanonicalize, pitch_from_grade, rotation_matrix, yaw_from_heading, Mat3};
pub use raster::{boxes_to_maps, footprint_contains, vertical_extent};
pub use sim::{
    capacity, simulate, DesiredSpeed, SimConfig, TrafficScenario, VehicleState, DEFAULT_DIMS_M, DEFAULT_SPEED_LIMIT,
};
