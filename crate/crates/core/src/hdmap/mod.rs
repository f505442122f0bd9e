//! High-definition map extraction from a semantic layout.
//!
//! Road edges come from Canny edge detection on the road mask followed by
//! chain tracing and Douglas–Peucker simplification. Centerlines come from
//! thinning the mask; lanes, connectors, markings and signals are derived
//! from the resulting graph.

pub mod bezier;
pub mod canny;
pub mod distance;
pub mod geom;
pub mod graph;
pub mod lanes;
pub mod lines;
mod map;
pub mod signals;
pub mod skeleton;
pub mod vectorize;

pub use bezier::connect_intersections;
pub use canny::{canny, detect_road_edges, CannyParams};
pub use distance::distance_transform;
pub use graph::{build_lane_graph, Centerline, Connector, Direction, Lane, LaneGraph, Node, NodeKind};
pub use lanes::{derive_lanes, populate_lanes, LANE_WIDTH_M};
pub use lines::{place_road_lines, LineStyle, RoadLine};
pub use map::{road_mask, HdMap, HdMapConfig, RoadEdge};
pub use signals::{place_signals, SignalKind, SignalPlacement, SignalThresholds};
pub use skeleton::skeletonize;
pub use vectorize::{vectorize_edges, RoadEdgeGraph};
