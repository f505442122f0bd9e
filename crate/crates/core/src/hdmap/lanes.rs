use crate::hdmap::geom::{offset_polyline, polyline_length, trim_polyline, P2};
use crate::hdmap::graph::{Centerline, Direction, Lane, LaneGraph, NodeKind};

/// Standard lane width in meters.
pub const LANE_WIDTH_M: f64 = 3.5;

/// Share of a polyline that junction trimming may remove at most.
const MAX_TRIM_FRACTION: f64 = 0.8;

/// Lane count for a road of the given width.
pub fn lane_count(width_m: f64) -> usize {
    ((width_m / LANE_WIDTH_M).floor() as usize).max(1)
}

/// Signed offsets in meters (positive = right of the centerline direction),
/// ascending.
pub fn lane_offsets(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (k as f64 - (n as f64 - 1.0) / 2.0) * LANE_WIDTH_M)
        .collect()
}

/// Number of lanes traveling along the centerline direction: the larger
/// half, taken from the right-most offsets.
pub fn forward_count(n: usize) -> usize {
    n.div_ceil(2)
}

/// Directed lanes of one centerline, ordered by offset. Lane ids are left at
/// zero for the caller to assign.
pub fn derive_lanes(centerline: &Centerline, pixel_scale: f64) -> Vec<Lane> {
    let n = lane_count(centerline.width_m);
    let backward = n - forward_count(n);
    lane_offsets(n)
        .into_iter()
        .enumerate()
        .map(|(k, offset_m)| {
            let direction = if k < backward { Direction::Backward } else { Direction::Forward };
            let mut pts = offset_polyline(&centerline.points, offset_m / pixel_scale);
            let (start_node, end_node) = match direction {
                Direction::Forward => (centerline.start_node, centerline.end_node),
                Direction::Backward => {
                    pts.reverse();
                    (centerline.end_node, centerline.start_node)
                }
            };
            Lane {
                id: 0,
                centerline: centerline.id,
                left_node: centerline.start_node,
                right_node: centerline.end_node,
                start_node,
                end_node,
                direction,
                offset_m,
                width_m: LANE_WIDTH_M,
                points: pts.into_iter().map(|p| [p[0], p[1], 0.0]).collect(),
            }
        })
        .collect()
}

/// Clearance in pixels kept free around each node: the largest road
/// half-width among the centerlines meeting at a junction, zero elsewhere.
pub fn node_clearance(graph: &LaneGraph, pixel_scale: f64) -> Vec<f64> {
    graph
        .nodes
        .iter()
        .map(|n| {
            if n.kind != NodeKind::Junction {
                return 0.0;
            }
            graph
                .incident_centerlines(n.id)
                .iter()
                .map(|&c| graph.centerlines[c].width_m / 2.0 / pixel_scale)
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Trims a polyline by the given amounts, scaled down so that at least a
/// fifth of it survives.
pub fn trim_ends(line: &[P2], from_start: f64, from_end: f64) -> Vec<P2> {
    let len = polyline_length(line);
    let total = from_start + from_end;
    let cap = MAX_TRIM_FRACTION * len;
    let scale = if total > cap && total > 0.0 { cap / total } else { 1.0 };
    trim_polyline(line, from_start * scale, from_end * scale)
}

/// Derives all lanes, trims them back from junctions and assigns ids in
/// centerline order.
pub fn populate_lanes(graph: &mut LaneGraph, pixel_scale: f64) {
    let clearance = node_clearance(graph, pixel_scale);
    let mut lanes = Vec::new();
    for c in &graph.centerlines {
        for mut lane in derive_lanes(c, pixel_scale) {
            let xy: Vec<P2> = lane.points.iter().map(|p| [p[0], p[1]]).collect();
            let trimmed = trim_ends(&xy, clearance[lane.start_node], clearance[lane.end_node]);
            lane.points = trimmed.into_iter().map(|p| [p[0], p[1], 0.0]).collect();
            lane.id = lanes.len();
            lanes.push(lane);
        }
    }
    graph.lanes = lanes;
}
