use serde::{Deserialize, Serialize};

use crate::hdmap::geom::{offset_polyline, P2};
use crate::hdmap::graph::LaneGraph;
use crate::hdmap::lanes::{forward_count, lane_count, lane_offsets, node_clearance, trim_ends, LANE_WIDTH_M};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LineStyle {
    SolidSingleWhite,
    SolidDoubleYellow,
    BrokenSingleWhite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadLine {
    pub id: usize,
    pub centerline: usize,
    pub offset_m: f64,
    pub style: LineStyle,
    pub points: Vec<P2>,
}

/// Styles and offsets (meters, right positive) of the painted lines of an
/// `n`-lane road, left to right.
pub fn line_layout(n: usize) -> Vec<(f64, LineStyle)> {
    let offs = lane_offsets(n);
    let backward = n - forward_count(n);
    let half = LANE_WIDTH_M / 2.0;
    let mut out = vec![(offs[0] - half, LineStyle::SolidSingleWhite)];
    for k in 0..n - 1 {
        let style = if k + 1 == backward {
            LineStyle::SolidDoubleYellow
        } else {
            LineStyle::BrokenSingleWhite
        };
        out.push(((offs[k] + offs[k + 1]) / 2.0, style));
    }
    out.push((offs[n - 1] + half, LineStyle::SolidSingleWhite));
    out
}

/// Lane markings for every centerline: a double yellow between the two
/// travel directions, broken white between lanes of one direction and solid
/// white along both outer edges. Lines stop short of junctions like lanes.
pub fn place_road_lines(graph: &LaneGraph, pixel_scale: f64) -> Vec<RoadLine> {
    let clearance = node_clearance(graph, pixel_scale);
    let mut out = Vec::new();
    for c in &graph.centerlines {
        for (offset_m, style) in line_layout(lane_count(c.width_m)) {
            let pts = offset_polyline(&c.points, offset_m / pixel_scale);
            let pts = trim_ends(&pts, clearance[c.start_node], clearance[c.end_node]);
            out.push(RoadLine {
                id: out.len(),
                centerline: c.id,
                offset_m,
                style,
                points: pts,
            });
        }
    }
    out
}
