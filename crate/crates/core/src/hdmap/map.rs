use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::hdmap::bezier::connect_intersections;
use crate::hdmap::canny::{canny, CannyParams};
use crate::hdmap::distance::distance_transform;
use crate::hdmap::geom::P2;
use crate::hdmap::graph::{build_lane_graph, Centerline, Connector, Lane, LaneGraph, Node};
use crate::hdmap::lanes::populate_lanes;
use crate::hdmap::lines::{place_road_lines, RoadLine};
use crate::hdmap::signals::{place_signals, SignalPlacement, SignalThresholds};
use crate::hdmap::skeleton::{crop, pad_replicate, prune_spurs, skeletonize};
use crate::hdmap::vectorize::vectorize_edges;
use crate::layout::{CityLayout, Grid, SemanticClass};
use crate::{png_io, Exec, Result};

/// Pipeline knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdMapConfig {
    pub canny: CannyParams,
    /// Border replication applied before thinning, in pixels.
    pub pad: usize,
    /// Spurs shorter than this many pixels are pruned from the skeleton.
    pub min_spur_px: usize,
    pub signals: SignalThresholds,
}

impl Default for HdMapConfig {
    fn default() -> Self {
        Self {
            canny: CannyParams::default(),
            pad: 16,
            min_spur_px: 12,
            signals: SignalThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadEdge {
    pub id: usize,
    pub points: [P2; 2],
}

/// The serialized HD map. Coordinates are layout pixels; lane and connector
/// points carry the road surface height in cells as their third component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HdMap {
    pub pixel_scale: f64,
    pub width: usize,
    pub height: usize,
    pub road_edges: Vec<RoadEdge>,
    pub nodes: Vec<Node>,
    pub centerlines: Vec<Centerline>,
    pub lanes: Vec<Lane>,
    pub connectors: Vec<Connector>,
    pub road_lines: Vec<RoadLine>,
    pub signals: Vec<SignalPlacement>,
}

/// Road surface height (top of the road column) near a point, searching
/// outward up to `radius` pixels. `None` when no road is close.
fn surface_height(layout: &CityLayout, p: [f64; 2], radius: i64) -> Option<f64> {
    let (cx, cy) = (p[0].floor() as i64, p[1].floor() as i64);
    let mut best: Option<(i64, u16)> = None;
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            let (x, y) = (cx + dx, cy + dy);
            if x < 0 || y < 0 || x >= layout.width() as i64 || y >= layout.height() as i64 {
                continue;
            }
            let (class, _, td) = layout.column(x as usize, y as usize);
            if !class.is_road() {
                continue;
            }
            let d = dx * dx + dy * dy;
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, td));
            }
        }
    }
    best.map(|(_, td)| td as f64 + 1.0)
}

fn attach_heights(graph: &mut LaneGraph, layout: &CityLayout) {
    for lane in &mut graph.lanes {
        let mut last = None;
        let zs: Vec<Option<f64>> = lane
            .points
            .iter()
            .map(|p| surface_height(layout, [p[0], p[1]], 4))
            .collect();
        let fallback = zs.iter().flatten().next().copied().unwrap_or(0.0);
        for (p, z) in lane.points.iter_mut().zip(zs) {
            let z = z.or(last).unwrap_or(fallback);
            p[2] = z;
            last = Some(z);
        }
    }
}

impl HdMap {
    /// Runs the full extraction on a layout.
    pub fn from_layout(layout: &CityLayout, config: &HdMapConfig, exec: Exec) -> HdMap {
        let ps = layout.pixel_scale();
        let mask = layout.semantic.mask(SemanticClass::is_road);
        let (w, h) = mask.dims();

        let edges = canny(&mask, config.canny);
        let edge_graph = vectorize_edges(&edges);
        let road_edges = edge_graph
            .edges
            .iter()
            .enumerate()
            .map(|(id, e)| RoadEdge {
                id,
                points: [edge_graph.nodes[e[0]], edge_graph.nodes[e[1]]],
            })
            .collect();

        let skeleton = if config.pad > 0 {
            let padded = skeletonize(&pad_replicate(&mask, config.pad));
            crop(&padded, config.pad, w, h)
        } else {
            skeletonize(&mask)
        };
        let skeleton = prune_spurs(&skeleton, config.min_spur_px, 4);
        let half_width = distance_transform(&mask);

        let mut graph = build_lane_graph(&skeleton, &half_width, ps);
        populate_lanes(&mut graph, ps);
        attach_heights(&mut graph, layout);
        connect_intersections(&mut graph, exec);
        let road_lines = place_road_lines(&graph, ps);
        let signals = place_signals(&graph, config.signals, exec);

        HdMap {
            pixel_scale: ps,
            width: w,
            height: h,
            road_edges,
            nodes: graph.nodes,
            centerlines: graph.centerlines,
            lanes: graph.lanes,
            connectors: graph.connectors,
            road_lines,
            signals,
        }
    }

    pub fn lane_graph(&self) -> LaneGraph {
        LaneGraph {
            nodes: self.nodes.clone(),
            centerlines: self.centerlines.clone(),
            lanes: self.lanes.clone(),
            connectors: self.connectors.clone(),
        }
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn from_json(bytes: &[u8]) -> Result<HdMap> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        png_io::write_atomic(path, &self.to_json()?)
    }

    pub fn load(path: &Path) -> Result<HdMap> {
        let bytes = std::fs::read(path)?;
        HdMap::from_json(&bytes).map_err(|e| crate::Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Road mask of a layout.
pub fn road_mask(layout: &CityLayout) -> Grid<bool> {
    layout.semantic.mask(SemanticClass::is_road)
}
