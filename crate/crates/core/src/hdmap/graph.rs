use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::hdmap::geom::{douglas_peucker, P2, P3};
use crate::hdmap::skeleton::{m_degree, m_neighbors};
use crate::layout::Grid;

/// Tolerance used when simplifying traced centerlines, in pixels.
pub const CENTERLINE_SIMPLIFY_EPS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// Three or more centerlines meet.
    Junction,
    /// A chain ends: dead end or the layout border.
    End,
    /// Anchor of a closed centerline that touches no other road.
    Loop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub position: P2,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centerline {
    pub id: usize,
    pub start_node: usize,
    pub end_node: usize,
    pub points: Vec<P2>,
    pub width_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Travels from the centerline's start node to its end node.
    Forward,
    Backward,
}

/// A directed lane. `left_node`/`right_node` are the centerline's start and
/// end nodes; `start_node`/`end_node` follow the direction of travel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lane {
    pub id: usize,
    pub centerline: usize,
    pub left_node: usize,
    pub right_node: usize,
    pub start_node: usize,
    pub end_node: usize,
    pub direction: Direction,
    pub offset_m: f64,
    pub width_m: f64,
    pub points: Vec<P3>,
}

/// Cubic Bézier joining the end of `from_lane` to the start of `to_lane`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connector {
    pub id: usize,
    pub node: usize,
    pub from_lane: usize,
    pub to_lane: usize,
    pub control: [P3; 4],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LaneGraph {
    pub nodes: Vec<Node>,
    pub centerlines: Vec<Centerline>,
    pub lanes: Vec<Lane>,
    pub connectors: Vec<Connector>,
}

impl LaneGraph {
    pub fn junctions(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Junction)
    }

    /// Lanes whose travel ends at `node`, in id order.
    pub fn incoming(&self, node: usize) -> Vec<usize> {
        self.lanes.iter().filter(|l| l.end_node == node).map(|l| l.id).collect()
    }

    /// Lanes whose travel starts at `node`, in id order.
    pub fn outgoing(&self, node: usize) -> Vec<usize> {
        self.lanes.iter().filter(|l| l.start_node == node).map(|l| l.id).collect()
    }

    /// Centerline ids touching `node` (a loop counts once).
    pub fn incident_centerlines(&self, node: usize) -> Vec<usize> {
        self.centerlines
            .iter()
            .filter(|c| c.start_node == node || c.end_node == node)
            .map(|c| c.id)
            .collect()
    }
}

type Px = (i64, i64);

#[inline]
fn center(p: Px) -> P2 {
    [p.0 as f64 + 0.5, p.1 as f64 + 0.5]
}

/// Walks the skeleton into centerlines between junctions and ends.
///
/// Junction pixels are skeleton pixels with three or more neighbors (mixed
/// adjacency); touching junction pixels merge into one node placed at their
/// mean. Each centerline's road width is twice the mean half-width sampled
/// along its pixels, converted to meters with `pixel_scale`.
pub fn build_lane_graph(skeleton: &Grid<bool>, half_width: &Grid<f64>, pixel_scale: f64) -> LaneGraph {
    let (w, h) = skeleton.dims();
    let on = |p: Px| skeleton.checked(p.0, p.1).copied().unwrap_or(false);
    let pixels: Vec<Px> = (0..h as i64)
        .flat_map(|y| (0..w as i64).map(move |x| (x, y)))
        .filter(|&p| on(p))
        .collect();

    // Node pixel -> node id.
    let mut node_of: BTreeMap<Px, usize> = BTreeMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    for &p in &pixels {
        if node_of.contains_key(&p) {
            continue;
        }
        let deg = m_degree(skeleton, p.0, p.1);
        if deg >= 3 {
            // Flood the 8-connected cluster of junction pixels.
            let id = nodes.len();
            let mut cluster = vec![p];
            let mut queue = VecDeque::from([p]);
            node_of.insert(p, id);
            while let Some(c) = queue.pop_front() {
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let q = (c.0 + dx, c.1 + dy);
                        if on(q) && !node_of.contains_key(&q) && m_degree(skeleton, q.0, q.1) >= 3 {
                            node_of.insert(q, id);
                            cluster.push(q);
                            queue.push_back(q);
                        }
                    }
                }
            }
            let n = cluster.len() as f64;
            let sx: f64 = cluster.iter().map(|q| center(*q)[0]).sum();
            let sy: f64 = cluster.iter().map(|q| center(*q)[1]).sum();
            nodes.push(Node {
                id,
                position: [sx / n, sy / n],
                kind: NodeKind::Junction,
            });
        } else if deg == 1 {
            node_of.insert(p, nodes.len());
            nodes.push(Node {
                id: nodes.len(),
                position: center(p),
                kind: NodeKind::End,
            });
        }
    }

    let mut used: HashSet<(Px, Px)> = HashSet::new();
    let mut visited: HashSet<Px> = HashSet::new();
    let mut chains: Vec<(usize, usize, Vec<Px>)> = Vec::new();

    let walk = |start: Px,
                first: Px,
                used: &mut HashSet<(Px, Px)>,
                stop: &dyn Fn(Px) -> bool|
     -> Vec<Px> {
        let mut chain = vec![start, first];
        used.insert((start, first));
        used.insert((first, start));
        let (mut prev, mut cur) = (start, first);
        while !stop(cur) {
            let next = m_neighbors(skeleton, cur.0, cur.1)
                .into_iter()
                .find(|&q| q != prev && !used.contains(&(cur, q)));
            let Some(next) = next else { break };
            used.insert((cur, next));
            used.insert((next, cur));
            chain.push(next);
            prev = cur;
            cur = next;
        }
        chain
    };

    let node_pixels: Vec<Px> = node_of.keys().copied().collect();
    for &start in &node_pixels {
        let sid = node_of[&start];
        for first in m_neighbors(skeleton, start.0, start.1) {
            if used.contains(&(start, first)) || node_of.get(&first) == Some(&sid) {
                continue;
            }
            let chain = walk(start, first, &mut used, &|q| node_of.contains_key(&q));
            let last = *chain.last().expect("non-empty chain");
            let Some(&eid) = node_of.get(&last) else { continue };
            visited.extend(chain.iter().copied());
            chains.push((sid, eid, chain));
        }
    }

    // Closed loops that touch no node.
    for &p in &pixels {
        if visited.contains(&p) || node_of.contains_key(&p) {
            continue;
        }
        let nbrs = m_neighbors(skeleton, p.0, p.1);
        if nbrs.is_empty() {
            continue;
        }
        let id = nodes.len();
        nodes.push(Node {
            id,
            position: center(p),
            kind: NodeKind::Loop,
        });
        let chain = walk(p, nbrs[0], &mut used, &|q| q == p);
        visited.extend(chain.iter().copied());
        chains.push((id, id, chain));
    }

    let centerlines = chains
        .into_iter()
        .enumerate()
        .map(|(id, (s, e, chain))| {
            let interior: Vec<Px> = if chain.len() > 2 {
                chain[1..chain.len() - 1].to_vec()
            } else {
                chain.clone()
            };
            let mean = interior
                .iter()
                .map(|q| *half_width.get(q.0 as usize, q.1 as usize))
                .sum::<f64>()
                / interior.len() as f64;
            let mut pts: Vec<P2> = chain.iter().map(|&q| center(q)).collect();
            pts[0] = nodes[s].position;
            let k = pts.len() - 1;
            pts[k] = nodes[e].position;
            let pts = if s == e {
                // Keep a closed loop closed while simplifying each half.
                let mid = pts.len() / 2;
                let mut a = douglas_peucker(&pts[..=mid], CENTERLINE_SIMPLIFY_EPS);
                let b = douglas_peucker(&pts[mid..], CENTERLINE_SIMPLIFY_EPS);
                a.pop();
                a.extend(b);
                a
            } else {
                douglas_peucker(&pts, CENTERLINE_SIMPLIFY_EPS)
            };
            Centerline {
                id,
                start_node: s,
                end_node: e,
                points: pts,
                width_m: 2.0 * mean * pixel_scale,
            }
        })
        .collect();

    LaneGraph {
        nodes,
        centerlines,
        lanes: Vec::new(),
        connectors: Vec::new(),
    }
}
