use serde::{Deserialize, Serialize};

use crate::hdmap::geom::P2;
use crate::hdmap::graph::{LaneGraph, NodeKind};
use crate::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignalKind {
    StopSign,
    TrafficLight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalPlacement {
    pub id: usize,
    pub node: usize,
    pub position: P2,
    pub kind: SignalKind,
    pub governed_lanes: Vec<usize>,
}

/// Lane-count thresholds for signal kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalThresholds {
    pub traffic_light: usize,
    pub stop_sign: usize,
}

impl Default for SignalThresholds {
    fn default() -> Self {
        Self {
            traffic_light: 6,
            stop_sign: 2,
        }
    }
}

/// Signal kind for a junction approached by `lanes` lanes.
pub fn signal_kind(lanes: usize, th: SignalThresholds) -> Option<SignalKind> {
    if lanes >= th.traffic_light {
        Some(SignalKind::TrafficLight)
    } else if lanes >= th.stop_sign {
        Some(SignalKind::StopSign)
    } else {
        None
    }
}

/// One signal per junction, at the junction node, governing every lane that
/// enters it. The approach count is the number of lanes touching the
/// junction in either direction.
pub fn place_signals(graph: &LaneGraph, th: SignalThresholds, exec: Exec) -> Vec<SignalPlacement> {
    let junctions: Vec<usize> = graph
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Junction)
        .map(|n| n.id)
        .collect();
    let found: Vec<Option<SignalPlacement>> = exec.map_slice(&junctions, |&node| {
        let approaches = graph
            .lanes
            .iter()
            .filter(|l| l.start_node == node || l.end_node == node)
            .count();
        signal_kind(approaches, th).map(|kind| SignalPlacement {
            id: 0,
            node,
            position: graph.nodes[node].position,
            kind,
            governed_lanes: graph.incoming(node),
        })
    });
    found
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(id, mut s)| {
            s.id = id;
            s
        })
        .collect()
}
