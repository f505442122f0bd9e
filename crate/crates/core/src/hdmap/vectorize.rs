use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::hdmap::geom::{douglas_peucker, douglas_peucker_closed, P2};
use crate::hdmap::skeleton::m_neighbors;
use crate::layout::Grid;

/// Douglas–Peucker tolerance used for corner detection, in pixels.
pub const EDGE_SIMPLIFY_EPS: f64 = 1.5;

/// Polyline graph of road boundaries in layout pixel coordinates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoadEdgeGraph {
    pub nodes: Vec<P2>,
    pub edges: Vec<[usize; 2]>,
}

type Px = (i64, i64);

#[inline]
fn center(p: Px) -> P2 {
    [p.0 as f64 + 0.5, p.1 as f64 + 0.5]
}

/// Splits a binary raster into pixel chains under mixed adjacency: open chains run between
/// pixels whose degree is not 2, closed loops are returned with `true`.
pub fn trace_chains(raster: &Grid<bool>) -> Vec<(Vec<Px>, bool)> {
    let (w, h) = raster.dims();
    let order: Vec<Px> = (0..h as i64)
        .flat_map(|y| (0..w as i64).map(move |x| (x, y)))
        .filter(|&(x, y)| *raster.get(x as usize, y as usize))
        .collect();
    let adj: HashMap<Px, Vec<Px>> = order.iter().map(|&p| (p, m_neighbors(raster, p.0, p.1))).collect();
    let is_node = |p: &Px| adj[p].len() != 2;
    let mut used: HashSet<(Px, Px)> = HashSet::new();
    let mut on_chain: HashSet<Px> = HashSet::new();
    let mut chains = Vec::new();

    for &start in &order {
        if !is_node(&start) {
            continue;
        }
        on_chain.insert(start);
        if adj[&start].is_empty() {
            chains.push((vec![start], false));
            continue;
        }
        for &first in &adj[&start] {
            if used.contains(&(start, first)) {
                continue;
            }
            let mut chain = vec![start, first];
            used.insert((start, first));
            used.insert((first, start));
            let (mut prev, mut cur) = (start, first);
            while !is_node(&cur) {
                let next = adj[&cur].iter().copied().find(|&q| q != prev);
                let Some(next) = next else { break };
                if used.contains(&(cur, next)) {
                    break;
                }
                used.insert((cur, next));
                used.insert((next, cur));
                chain.push(next);
                prev = cur;
                cur = next;
            }
            on_chain.extend(chain.iter().copied());
            chains.push((chain, false));
        }
    }

    // Whatever is left consists of degree-2 pixels only: closed loops.
    for &start in &order {
        if on_chain.contains(&start) {
            continue;
        }
        let mut ring = vec![start];
        on_chain.insert(start);
        let (mut prev, mut cur) = (start, start);
        loop {
            let next = adj[&cur].iter().copied().find(|&q| q != prev && !on_chain.contains(&q));
            match next {
                Some(n) => {
                    on_chain.insert(n);
                    ring.push(n);
                    prev = cur;
                    cur = n;
                }
                None => break,
            }
        }
        chains.push((ring, true));
    }
    chains
}

/// Traces edge chains and simplifies them into corner-to-corner polylines.
pub fn vectorize_edges(edges: &Grid<bool>) -> RoadEdgeGraph {
    let mut graph = RoadEdgeGraph::default();
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let mut node_id = |p: P2, graph: &mut RoadEdgeGraph| -> usize {
        let key = ((p[0] * 1024.0).round() as i64, (p[1] * 1024.0).round() as i64);
        *index.entry(key).or_insert_with(|| {
            graph.nodes.push(p);
            graph.nodes.len() - 1
        })
    };
    for (chain, closed) in trace_chains(edges) {
        let pts: Vec<P2> = chain.iter().map(|&p| center(p)).collect();
        let simplified = if closed {
            douglas_peucker_closed(&pts, EDGE_SIMPLIFY_EPS)
        } else {
            douglas_peucker(&pts, EDGE_SIMPLIFY_EPS)
        };
        if simplified.len() == 1 {
            node_id(simplified[0], &mut graph);
            continue;
        }
        for seg in simplified.windows(2) {
            let a = node_id(seg[0], &mut graph);
            let b = node_id(seg[1], &mut graph);
            if a != b && !graph.edges.contains(&[a, b]) && !graph.edges.contains(&[b, a]) {
                graph.edges.push([a, b]);
            }
        }
    }
    graph
}
