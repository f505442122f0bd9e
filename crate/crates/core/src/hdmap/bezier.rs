use crate::hdmap::geom::{dist, sub, unit, P2, P3};
use crate::hdmap::graph::{Connector, LaneGraph, NodeKind};
use crate::Exec;

/// Point on a Bézier curve of any degree (de Casteljau).
pub fn de_casteljau<const N: usize>(ctrl: &[P3; N], t: f64) -> P3 {
    let mut pts = *ctrl;
    for r in 1..N {
        for i in 0..N - r {
            for c in 0..3 {
                pts[i][c] = (1.0 - t) * pts[i][c] + t * pts[i + 1][c];
            }
        }
    }
    pts[0]
}

/// Cubic Bézier point.
pub fn cubic_point(c: &[P3; 4], t: f64) -> P3 {
    let u = 1.0 - t;
    let (b0, b1, b2, b3) = (u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t);
    std::array::from_fn(|k| b0 * c[0][k] + b1 * c[1][k] + b2 * c[2][k] + b3 * c[3][k])
}

/// First derivative of a cubic Bézier.
pub fn cubic_derivative(c: &[P3; 4], t: f64) -> P3 {
    let u = 1.0 - t;
    std::array::from_fn(|k| {
        3.0 * u * u * (c[1][k] - c[0][k]) + 6.0 * u * t * (c[2][k] - c[1][k]) + 3.0 * t * t * (c[3][k] - c[2][k])
    })
}

/// Second derivative of a cubic Bézier.
pub fn cubic_second_derivative(c: &[P3; 4], t: f64) -> P3 {
    std::array::from_fn(|k| {
        6.0 * (1.0 - t) * (c[2][k] - 2.0 * c[1][k] + c[0][k]) + 6.0 * t * (c[3][k] - 2.0 * c[2][k] + c[1][k])
    })
}

/// Planar curvature of a cubic Bézier at `t`.
pub fn cubic_curvature(c: &[P3; 4], t: f64) -> f64 {
    let d = cubic_derivative(c, t);
    let dd = cubic_second_derivative(c, t);
    let speed = d[0].hypot(d[1]);
    if speed == 0.0 {
        return f64::INFINITY;
    }
    (d[0] * dd[1] - d[1] * dd[0]).abs() / speed.powi(3)
}

/// Control points joining `p0` (leaving with unit tangent `t_in`) to `p3`
/// (arriving with unit tangent `t_out`). The inner handles sit a third of
/// the chord length along each tangent.
pub fn connector_controls(p0: P3, t_in: P2, p3: P3, t_out: P2) -> [P3; 4] {
    let d = dist([p0[0], p0[1]], [p3[0], p3[1]]) / 3.0;
    let dz = p3[2] - p0[2];
    [
        p0,
        [p0[0] + t_in[0] * d, p0[1] + t_in[1] * d, p0[2] + dz / 3.0],
        [p3[0] - t_out[0] * d, p3[1] - t_out[1] * d, p0[2] + 2.0 * dz / 3.0],
        p3,
    ]
}

fn xy(p: P3) -> P2 {
    [p[0], p[1]]
}

/// Unit tangent at the end of a polyline.
pub fn end_tangent(points: &[P3]) -> P2 {
    let n = points.len();
    if n < 2 {
        return [1.0, 0.0];
    }
    unit(sub(xy(points[n - 1]), xy(points[n - 2])))
}

/// Unit tangent at the start of a polyline.
pub fn start_tangent(points: &[P3]) -> P2 {
    if points.len() < 2 {
        return [1.0, 0.0];
    }
    unit(sub(xy(points[1]), xy(points[0])))
}

/// Adds a connector for every legal turn at every junction: each lane
/// ending at the node to each lane starting there, except the opposite
/// lanes of the same road (U-turns). A closed loop's anchor connects each
/// of its lanes back onto itself. Junctions are processed independently and
/// merged in node order, so ids do not depend on `exec`.
pub fn connect_intersections(graph: &mut LaneGraph, exec: Exec) {
    let nodes: Vec<usize> = graph
        .nodes
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::Junction | NodeKind::Loop))
        .map(|n| n.id)
        .collect();
    let g = &*graph;
    let per_node: Vec<Vec<Connector>> = exec.map_slice(&nodes, |&node| {
        let mut out = Vec::new();
        let loop_node = g.nodes[node].kind == NodeKind::Loop;
        for a in g.incoming(node) {
            for b in g.outgoing(node) {
                let (la, lb) = (&g.lanes[a], &g.lanes[b]);
                if loop_node {
                    if a != b {
                        continue;
                    }
                } else if is_u_turn(g, a, b) {
                    continue;
                }
                let p0 = *la.points.last().expect("lane has points");
                let p3 = lb.points[0];
                out.push(Connector {
                    id: 0,
                    node,
                    from_lane: a,
                    to_lane: b,
                    control: connector_controls(p0, end_tangent(&la.points), p3, start_tangent(&lb.points)),
                });
            }
        }
        out
    });
    graph.connectors = per_node
        .into_iter()
        .flatten()
        .enumerate()
        .map(|(id, mut c)| {
            c.id = id;
            c
        })
        .collect();
}

/// Whether two lanes travel in opposite directions on one road.
pub fn is_u_turn(graph: &LaneGraph, a: usize, b: usize) -> bool {
    let (la, lb) = (&graph.lanes[a], &graph.lanes[b]);
    la.centerline == lb.centerline && la.direction != lb.direction
}
