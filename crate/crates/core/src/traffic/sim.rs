use std::collections::VecDeque;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hashing::hash_words;
use crate::hdmap::bezier::{connector_controls, cubic_point, end_tangent, start_tangent};
use crate::hdmap::geom::P3;
use crate::hdmap::LaneGraph;
use crate::traffic::pose::{pitch_from_grade, yaw_from_heading};
use crate::{png_io, Error, Result};

/// 50 km/h in m/s.
pub const DEFAULT_SPEED_LIMIT: f64 = 13.9;
/// Car length, width and height in meters.
pub const DEFAULT_DIMS_M: [f64; 3] = [4.5, 1.8, 1.5];
/// Samples per Bézier path.
const CURVE_SAMPLES: usize = 16;
/// Upper bound on how many paths a vehicle plans ahead.
const MAX_PLAN: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub id: usize,
    /// Center in layout cells (x, y in pixels, z in height cells).
    pub center: [f64; 3],
    /// Degrees in (−180, 180], measured from the −y axis.
    pub yaw: f64,
    /// Degrees in (−90, 90).
    pub pitch: f64,
    /// Length, width, height in cells.
    pub dims: [f64; 3],
    pub speed: f64,
    /// Lane under the vehicle, `None` while on a connector or turnaround.
    pub lane_id: Option<usize>,
    /// Meters along the current lane or connector.
    pub arc_pos: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficScenario {
    pub dt: f64,
    pub frames: Vec<Vec<VehicleState>>,
}

impl TrafficScenario {
    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut b = serde_json::to_vec(self)?;
        b.push(b'\n');
        Ok(b)
    }

    pub fn from_json(bytes: &[u8]) -> Result<TrafficScenario> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        png_io::write_atomic(path, &self.to_json()?)
    }

    pub fn load(path: &Path) -> Result<TrafficScenario> {
        let bytes = std::fs::read(path)?;
        TrafficScenario::from_json(&bytes).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// How each vehicle's cruising speed is picked.
#[derive(Debug, Clone, PartialEq)]
pub enum DesiredSpeed {
    /// Every vehicle wants the same speed (m/s).
    Fixed(f64),
    /// Speed per vehicle id; missing entries use the last one.
    PerVehicle(Vec<f64>),
    /// Seeded uniform draw between the two fractions of the speed limit.
    Random { min_frac: f64, max_frac: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_vehicles: usize,
    pub n_frames: usize,
    pub dt: f64,
    pub seed: u64,
    pub speed_limit: f64,
    pub dims_m: [f64; 3],
    pub desired: DesiredSpeed,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_vehicles: 0,
            n_frames: 1,
            dt: 0.1,
            seed: 0,
            speed_limit: DEFAULT_SPEED_LIMIT,
            dims_m: DEFAULT_DIMS_M,
            desired: DesiredSpeed::Random {
                min_frac: 0.6,
                max_frac: 1.0,
            },
        }
    }
}

impl SimConfig {
    /// Required center-to-center spacing along a path: two car lengths,
    /// which leaves a gap of one car length.
    pub fn spacing(&self) -> f64 {
        2.0 * self.dims_m[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PathKind {
    Lane(usize),
    Connector,
    Turnaround,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Path(usize),
    /// Leave the road network and re-enter at the start of a lane path.
    Reenter(usize),
}

#[derive(Debug, Clone)]
struct PathGeom {
    kind: PathKind,
    points: Vec<P3>,
    /// Cumulative arc length in meters at each point.
    cum: Vec<f64>,
    next: Vec<usize>,
}

impl PathGeom {
    fn new(kind: PathKind, points: Vec<P3>, ps: f64) -> Self {
        let mut cum = vec![0.0];
        for w in points.windows(2) {
            let d = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2) + (w[1][2] - w[0][2]).powi(2)).sqrt();
            cum.push(cum.last().unwrap() + d * ps);
        }
        Self {
            kind,
            points,
            cum,
            next: Vec::new(),
        }
    }

    fn len(&self) -> f64 {
        *self.cum.last().unwrap_or(&0.0)
    }

    /// Point and direction (cells, unnormalized) at arc length `s`.
    fn at(&self, s: f64) -> (P3, P3) {
        let n = self.points.len();
        if n == 1 {
            return (self.points[0], [0.0, -1.0, 0.0]);
        }
        let s = s.clamp(0.0, self.len());
        let mut i = self.cum.partition_point(|&c| c <= s).saturating_sub(1).min(n - 2);
        // Skip zero-length segments so the direction is defined.
        while i + 1 < n - 1 && self.cum[i + 1] - self.cum[i] <= 0.0 {
            i += 1;
        }
        let (a, b) = (self.points[i], self.points[i + 1]);
        let seg = self.cum[i + 1] - self.cum[i];
        let t = if seg > 0.0 { (s - self.cum[i]) / seg } else { 0.0 };
        let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        ([a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]], d)
    }
}

fn bezier_samples(c: &[P3; 4]) -> Vec<P3> {
    (0..=CURVE_SAMPLES).map(|i| cubic_point(c, i as f64 / CURVE_SAMPLES as f64)).collect()
}

/// Paths a vehicle can drive: lanes first (path id = lane id), then
/// connectors, then turnarounds at lane ends that have no connector but an
/// opposite lane.
fn build_paths(graph: &LaneGraph, ps: f64) -> Vec<PathGeom> {
    let mut paths: Vec<PathGeom> = graph
        .lanes
        .iter()
        .map(|l| PathGeom::new(PathKind::Lane(l.id), l.points.clone(), ps))
        .collect();
    let n_lanes = paths.len();
    for c in &graph.connectors {
        let id = paths.len();
        let mut p = PathGeom::new(PathKind::Connector, bezier_samples(&c.control), ps);
        p.next.push(c.to_lane);
        paths.push(p);
        paths[c.from_lane].next.push(id);
    }
    for lane in 0..n_lanes {
        if !paths[lane].next.is_empty() {
            continue;
        }
        let l = &graph.lanes[lane];
        let opposite = graph
            .lanes
            .iter()
            .filter(|o| o.centerline == l.centerline && o.direction != l.direction && o.start_node == l.end_node)
            .min_by(|a, b| (a.offset_m + l.offset_m).abs().total_cmp(&(b.offset_m + l.offset_m).abs()));
        if let Some(o) = opposite {
            let p0 = *l.points.last().expect("lane has points");
            let p3 = o.points[0];
            let ctrl = connector_controls(p0, end_tangent(&l.points), p3, start_tangent(&o.points));
            let id = paths.len();
            let mut p = PathGeom::new(PathKind::Turnaround, bezier_samples(&ctrl), ps);
            p.next.push(o.id);
            paths.push(p);
            paths[lane].next.push(id);
        }
    }
    paths
}

#[derive(Debug, Clone)]
struct Vehicle {
    id: usize,
    path: usize,
    arc: f64,
    speed: f64,
    desired: f64,
    plan: VecDeque<Step>,
    rng: ChaCha8Rng,
}

struct Sim<'a> {
    paths: Vec<PathGeom>,
    lane_paths: usize,
    cfg: &'a SimConfig,
    ps: f64,
    vehicles: Vec<Vehicle>,
}

impl Sim<'_> {
    fn extend_plan(&mut self, vi: usize, horizon: f64) {
        let v = &mut self.vehicles[vi];
        let mut ahead = self.paths[v.path].len() - v.arc;
        let mut last = v.path;
        for step in &v.plan {
            match *step {
                Step::Path(p) => {
                    ahead += self.paths[p].len();
                    last = p;
                }
                Step::Reenter(_) => return,
            }
        }
        while ahead < horizon && v.plan.len() < MAX_PLAN {
            let next = &self.paths[last].next;
            let step = match next.len() {
                0 => Step::Reenter(v.rng.random_range(0..self.lane_paths)),
                1 => Step::Path(next[0]),
                n => Step::Path(next[v.rng.random_range(0..n)]),
            };
            v.plan.push_back(step);
            match step {
                Step::Path(p) => {
                    ahead += self.paths[p].len();
                    last = p;
                }
                Step::Reenter(_) => return,
            }
        }
    }

    /// Position of vehicle `u` on path `p`: its arc if it is on `p`, or a
    /// negative arc measured back from the start of `p` if `p` is the next
    /// path it will enter.
    fn position_on(&self, u: &Vehicle, p: usize) -> Option<f64> {
        if u.path == p {
            return Some(u.arc);
        }
        match u.plan.front() {
            Some(&Step::Path(q)) | Some(&Step::Reenter(q)) if q == p => Some(u.arc - self.paths[u.path].len()),
            _ => None,
        }
    }

    fn step_vehicle(&mut self, vi: usize) {
        let dt = self.cfg.dt;
        let spacing = self.cfg.spacing();
        let cruise = self.vehicles[vi].desired.min(self.cfg.speed_limit);
        self.extend_plan(vi, spacing + cruise * dt + 1.0);

        // Route of consecutive paths with their start offsets, up to a
        // re-entry.
        let v = &self.vehicles[vi];
        let mut route = vec![(v.path, 0.0)];
        let mut off = self.paths[v.path].len();
        let mut reenter = None;
        for step in &v.plan {
            match *step {
                Step::Path(p) => {
                    route.push((p, off));
                    off += self.paths[p].len();
                }
                Step::Reenter(p) => {
                    reenter = Some(p);
                    break;
                }
            }
        }
        let mut adv = cruise * dt;
        for u in &self.vehicles {
            if u.id == v.id {
                continue;
            }
            for &(p, start) in &route {
                let Some(pu) = self.position_on(u, p) else { continue };
                let pos = start + pu;
                if pos > v.arc || (pos == v.arc && u.id < v.id) {
                    adv = adv.min((pos - spacing - v.arc).max(0.0));
                    break;
                }
            }
        }

        let v = &self.vehicles[vi];
        let route_end = off - v.arc;
        let mut teleport = None;
        if adv >= route_end {
            adv = route_end;
            if let Some(target) = reenter {
                let clear = self.vehicles.iter().all(|u| {
                    u.id == v.id || self.position_on(u, target).is_none_or(|pu| pu.abs() >= spacing)
                });
                if clear {
                    teleport = Some(target);
                }
            }
        }

        let paths = &self.paths;
        let v = &mut self.vehicles[vi];
        let mut remaining = adv;
        while v.arc + remaining > paths[v.path].len() {
            let Some(&Step::Path(p)) = v.plan.front() else { break };
            remaining -= paths[v.path].len() - v.arc;
            v.plan.pop_front();
            v.path = p;
            v.arc = 0.0;
        }
        v.arc = (v.arc + remaining).min(paths[v.path].len());
        if let Some(target) = teleport {
            v.plan.clear();
            v.path = target;
            v.arc = 0.0;
        }
        v.speed = adv / dt;
    }

    fn snapshot(&self) -> Vec<VehicleState> {
        let [l, w, h] = self.cfg.dims_m.map(|m| m / self.ps);
        self.vehicles
            .iter()
            .map(|v| {
                let path = &self.paths[v.path];
                let (p, d) = path.at(v.arc);
                let run = d[0].hypot(d[1]);
                VehicleState {
                    id: v.id,
                    center: [p[0], p[1], p[2] + h / 2.0],
                    yaw: yaw_from_heading(d[0], d[1]),
                    pitch: pitch_from_grade(d[2], run),
                    dims: [l, w, h],
                    speed: v.speed,
                    lane_id: match path.kind {
                        PathKind::Lane(id) => Some(id),
                        _ => None,
                    },
                    arc_pos: v.arc,
                }
            })
            .collect()
    }
}

/// Number of vehicles that fit: per lane, its length divided by the
/// required spacing, rounded down.
pub fn capacity(graph: &LaneGraph, pixel_scale: f64, cfg: &SimConfig) -> usize {
    build_paths(graph, pixel_scale)[..graph.lanes.len()]
        .iter()
        .map(|p| (p.len() / cfg.spacing()).floor() as usize)
        .sum()
}

/// Kinematic follow-the-leader traffic on the lane graph.
///
/// Vehicles spawn on seeded lane slots spaced two car lengths apart and
/// cruise at their desired speed, capped by the limit and by the distance
/// to the vehicle ahead along their planned route (which also covers
/// vehicles about to merge into the same path). At the end of a path the
/// next one is drawn from the vehicle's own seeded stream; dead ends turn
/// around onto the opposite lane, and lanes with no way on re-enter the
/// network at a seeded lane start once it is clear. Vehicles are advanced
/// one after another in id order within a frame.
pub fn simulate(graph: &LaneGraph, pixel_scale: f64, cfg: &SimConfig) -> Result<TrafficScenario> {
    if cfg.n_frames == 0 {
        return Err(Error::invalid("frame count must be at least 1"));
    }
    if !(cfg.dt > 0.0) || !(cfg.speed_limit > 0.0) || cfg.dims_m.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::invalid("dt, speed limit and vehicle dimensions must be positive"));
    }
    let paths = build_paths(graph, pixel_scale);
    let lane_paths = graph.lanes.len();
    let spacing = cfg.spacing();
    let slots: Vec<(usize, f64)> = (0..lane_paths)
        .flat_map(|p| {
            let n = (paths[p].len() / spacing).floor() as usize;
            (0..n).map(move |i| (p, (i as f64 + 0.5) * spacing))
        })
        .collect();
    if cfg.n_vehicles > slots.len() {
        return Err(Error::Capacity {
            requested: cfg.n_vehicles,
            capacity: slots.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut chosen = sample(&mut rng, slots.len(), cfg.n_vehicles).into_vec();
    chosen.sort_unstable();
    let vehicles = chosen
        .into_iter()
        .enumerate()
        .map(|(id, slot)| {
            let desired = match &cfg.desired {
                DesiredSpeed::Fixed(s) => *s,
                DesiredSpeed::PerVehicle(v) => v.get(id).or(v.last()).copied().unwrap_or(cfg.speed_limit),
                DesiredSpeed::Random { min_frac, max_frac } => {
                    cfg.speed_limit * (min_frac + (max_frac - min_frac) * rng.random::<f64>())
                }
            };
            Vehicle {
                id,
                path: slots[slot].0,
                arc: slots[slot].1,
                speed: desired.min(cfg.speed_limit),
                desired,
                plan: VecDeque::new(),
                rng: ChaCha8Rng::seed_from_u64(hash_words(cfg.seed, &[id as u64, 0x7261_6666])),
            }
        })
        .collect();
    let mut sim = Sim {
        paths,
        lane_paths,
        cfg,
        ps: pixel_scale,
        vehicles,
    };
    for vi in 0..sim.vehicles.len() {
        let horizon = spacing + sim.vehicles[vi].speed * cfg.dt + 1.0;
        sim.extend_plan(vi, horizon);
    }
    let mut frames = vec![sim.snapshot()];
    for _ in 1..cfg.n_frames {
        for vi in 0..sim.vehicles.len() {
            sim.step_vehicle(vi);
        }
        frames.push(sim.snapshot());
    }
    Ok(TrafficScenario { dt: cfg.dt, frames })
}
