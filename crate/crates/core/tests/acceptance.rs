//! Acceptance suite. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion does.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use cityforge::compositor::{compose, LayerStack, DEPTH_TIE};
use cityforge::encoders::{hash_index, HashGridConfig};
use cityforge::hdmap::skeleton::has_full_2x2;
use cityforge::hdmap::{lanes::lane_count, skeletonize, HdMap, HdMapConfig};
use cityforge::layout::procedural::sample_city;
use cityforge::layout::{instantiate_buildings, volume_lookup, CityLayout, Grid, SemanticClass};
use cityforge::osm::{
    ground_resolution, project_mercator, rasterize, GeoFeature, GeometryKind, MercatorGrid, PerlinField,
};
use cityforge::render::io::to_rgb8;
use cityforge::render::march::{march, ShadingConfig};
use cityforge::render::{orbit_camera, Camera, PreparedScene, RenderBuffers, RenderProfile, ShadowMap};
use cityforge::traffic::{canonicalize, decanonicalize, rotation_matrix, simulate, SimConfig, TrafficScenario};
use cityforge::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn volume_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0usize;
    let mut cells = 0usize;
    for _ in 0..50 {
        let (w, h, d) = (rng.random_range(1..=64), rng.random_range(1..=64), 64usize);
        let mut layout = CityLayout::empty(w, h, 1.0);
        let mut dense = vec![SemanticClass::Null; w * h * d];
        for y in 0..h {
            for x in 0..w {
                let class = SemanticClass::ALL[rng.random_range(0..SemanticClass::COUNT)];
                let bu: u16 = rng.random_range(0..40);
                let td: u16 = rng.random_range(bu..64);
                layout.set_column(x, y, class, bu, td);
                if class != SemanticClass::Null {
                    for k in bu as usize..=td as usize {
                        dense[(k * h + y) * w + x] = class;
                    }
                }
            }
        }
        for k in -1..=d as i64 {
            for y in -1..=h as i64 {
                for x in -1..=w as i64 {
                    let inside = x >= 0 && y >= 0 && k >= 0 && (x as usize) < w && (y as usize) < h && (k as usize) < d;
                    let want = if inside {
                        dense[((k as usize) * h + y as usize) * w + x as usize]
                    } else {
                        SemanticClass::Null
                    };
                    cells += 1;
                    mismatches += usize::from(volume_lookup(&layout, x, y, k) != want);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        mismatches == 0 && secs < 10.0,
        format!("{mismatches} mismatches over {cells} cells in {secs:.2} s"),
    )
}

fn mercator_constants() -> Outcome {
    let res = ground_resolution(18);
    let origin = project_mercator(0.0, 0.0, 18).map_err(|e| e.to_string())?;
    check(
        (res - 0.5972).abs() < 5e-4 && origin == (33_554_432.0, 33_554_432.0),
        format!("zoom-18 resolution {res:.6} m/px, (0,0) -> ({}, {})", origin.0, origin.1),
    )
}

fn osm_height_recipe() -> Outcome {
    let start = Instant::now();
    let grid = MercatorGrid::from_bbox(0.0, 0.0, 0.0008, 0.0008, 18).map_err(|e| e.to_string())?;
    let ps = grid.pixel_scale();
    let corner = |fx: f64, fy: f64| [0.0008 * fx, 0.0008 * (1.0 - fy)];
    let feature = |class, geometry, coords: Vec<[f64; 2]>| GeoFeature {
        geometry,
        class,
        coords,
        height_m: None,
        min_height_m: None,
        width_m: None,
    };
    let features = vec![
        feature(SemanticClass::Road, GeometryKind::Polyline, vec![corner(0.0, 0.25), corner(1.0, 0.25)]),
        feature(
            SemanticClass::Water,
            GeometryKind::Polygon,
            vec![corner(0.1, 0.5), corner(0.4, 0.5), corner(0.4, 0.9), corner(0.1, 0.9)],
        ),
        feature(
            SemanticClass::Vegetation,
            GeometryKind::Polygon,
            vec![corner(0.6, 0.5), corner(0.95, 0.5), corner(0.95, 0.95), corner(0.6, 0.95)],
        ),
    ];
    let layout = rasterize(&features, &grid, &PerlinField::greenery(3)).map_err(|e| e.to_string())?;
    let road_td = (4.0 / ps).round() as u16;
    let (lo, hi) = ((8.0 / ps).round() as u16, (16.0 / ps).round() as u16);
    let mut counts = [0usize; 3];
    let mut bad = Vec::new();
    for y in 0..layout.height() {
        for x in 0..layout.width() {
            let (c, bu, td) = layout.column(x, y);
            match c {
                SemanticClass::Road => {
                    counts[0] += 1;
                    if (bu, td) != (0, road_td) {
                        bad.push(format!("road ({x},{y}) = {bu}..{td}"));
                    }
                }
                SemanticClass::Water => {
                    counts[1] += 1;
                    if td != 0 {
                        bad.push(format!("water ({x},{y}) td {td}"));
                    }
                }
                SemanticClass::Vegetation => {
                    counts[2] += 1;
                    if !(lo..=hi).contains(&td) {
                        bad.push(format!("vegetation ({x},{y}) td {td}"));
                    }
                }
                _ => {}
            }
        }
    }
    let field = PerlinField::greenery(11);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..1_000_000 {
        let v = field.sample(rng.random_range(-1e6..1e6), rng.random_range(-1e6..1e6));
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        bad.is_empty() && counts.iter().all(|&c| c > 0) && vmin >= 8.0 && vmax <= 16.0 && secs < 5.0,
        format!(
            "road TD {road_td}, {} road/water/vegetation cells {:?}, vegetation samples in [{vmin:.3}, {vmax:.3}] m, {} bad, {secs:.2} s",
            counts.iter().sum::<usize>(),
            counts,
            bad.len()
        ),
    )
}

fn hash_encoder() -> Outcome {
    const PRIMES: [u64; 5] = [1, 2_654_435_761, 805_459_861, 3_674_653_429, 2_097_192_037];
    let cfg = HashGridConfig::default();
    let defaults = cfg.primes == PRIMES && cfg.entries == 1 << 19 && cfg.levels == 16 && cfg.channels == 8;
    let oracle = |p: [i64; 3], f: [i64; 2]| -> usize {
        let terms = [f[0], f[1], p[0], p[1], p[2]];
        let mut h = 0u64;
        for (t, prime) in terms.iter().zip(PRIMES) {
            h ^= (*t as u64).wrapping_mul(prime);
        }
        (h % (1u64 << 19)) as usize
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    for i in 0..1_000_000 {
        let span = if i % 2 == 0 { 1i64 << 20 } else { i64::MAX };
        let mut r = || rng.random_range(-span..span);
        let p = [r(), r(), r()];
        let f = [r(), r()];
        mismatches += usize::from(hash_index(p, &f, &cfg) != oracle(p, f));
    }
    check(
        defaults && mismatches == 0,
        format!("{mismatches} mismatches on 10^6 keys; published primes and 2^19 entries default: {defaults}"),
    )
}

fn rotation_canonicalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut orth, mut det_err, mut round_trip) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let theta = rng.random_range(-180.0..180.0);
        let gamma = rng.random_range(-89.0..89.0);
        let r = rotation_matrix(theta, gamma);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                orth = orth.max((dot - f64::from(u8::from(i == j))).abs());
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        det_err = det_err.max((det - 1.0).abs());
        let c = [rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0), rng.random_range(0.0..50.0)];
        let p = [c[0] + rng.random_range(-5.0..5.0), c[1] + rng.random_range(-5.0..5.0), c[2] + rng.random_range(-5.0..5.0)];
        let back = decanonicalize(canonicalize(p, c, theta, gamma), c, theta, gamma);
        for k in 0..3 {
            round_trip = round_trip.max((back[k] - p[k]).abs());
        }
    }
    check(
        orth <= 1e-12 && det_err <= 1e-12 && round_trip < 1e-9,
        format!("max |RᵀR − I| {orth:.2e}, max |det − 1| {det_err:.2e}, round trip {round_trip:.2e}"),
    )
}

/// One-row volume of two cells for the analytic comparison.
struct TwoCells;

impl cityforge::layout::Volume for TwoCells {
    fn dims(&self) -> [usize; 3] {
        [2, 1, 1]
    }

    fn label(&self, x: i64, y: i64, z: i64) -> SemanticClass {
        match (x, y, z) {
            (0, 0, 0) => SemanticClass::Road,
            (1, 0, 0) => SemanticClass::Water,
            _ => SemanticClass::Null,
        }
    }
}

fn rendering_quadrature(frames: &[&RenderBuffers]) -> Outcome {
    let worst = frames.iter().map(|b| b.energy_error()).fold(0.0, f64::max);
    let sigma = 1.7;
    let start = 0.35;
    let colors = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    let s = march(&TwoCells, [start, 0.5, 0.5], [1.0, 0.0, 0.0], 10.0, sigma, [0.0; 3], |seg, _| {
        Some(colors[seg.cell[0] as usize])
    });
    // Midpoint rule on T(t)·σ·c(t) over the two segments.
    let n = 10_000;
    let total = 2.0 - start;
    let dt = total / n as f64;
    let mut want = [0.0; 2];
    let mut tau = 0.0;
    for i in 0..n {
        let t = start + (i as f64 + 0.5) * dt;
        let k = usize::from(t >= 1.0);
        want[k] += (-(tau + sigma * dt / 2.0)).exp() * sigma * dt;
        tau += sigma * dt;
    }
    let err = (s.color[0] - want[0]).abs().max((s.color[1] - want[1]).abs());
    check(
        worst <= 1e-9 && err <= 1e-4,
        format!(
            "max |Σw + T − 1| {worst:.2e} over {} rendered buffers; two-segment error {err:.2e}",
            frames.len()
        ),
    )
}

fn multi_view(scene: &PreparedScene<'_>, layout: &CityLayout) -> Outcome {
    let start = Instant::now();
    let (w, h, fx) = (480, 270, 420.0);
    // 12 steps around the orbit are 30° apart.
    let cam_a = orbit_camera(layout, 200.0, 140.0, 1, 12, fx, w, h).map_err(|e| e.to_string())?;
    let cam_b = orbit_camera(layout, 200.0, 140.0, 2, 12, fx, w, h).map_err(|e| e.to_string())?;
    let a = scene.render_frame(&[], &cam_a, Exec::Parallel).map_err(|e| e.to_string())?.composed;
    let b = scene.render_frame(&[], &cam_b, Exec::Parallel).map_err(|e| e.to_string())?.composed;
    let lift = 2.0 / ShadingConfig::default().sigma + 1e-3;
    let (mut covisible, mut agree) = (0usize, 0usize);
    for i in 0..a.len() {
        if !a.mask(i) {
            continue;
        }
        let d = cam_a.ray_dir(i % w, i / w);
        let p: [f64; 3] = std::array::from_fn(|k| cam_a.position[k] + a.depth[i] * d[k]);
        let Some((u, v, _)) = cam_b.project(p) else {
            continue;
        };
        if !(u >= 0.0 && v >= 0.0 && u < w as f64 && v < h as f64) {
            continue;
        }
        let j = v.floor() as usize * w + u.floor() as usize;
        if !b.mask(j) {
            continue;
        }
        // Independent visibility test: walk from the lifted surface point
        // to the second camera through the layout volume.
        let n = a.normal[i];
        let q: [f64; 3] = std::array::from_fn(|k| p[k] + lift * n[k]);
        let to_b: [f64; 3] = std::array::from_fn(|k| cam_b.position[k] - q[k]);
        let dist = to_b.iter().map(|c| c * c).sum::<f64>().sqrt();
        let dir = to_b.map(|c| c / dist);
        let sm = ShadowMap::new(layout, dir, dist).map_err(|e| e.to_string())?;
        if !sm.visible(q) {
            continue;
        }
        covisible += 1;
        let t_p = p.iter().zip(cam_b.position).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        agree += usize::from((t_p - b.depth[j]).abs() <= 1.0);
    }
    let frac = agree as f64 / covisible.max(1) as f64;
    let secs = start.elapsed().as_secs_f64();
    check(
        covisible > 1000 && frac >= 0.95 && secs < 60.0,
        format!("{agree}/{covisible} co-visible pixels within 1 cell ({:.2}%), {secs:.1} s", 100.0 * frac),
    )
}

/// Components of an 8-connected foreground.
fn components(g: &Grid<bool>) -> usize {
    let (w, h) = g.dims();
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for start in 0..w * h {
        if seen[start] || !g.as_slice()[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if g.as_slice()[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    count
}

fn random_road_mask(rng: &mut ChaCha8Rng) -> Grid<bool> {
    let (w, h) = (96, 96);
    let mut g = Grid::filled(w, h, false);
    for _ in 0..rng.random_range(2..6) {
        let half = rng.random_range(2..6) as f64;
        let (x0, y0) = (rng.random_range(0.0..w as f64), rng.random_range(0.0..h as f64));
        let (x1, y1) = (rng.random_range(0.0..w as f64), rng.random_range(0.0..h as f64));
        for y in 0..h {
            for x in 0..w {
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                let (dx, dy) = (x1 - x0, y1 - y0);
                let t = (((px - x0) * dx + (py - y0) * dy) / (dx * dx + dy * dy).max(1e-9)).clamp(0.0, 1.0);
                let (cx, cy) = (x0 + t * dx, y0 + t * dy);
                if (px - cx).hypot(py - cy) <= half {
                    g.set(x, y, true);
                }
            }
        }
    }
    g
}

fn hdmap_suite(map: &HdMap) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut thick = 0;
    let mut topology = 0;
    for _ in 0..20 {
        let mask = random_road_mask(&mut rng);
        let skel = skeletonize(&mask);
        thick += usize::from(has_full_2x2(&skel));
        topology += usize::from(components(&skel) != components(&mask));
    }
    let lanes = &map.lanes;
    let mut worst_pos = 0.0f64;
    let mut worst_tan = 0.0f64;
    for c in &map.connectors {
        let from = &lanes[c.from_lane].points;
        let to = &lanes[c.to_lane].points;
        let (end, start) = (from[from.len() - 1], to[0]);
        for k in 0..3 {
            worst_pos = worst_pos.max((c.control[0][k] - end[k]).abs()).max((c.control[3][k] - start[k]).abs());
        }
        let unit = |a: [f64; 3], b: [f64; 3]| {
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let n = dx.hypot(dy);
            [dx / n, dy / n]
        };
        let pairs = [
            (unit(from[from.len() - 2], end), unit(c.control[0], c.control[1])),
            (unit(start, to[1]), unit(c.control[2], c.control[3])),
        ];
        for (lane_t, curve_t) in pairs {
            if curve_t.iter().all(|v| v.is_finite()) {
                let gap = (lane_t[0] - curve_t[0]).abs().max((lane_t[1] - curve_t[1]).abs());
                worst_tan = worst_tan.max(gap);
            }
        }
    }
    let counts = (lane_count(7.0), lane_count(10.5));
    check(
        thick == 0 && topology == 0 && worst_pos < 1e-6 && worst_tan < 1e-6 && counts == (2, 3) && !map.connectors.is_empty(),
        format!(
            "skeletons: {thick} with 2×2 blocks, {topology} topology changes; {} connectors, endpoint gap {worst_pos:.1e}, tangent gap {worst_tan:.1e}; lanes(7 m, 10.5 m) = {counts:?}",
            map.connectors.len()
        ),
    )
}

fn point_segment_distance(p: [f64; 2], a: [f64; 3], b: [f64; 3]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

fn traffic_suite(map: &HdMap) -> Outcome {
    let start = Instant::now();
    let graph = map.lane_graph();
    let cfg = SimConfig {
        n_vehicles: 20,
        n_frames: 100,
        seed: 7,
        ..SimConfig::default()
    };
    let scenario = simulate(&graph, map.pixel_scale, &cfg).map_err(|e| e.to_string())?;
    let replay = simulate(&graph, map.pixel_scale, &cfg).map_err(|e| e.to_string())?;
    let bytes_equal = scenario.to_json().ok() == replay.to_json().ok();
    let reloaded = TrafficScenario::from_json(&scenario.to_json().map_err(|e| e.to_string())?).ok() == Some(scenario.clone());
    let car = cfg.dims_m[0];
    let mut worst_lateral = 0.0f64;
    let mut min_gap = f64::INFINITY;
    let mut on_lane = 0usize;
    for frame in &scenario.frames {
        for v in frame {
            let Some(lane) = v.lane_id else { continue };
            on_lane += 1;
            let pts = &graph.lanes[lane].points;
            let d = pts
                .windows(2)
                .map(|s| point_segment_distance([v.center[0], v.center[1]], s[0], s[1]))
                .fold(f64::INFINITY, f64::min);
            worst_lateral = worst_lateral.max(d * map.pixel_scale);
        }
        for (i, a) in frame.iter().enumerate() {
            for b in &frame[i + 1..] {
                if a.lane_id.is_some() && a.lane_id == b.lane_id {
                    min_gap = min_gap.min((a.arc_pos - b.arc_pos).abs() - car);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        scenario.n_frames() == 100
            && scenario.frames.iter().all(|f| f.len() == 20)
            && worst_lateral <= 0.3
            && min_gap >= car
            && bytes_equal
            && reloaded
            && secs < 10.0,
        format!(
            "lateral {worst_lateral:.3} m over {on_lane} on-lane states, min same-lane gap {min_gap:.6} m (car {car} m), replay identical {bytes_equal}, JSON reload exact {reloaded}, {secs:.2} s"
        ),
    )
}

fn random_layer(rng: &mut ChaCha8Rng, n: usize, id: u32, covered: impl Fn(usize) -> bool) -> RenderBuffers {
    let mut b = RenderBuffers::empty(n, 1, [0.0; 3]);
    for i in 0..n {
        if covered(i) {
            b.alpha[i] = rng.random_range(0.55..1.0);
            b.transmittance[i] = 1.0 - b.alpha[i];
            b.depth[i] = rng.random_range(1.0..100.0);
            b.color[i] = [rng.random(), rng.random(), rng.random()];
            b.semantic[i] = SemanticClass::Road;
            b.instance[i] = id;
        }
    }
    b
}

fn compositor_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 100_000;
    // Disjoint masks jointly covering the frame.
    let owner: Vec<usize> = (0..n).map(|_| rng.random_range(0..5)).collect();
    let layers: Vec<RenderBuffers> = (0..5).map(|k| random_layer(&mut rng, n, k as u32, |i| owner[i] == k)).collect();
    let stack = LayerStack {
        background: layers[0].clone(),
        buildings: layers[1..3].to_vec(),
        vehicles: layers[3..].to_vec(),
    };
    let out = compose(&stack, [0.3; 3], Exec::Parallel).map_err(|e| e.to_string())?;
    let mut literal_mismatch = 0;
    for i in 0..n {
        let mut sum = [0.0; 3];
        for l in &layers {
            let m = if l.alpha[i] > 0.5 { 1.0 } else { 0.0 };
            for k in 0..3 {
                sum[k] += m * l.color[i][k];
            }
        }
        literal_mismatch += usize::from(sum != out.color[i]);
    }
    // Overlapping masks: nearest depth wins, ties by layer priority.
    let layers: Vec<RenderBuffers> = (0..6)
        .map(|k| {
            let p = rng.random_range(0.2..0.8);
            let mut l = random_layer(&mut rng, n, 10 + k as u32, |_| true);
            for i in 0..n {
                if rng.random::<f64>() > p {
                    l.alpha[i] = 0.1;
                }
                if rng.random::<f64>() < 0.05 {
                    l.depth[i] = 50.0;
                }
            }
            l
        })
        .collect();
    let priority = [0, 1, 1, 2, 2, 2];
    let stack = LayerStack {
        background: layers[0].clone(),
        buildings: layers[1..3].to_vec(),
        vehicles: layers[3..].to_vec(),
    };
    let out = compose(&stack, [0.3; 3], Exec::Parallel).map_err(|e| e.to_string())?;
    let mut oracle_mismatch = 0;
    for i in 0..n {
        let mut best: Option<usize> = None;
        for (k, l) in layers.iter().enumerate() {
            if l.alpha[i] <= 0.5 {
                continue;
            }
            best = match best {
                None => Some(k),
                Some(b) => {
                    let (dk, db) = (l.depth[i], layers[b].depth[i]);
                    let better = if (dk - db).abs() > DEPTH_TIE {
                        dk < db
                    } else {
                        priority[k] > priority[b] || (priority[k] == priority[b] && l.instance[i] < layers[b].instance[i])
                    };
                    Some(if better { k } else { b })
                }
            };
        }
        let want = best.map_or([0.3; 3], |k| layers[k].color[i]);
        oracle_mismatch += usize::from(want != out.color[i]);
    }
    check(
        literal_mismatch == 0 && oracle_mismatch == 0,
        format!("literal-sum mismatches {literal_mismatch}/{n}; depth-oracle mismatches {oracle_mismatch}/{n}"),
    )
}

fn frame_bytes(colors: &[[f64; 3]]) -> Vec<u8> {
    to_rgb8(colors)
}

struct PerfResult {
    outcome: Outcome,
    buffers: Vec<RenderBuffers>,
}

fn performance(layout: &CityLayout, map: &HdMap) -> PerfResult {
    let run = || -> Result<(String, bool, Vec<RenderBuffers>), String> {
        let instances = instantiate_buildings(&layout.semantic);
        let cfg = SimConfig {
            n_vehicles: 5,
            n_frames: 60,
            seed: 1,
            ..SimConfig::default()
        };
        let scenario = simulate(&map.lane_graph(), map.pixel_scale, &cfg).map_err(|e| e.to_string())?;
        let shading = ShadingConfig::default();
        let profile = RenderProfile::GOOGLE_EARTH;
        let camera = orbit_camera(layout, 200.0, 140.0, 0, 1, 420.0, 480, 270).map_err(|e| e.to_string())?;

        let t0 = Instant::now();
        let scene = PreparedScene::new(layout, &instances, &profile, &shading, Exec::Sequential).map_err(|e| e.to_string())?;
        let single = scene.render_frame(&scenario.frames[0], &camera, Exec::Sequential).map_err(|e| e.to_string())?;
        let single_secs = t0.elapsed().as_secs_f64();
        let again = PreparedScene::new(layout, &instances, &profile, &shading, Exec::Parallel)
            .and_then(|s| s.render_frame(&scenario.frames[0], &camera, Exec::Parallel))
            .map_err(|e| e.to_string())?;
        let identical = frame_bytes(&single.lit) == frame_bytes(&again.lit) && single == again;

        let t1 = Instant::now();
        let scene = PreparedScene::new(layout, &instances, &profile, &shading, Exec::Parallel).map_err(|e| e.to_string())?;
        let mut buffers = vec![single.composed.clone()];
        buffers.extend(single.layers.layers().map(|(_, b)| b.clone()));
        let mut first_pass = Vec::new();
        for k in 0..60 {
            let cam = orbit_camera(layout, 200.0, 140.0, k, 60, 420.0, 480, 270).map_err(|e| e.to_string())?;
            let f = scene.render_frame(&scenario.frames[k], &cam, Exec::Parallel).map_err(|e| e.to_string())?;
            first_pass.push(frame_bytes(&f.lit));
            if k % 15 == 0 {
                buffers.extend(f.layers.layers().map(|(_, b)| b.clone()));
            }
        }
        let orbit_secs = t1.elapsed().as_secs_f64();
        let vehicles_in_view = single.layers.vehicles.len();
        let ok = single_secs < 2.0 && orbit_secs < 90.0 && identical && instances.count() == 10;
        Ok((
            format!(
                "single frame {single_secs:.2} s ({} buildings in the scene, {} and {vehicles_in_view} of 5 vehicles in view), 60-frame orbit {orbit_secs:.1} s on {} threads, byte-identical {identical}",
                instances.count(),
                single.layers.buildings.len(),
                rayon_threads()
            ),
            ok,
            buffers,
        ))
    };
    match run() {
        Ok((detail, ok, buffers)) => PerfResult {
            outcome: check(ok, detail),
            buffers,
        },
        Err(e) => PerfResult {
            outcome: Err(e),
            buffers: Vec::new(),
        },
    }
}

fn rayon_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    })
}

#[test]
fn acceptance() {
    let layout = sample_city(0);
    let map = HdMap::from_layout(&layout, &HdMapConfig::default(), Exec::Parallel);
    let instances = instantiate_buildings(&layout.semantic);
    let scene = PreparedScene::new(
        &layout,
        &instances,
        &RenderProfile::GOOGLE_EARTH,
        &ShadingConfig::default(),
        Exec::Parallel,
    )
    .expect("scene prepares");

    let mut results: Vec<(&str, Outcome)> = vec![
        ("volume oracle", guarded(volume_oracle)),
        ("mercator constants", guarded(mercator_constants)),
        ("osm height recipe", guarded(osm_height_recipe)),
        ("hash encoder", guarded(hash_encoder)),
        ("rotation and canonicalization", guarded(rotation_canonicalization)),
    ];
    let perf = catch_unwind(AssertUnwindSafe(|| performance(&layout, &map))).unwrap_or_else(|_| PerfResult {
        outcome: Err("panicked".into()),
        buffers: Vec::new(),
    });
    let rendered: Vec<&RenderBuffers> = perf.buffers.iter().collect();
    results.push((
        "rendering quadrature",
        if rendered.is_empty() {
            Err("no rendered frames to check".into())
        } else {
            guarded(|| rendering_quadrature(&rendered))
        },
    ));
    results.push(("multi-view consistency", guarded(|| multi_view(&scene, &layout))));
    results.push(("hd-map suite", guarded(|| hdmap_suite(&map))));
    results.push(("traffic suite", guarded(|| traffic_suite(&map))));
    results.push(("compositor", guarded(compositor_suite)));
    results.push(("performance", perf.outcome));

    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}

#[test]
fn camera_file_round_trip() {
    let json = r#"{"fx":400,"fy":400,"cx":240,"cy":135,"w":480,"h":270,"position":[0,0,50],"look_at":[10,10,0]}"#;
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cam.json");
    std::fs::write(&p, json).unwrap();
    let cam = Camera::load(&p).unwrap();
    assert_eq!((cam.width, cam.height), (480, 270));
    let (u, v, _) = cam.project([10.0, 10.0, 0.0]).unwrap();
    assert!((u - 240.0).abs() < 1e-9 && (v - 135.0).abs() < 1e-9);
}
