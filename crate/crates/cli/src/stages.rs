//! Pipeline stages. Each stage checks its inputs, consults the manifest
//! (when one is in use) and writes its outputs atomically.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cityforge::compositor::{compose, LayerStack};
use cityforge::encoders::{hash_feature, hash_index, sincos_encode, FeatureTable, HashGridConfig, SINCOS_LEVELS};
use cityforge::hdmap::{HdMap, HdMapConfig};
use cityforge::layout::{instantiate_buildings, io as layout_io, CityLayout};
use cityforge::osm::{load_features, meters_to_cells, rasterize, MercatorGrid, PerlinField, ZOOM18_METERS_PER_PIXEL};
use cityforge::render::io::{read_layers, write_layers, write_rgb};
use cityforge::render::{
    orbit_camera, Camera, PreparedScene, RenderBuffers, RenderProfile, SceneStyles, ShadingConfig, VEHICLE_INSTANCE_BASE,
};
use cityforge::traffic::{simulate as run_simulation, SimConfig, TrafficScenario, VehicleState};
use cityforge::{png_io, Exec};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{require, CliError, CliResult};
use crate::manifest::{input_key, sha256_bytes, sha256_file, ManifestFile, StageRecord};

/// Shared state of one invocation.
pub struct Ctx {
    pub exec: Exec,
    pub manifest: Option<ManifestFile>,
    pub force: bool,
}

impl Ctx {
    pub fn new(exec: Exec, manifest: Option<&Path>, force: bool) -> CliResult<Self> {
        Ok(Self {
            exec,
            manifest: manifest.map(ManifestFile::open).transpose()?,
            force,
        })
    }

    /// Runs `body` unless the manifest shows the stage already completed
    /// with the same settings, inputs and targets. Returns whether it ran.
    fn stage(
        &mut self,
        name: &str,
        settings: Value,
        seeds: &[(&str, u64)],
        inputs: &[PathBuf],
        targets: &[&Path],
        body: impl FnOnce(Exec) -> CliResult<Vec<PathBuf>>,
    ) -> CliResult<bool> {
        let Some(manifest) = self.manifest.as_ref() else {
            body(self.exec)?;
            return Ok(true);
        };
        let mut input_sums = BTreeMap::new();
        for p in inputs {
            input_sums.insert(input_key(p), sha256_file(p)?);
        }
        let seeds: BTreeMap<String, u64> = seeds.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let targets: Vec<String> = targets.iter().map(|p| manifest.output_key(p)).collect();
        let fingerprint = json!({
            "stage": name,
            "settings": settings,
            "seeds": seeds,
            "inputs": input_sums,
            "targets": targets,
        });
        let config_hash = sha256_bytes(fingerprint.to_string().as_bytes());
        if !self.force && manifest.is_current(name, &config_hash) {
            eprintln!("{name}: up to date");
            return Ok(false);
        }
        let outputs = body(self.exec)?;
        let manifest = self.manifest.as_mut().expect("manifest checked above");
        let mut output_sums = BTreeMap::new();
        for p in &outputs {
            output_sums.insert(manifest.output_key(p), sha256_file(p)?);
        }
        manifest.record(
            name,
            StageRecord {
                config_hash,
                seeds,
                inputs: input_sums,
                outputs: output_sums,
            },
        );
        manifest.save()?;
        Ok(true)
    }
}

fn create_parent(p: &Path) -> CliResult<()> {
    if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(())
}

/// Every regular file below `dir`, sorted by path.
fn files_below(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Georeferencing written next to an ingested layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutMeta {
    pub pixel_scale: f64,
    pub zoom: u32,
    pub origin_px: (i64, i64),
    pub seed: u64,
}

pub fn meta_path(base: &Path) -> PathBuf {
    PathBuf::from(format!("{}.meta.json", base.display()))
}

fn layout_files(base: &Path) -> Vec<PathBuf> {
    let mut files = layout_io::triplet_paths(base).to_vec();
    let meta = meta_path(base);
    if meta.exists() {
        files.push(meta);
    }
    files
}

/// Loads a layout triplet. The pixel scale comes from the sidecar written
/// by `ingest`, or the zoom-18 scale when there is none.
pub fn load_layout(base: &Path) -> CliResult<CityLayout> {
    for p in layout_io::triplet_paths(base) {
        require(&p, "layout file", "ingest")?;
    }
    let meta = meta_path(base);
    let pixel_scale = if meta.exists() {
        let m: LayoutMeta = serde_json::from_slice(&std::fs::read(&meta)?)
            .map_err(|e| CliError::data(format!("{}: {e}", meta.display())))?;
        m.pixel_scale
    } else {
        ZOOM18_METERS_PER_PIXEL
    };
    Ok(layout_io::load_layout(base, pixel_scale)?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::data(e.to_string()))?;
    bytes.push(b'\n');
    create_parent(path)?;
    png_io::write_atomic(path, &bytes)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct IngestArgs {
    pub features: PathBuf,
    pub bbox: [f64; 4],
    pub zoom: u32,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn ingest(ctx: &mut Ctx, a: &IngestArgs) -> CliResult<()> {
    if !a.features.is_file() {
        return Err(CliError::dependency(format!("missing features file {}", a.features.display())));
    }
    let [b0, b1, b2, b3] = a.bbox;
    let grid = MercatorGrid::from_bbox(b0, b1, b2, b3, a.zoom).map_err(|e| CliError::config(format!("bbox: {e}")))?;
    let triplet = layout_io::triplet_paths(&a.out);
    let meta = meta_path(&a.out);
    let targets: Vec<&Path> = triplet.iter().map(PathBuf::as_path).chain([meta.as_path()]).collect();
    ctx.stage(
        "ingest",
        json!({ "bbox": a.bbox, "zoom": a.zoom }),
        &[("layout", a.seed)],
        std::slice::from_ref(&a.features),
        &targets,
        |_| {
            let features = load_features(&a.features)?;
            let layout = rasterize(&features, &grid, &PerlinField::greenery(a.seed))?;
            create_parent(&a.out)?;
            let mut written = layout_io::save_layout(&layout, &a.out)?.to_vec();
            let m = LayoutMeta {
                pixel_scale: layout.pixel_scale(),
                zoom: a.zoom,
                origin_px: grid.origin_px,
                seed: a.seed,
            };
            write_json(&meta, &m)?;
            written.push(meta.clone());
            eprintln!("ingest: {} features -> {}x{} layout", features.len(), layout.width(), layout.height());
            Ok(written)
        },
    )?;
    Ok(())
}

pub fn hdmap(ctx: &mut Ctx, layout: &Path, out: &Path) -> CliResult<()> {
    let layout_in = load_layout(layout)?;
    ctx.stage("hdmap", json!({}), &[], &layout_files(layout), &[out], |exec| {
        let map = HdMap::from_layout(&layout_in, &HdMapConfig::default(), exec);
        create_parent(out)?;
        map.save(out)?;
        eprintln!(
            "hdmap: {} lanes, {} connectors, {} signals",
            map.lanes.len(),
            map.connectors.len(),
            map.signals.len()
        );
        Ok(vec![out.to_path_buf()])
    })?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub map: PathBuf,
    pub vehicles: usize,
    pub frames: usize,
    pub dt: f64,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn simulate(ctx: &mut Ctx, a: &SimulateArgs) -> CliResult<()> {
    require(&a.map, "HD map", "hdmap")?;
    let map = HdMap::load(&a.map)?;
    let cfg = SimConfig {
        n_vehicles: a.vehicles,
        n_frames: a.frames,
        dt: a.dt,
        seed: a.seed,
        ..SimConfig::default()
    };
    ctx.stage(
        "simulate",
        json!({ "vehicles": a.vehicles, "frames": a.frames, "dt": a.dt }),
        &[("traffic", a.seed)],
        std::slice::from_ref(&a.map),
        &[&a.out],
        |_| {
            let scenario = run_simulation(&map.lane_graph(), map.pixel_scale, &cfg)?;
            create_parent(&a.out)?;
            scenario.save(&a.out)?;
            eprintln!("simulate: {} vehicles over {} frames", a.vehicles, scenario.n_frames());
            Ok(vec![a.out.clone()])
        },
    )?;
    Ok(())
}

/// Camera used when no camera file is given: the first orbit position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViewArgs {
    pub width: usize,
    pub height: usize,
    /// Focal length in pixels; defaults to 0.8 × width.
    pub fx: Option<f64>,
    /// Orbit radius in cells; defaults to 0.75 × the larger layout side.
    pub radius: Option<f64>,
    /// Camera height in cells; defaults to 0.6 × the larger layout side.
    pub elevation: Option<f64>,
}

impl Default for ViewArgs {
    fn default() -> Self {
        Self {
            width: 960,
            height: 540,
            fx: None,
            radius: None,
            elevation: None,
        }
    }
}

impl ViewArgs {
    fn focal(&self) -> f64 {
        self.fx.unwrap_or(0.8 * self.width as f64)
    }

    fn orbit(&self, layout: &CityLayout, k: usize, n: usize) -> CliResult<Camera> {
        let side = layout.width().max(layout.height()) as f64;
        let radius = self.radius.unwrap_or(0.75 * side);
        let elevation = self.elevation.unwrap_or(0.6 * side);
        Ok(orbit_camera(layout, radius, elevation, k, n, self.focal(), self.width, self.height)?)
    }
}

#[derive(Debug, Clone)]
pub struct SceneArgs {
    pub layout: PathBuf,
    pub scenario: Option<PathBuf>,
    pub seed: u64,
    pub profile: String,
    pub styles: Option<PathBuf>,
}

struct LoadedScene {
    layout: CityLayout,
    scenario: Option<TrafficScenario>,
    profile: RenderProfile,
    shading: ShadingConfig,
    styles: SceneStyles,
    inputs: Vec<PathBuf>,
}

impl LoadedScene {
    fn load(a: &SceneArgs) -> CliResult<Self> {
        let profile = RenderProfile::by_name(&a.profile)
            .ok_or_else(|| CliError::config(format!("unknown render profile `{}`", a.profile)))?;
        let layout = load_layout(&a.layout)?;
        let mut inputs = layout_files(&a.layout);
        let scenario = match &a.scenario {
            Some(p) => {
                require(p, "traffic scenario", "simulate")?;
                inputs.push(p.clone());
                Some(TrafficScenario::load(p)?)
            }
            None => None,
        };
        let styles = match &a.styles {
            Some(p) => {
                require(p, "style file", "edit set-style")?;
                inputs.push(p.clone());
                SceneStyles::load(p)?
            }
            None => SceneStyles::default(),
        };
        Ok(Self {
            layout,
            scenario,
            profile,
            shading: ShadingConfig::default().with_seed(a.seed),
            styles,
            inputs,
        })
    }

    fn prepare(&self, exec: Exec) -> CliResult<PreparedScene<'_>> {
        let instances = instantiate_buildings(&self.layout.semantic);
        Ok(PreparedScene::with_styles(
            &self.layout,
            &instances,
            &self.profile,
            &self.shading,
            self.styles.clone(),
            exec,
        )?)
    }

    fn vehicles(&self, frame: usize) -> &[VehicleState] {
        match &self.scenario {
            Some(s) if !s.frames.is_empty() => &s.frames[frame % s.frames.len()],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone)]
pub struct RenderArgs {
    pub scene: SceneArgs,
    pub camera: Option<PathBuf>,
    pub view: ViewArgs,
    pub frame: Option<usize>,
    pub out: PathBuf,
}

fn layer_instance(b: &RenderBuffers) -> u32 {
    (0..b.len()).find(|&i| b.mask(i)).map_or(0, |i| b.instance[i])
}

pub fn render(ctx: &mut Ctx, a: &RenderArgs) -> CliResult<()> {
    if a.frame.is_some() && a.scene.scenario.is_none() {
        return Err(CliError::dependency(
            "rendering a frame needs a traffic scenario (--scenario); run `cityforge simulate` first",
        ));
    }
    let scene = LoadedScene::load(&a.scene)?;
    let frame = a.frame.unwrap_or(0);
    if let Some(s) = &scene.scenario {
        if frame >= s.n_frames() {
            return Err(CliError::config(format!(
                "frame {frame} is outside the scenario's {} frames",
                s.n_frames()
            )));
        }
    }
    let mut inputs = scene.inputs.clone();
    let camera = match &a.camera {
        Some(p) => {
            if !p.is_file() {
                return Err(CliError::dependency(format!("missing camera file {}", p.display())));
            }
            inputs.push(p.clone());
            Camera::load(p).map_err(|e| match e {
                cityforge::Error::Invalid(m) => CliError::config(format!("camera {}: {m}", p.display())),
                other => other.into(),
            })?
        }
        None => a.view.orbit(&scene.layout, 0, 1)?,
    };
    let settings = json!({
        "frame": frame,
        "profile": a.scene.profile,
        "view": if a.camera.is_some() { Value::Null } else { json!(a.view) },
    });
    ctx.stage("render", settings, &[("style", a.scene.seed)], &inputs, &[&a.out], |exec| {
        let prepared = scene.prepare(exec)?;
        let f = prepared.render_frame(scene.vehicles(frame), &camera, exec)?;
        std::fs::create_dir_all(&a.out)?;
        let mut top = f.composed.clone();
        top.color = f.lit.clone();
        let mut written = write_layers(&top, &a.out)?;
        let layers_dir = a.out.join("layers");
        if layers_dir.exists() {
            std::fs::remove_dir_all(&layers_dir)?;
        }
        let mut named = vec![("background".to_string(), &f.layers.background)];
        for b in &f.layers.buildings {
            named.push((format!("building_{:05}", layer_instance(b)), b));
        }
        for v in &f.layers.vehicles {
            let id = layer_instance(v).saturating_sub(VEHICLE_INSTANCE_BASE);
            named.push((format!("vehicle_{id:05}"), v));
        }
        for (name, b) in named {
            let dir = layers_dir.join(name);
            std::fs::create_dir_all(&dir)?;
            written.extend(write_layers(b, &dir)?);
        }
        eprintln!(
            "render: {} buildings and {} vehicles in view",
            f.layers.buildings.len(),
            f.layers.vehicles.len()
        );
        Ok(written)
    })?;
    Ok(())
}

/// Reads the layer directories written by `render`.
pub fn read_layer_stack(dir: &Path) -> CliResult<(LayerStack, Vec<PathBuf>)> {
    let layers_dir = dir.join("layers");
    require(&layers_dir, "layer directory", "render")?;
    let mut names: Vec<(String, PathBuf)> = std::fs::read_dir(&layers_dir)?
        .map(|e| e.map(|e| (e.file_name().to_string_lossy().into_owned(), e.path())))
        .collect::<Result<_, _>>()?;
    names.sort();
    let mut background = None;
    let (mut buildings, mut vehicles) = (Vec::new(), Vec::new());
    for (name, path) in names {
        let b = read_layers(&path)?;
        if name == "background" {
            background = Some(b);
        } else if name.starts_with("building_") {
            buildings.push(b);
        } else if name.starts_with("vehicle_") {
            vehicles.push(b);
        } else {
            return Err(CliError::data(format!("unexpected layer directory {}", path.display())));
        }
    }
    let background = background
        .ok_or_else(|| CliError::data(format!("{} has no background layer", layers_dir.display())))?;
    let inputs = files_below(&layers_dir)?;
    Ok((
        LayerStack {
            background,
            buildings,
            vehicles,
        },
        inputs,
    ))
}

pub fn compose_dir(ctx: &mut Ctx, input: &Path, out: &Path) -> CliResult<()> {
    let (stack, inputs) = read_layer_stack(input)?;
    ctx.stage("compose", json!({}), &[], &inputs, &[out], |exec| {
        let sky = ShadingConfig::default().sky;
        let composed = compose(&stack, sky, exec)?;
        create_parent(out)?;
        let (w, h) = composed.dims();
        write_rgb(out, w, h, &composed.color)?;
        Ok(vec![out.to_path_buf()])
    })?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct OrbitArgs {
    pub scene: SceneArgs,
    pub view: ViewArgs,
    pub frames: usize,
    pub out: PathBuf,
}

pub fn orbit(ctx: &mut Ctx, a: &OrbitArgs) -> CliResult<()> {
    if a.frames == 0 {
        return Err(CliError::config("an orbit needs at least one frame"));
    }
    let scene = LoadedScene::load(&a.scene)?;
    let settings = json!({ "frames": a.frames, "profile": a.scene.profile, "view": a.view });
    ctx.stage("orbit", settings, &[("style", a.scene.seed)], &scene.inputs, &[&a.out], |exec| {
        let prepared = scene.prepare(exec)?;
        std::fs::create_dir_all(&a.out)?;
        let mut written = Vec::with_capacity(a.frames);
        for k in 0..a.frames {
            let camera = a.view.orbit(&scene.layout, k, a.frames)?;
            let f = prepared.render_frame(scene.vehicles(k), &camera, exec)?;
            let p = a.out.join(format!("frame_{k:04}.png"));
            write_rgb(&p, camera.width, camera.height, &f.lit)?;
            written.push(p);
        }
        eprintln!("orbit: {} frames", a.frames);
        Ok(written)
    })?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct EncodeArgs {
    pub probe: [f64; 3],
    pub feature: Vec<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// Hash-grid and periodic encodings of one probe point.
pub fn encode_report(a: &EncodeArgs) -> CliResult<Value> {
    if a.feature.len() > 8 {
        return Err(CliError::config("at most 8 scene feature values are supported"));
    }
    let cfg = HashGridConfig::default();
    let table = FeatureTable::new(a.seed);
    let indices: Vec<usize> = (0..cfg.levels)
        .map(|level| {
            let res = cfg.resolution(level);
            let cell = a.probe.map(|c| (c * res).floor() as i64);
            let fq: Vec<i64> = a.feature.iter().map(|v| (v * res).floor() as i64).collect();
            hash_index(cell, &fq, &cfg)
        })
        .collect();
    Ok(json!({
        "probe": a.probe,
        "feature": a.feature,
        "seed": a.seed,
        "hash_grid": {
            "levels": cfg.levels,
            "entries": cfg.entries,
            "channels": cfg.channels,
            "primes": cfg.primes,
            "base_resolution": cfg.base_resolution,
            "per_level_scale": cfg.per_level_scale,
        },
        "hash_indices": indices,
        "hash_feature": hash_feature(a.probe, &a.feature, &table, &cfg),
        "sincos": sincos_encode(&a.probe, SINCOS_LEVELS),
    }))
}

pub fn encode(ctx: &mut Ctx, a: &EncodeArgs) -> CliResult<()> {
    let report = encode_report(a)?;
    match &a.out {
        Some(out) => {
            let settings = json!({ "probe": a.probe, "feature": a.feature });
            ctx.stage("encode", settings, &[("encoder", a.seed)], &[], &[out], |_| {
                write_json(out, &report)?;
                Ok(vec![out.clone()])
            })?;
        }
        None => {
            use std::io::Write;
            // A closed pipe downstream is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{report}");
        }
    }
    Ok(())
}

pub fn edit_set_height(ctx: &mut Ctx, layout: &Path, building: u32, height_m: f64, out: &Path) -> CliResult<()> {
    if !(height_m.is_finite() && height_m > 0.0) {
        return Err(CliError::config("building height must be positive"));
    }
    let mut l = load_layout(layout)?;
    let instances = instantiate_buildings(&l.semantic);
    if building == 0 || building > instances.count() {
        return Err(CliError::config(format!(
            "building {building} does not exist (layout has {})",
            instances.count()
        )));
    }
    let top = meters_to_cells(height_m, l.pixel_scale());
    let inputs = layout_files(layout);
    let triplet = layout_io::triplet_paths(out);
    let targets: Vec<&Path> = triplet.iter().map(PathBuf::as_path).collect();
    ctx.stage(
        "edit.set-height",
        json!({ "building": building, "height_m": height_m }),
        &[],
        &inputs,
        &targets,
        |_| {
            for y in 0..l.height() {
                for x in 0..l.width() {
                    if instances.id_at(x as i64, y as i64) == Some(building) {
                        let (class, bu, _) = l.column(x, y);
                        if top <= bu {
                            return Err(CliError::config(format!(
                                "height {height_m} m does not clear the building's base at ({x}, {y})"
                            )));
                        }
                        l.set_column(x, y, class, bu, top);
                    }
                }
            }
            create_parent(out)?;
            let mut written = layout_io::save_layout(&l, out)?.to_vec();
            let meta_in = meta_path(layout);
            if meta_in.exists() {
                let meta_out = meta_path(out);
                png_io::write_atomic(&meta_out, &std::fs::read(&meta_in)?)?;
                written.push(meta_out);
            }
            Ok(written)
        },
    )?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MoveVehicleArgs {
    pub scenario: PathBuf,
    pub vehicle: usize,
    /// Offsets in layout cells and degrees.
    pub dx: f64,
    pub dy: f64,
    pub dyaw: f64,
    /// Only this frame; all frames when `None`.
    pub frame: Option<usize>,
    pub out: PathBuf,
}

fn wrap_degrees(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

pub fn edit_move_vehicle(ctx: &mut Ctx, a: &MoveVehicleArgs) -> CliResult<()> {
    require(&a.scenario, "traffic scenario", "simulate")?;
    let mut scenario = TrafficScenario::load(&a.scenario)?;
    if let Some(f) = a.frame {
        if f >= scenario.n_frames() {
            return Err(CliError::config(format!("frame {f} is outside the scenario's {} frames", scenario.n_frames())));
        }
    }
    let exists = scenario.frames.iter().flatten().any(|v| v.id == a.vehicle);
    if !exists {
        return Err(CliError::config(format!("vehicle {} is not in the scenario", a.vehicle)));
    }
    let settings = json!({ "vehicle": a.vehicle, "dx": a.dx, "dy": a.dy, "dyaw": a.dyaw, "frame": a.frame });
    ctx.stage("edit.move-vehicle", settings, &[], std::slice::from_ref(&a.scenario), &[&a.out], |_| {
        for (t, frame) in scenario.frames.iter_mut().enumerate() {
            if a.frame.is_some_and(|f| f != t) {
                continue;
            }
            for v in frame.iter_mut().filter(|v| v.id == a.vehicle) {
                v.center[0] += a.dx;
                v.center[1] += a.dy;
                v.yaw = wrap_degrees(v.yaw + a.dyaw);
            }
        }
        create_parent(&a.out)?;
        scenario.save(&a.out)?;
        Ok(vec![a.out.clone()])
    })?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SetStyleArgs {
    /// Existing style file to start from; may be absent.
    pub styles: PathBuf,
    pub building: Option<u32>,
    pub vehicle: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn edit_set_style(ctx: &mut Ctx, a: &SetStyleArgs) -> CliResult<()> {
    let mut styles = if a.styles.exists() {
        SceneStyles::load(&a.styles)?
    } else {
        SceneStyles::default()
    };
    match (a.building, a.vehicle) {
        (Some(b), None) => {
            styles.buildings.insert(b, a.seed);
        }
        (None, Some(v)) => {
            styles.vehicles.insert(v, a.seed);
        }
        _ => return Err(CliError::config("give exactly one of --building or --vehicle")),
    }
    let inputs: Vec<PathBuf> = a.styles.exists().then(|| a.styles.clone()).into_iter().collect();
    let settings = json!({ "building": a.building, "vehicle": a.vehicle });
    ctx.stage("edit.set-style", settings, &[("style", a.seed)], &inputs, &[&a.out], |_| {
        create_parent(&a.out)?;
        styles.save(&a.out)?;
        Ok(vec![a.out.clone()])
    })?;
    Ok(())
}
