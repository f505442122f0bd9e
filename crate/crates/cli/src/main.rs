//! `cityforge`: ingest geodata, derive HD maps and traffic, and render
//! composited city frames from the command line.

mod config;
mod error;
mod manifest;
mod stages;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cityforge::Exec;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::stages::*;

#[derive(Parser, Debug)]
#[command(name = "cityforge", version, about = "Procedural 4D city pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Manifest to record checksums in; completed stages with matching
    /// checksums are skipped.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Cap on worker threads (1 runs everything sequentially).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Rerun stages even when the manifest says they are current.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rasterize tagged geodata into a layout triplet.
    Ingest {
        #[arg(long)]
        features: PathBuf,
        /// lon0,lat0,lon1,lat1 in degrees.
        #[arg(long, value_parser = parse_list::<4>, allow_hyphen_values = true)]
        bbox: [f64; 4],
        #[arg(long, default_value_t = 18)]
        zoom: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output basename; writes <out>.sem.png, .hbu.png, .htd.png.
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive the HD map of a layout.
    Hdmap {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate traffic on an HD map.
    Simulate {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        vehicles: usize,
        #[arg(long)]
        frames: usize,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render one frame with all of its layers.
    Render {
        #[command(flatten)]
        scene: SceneOpts,
        /// Camera JSON; the first orbit position when omitted.
        #[arg(long)]
        camera: Option<PathBuf>,
        #[command(flatten)]
        view: ViewOpts,
        /// Scenario frame to render (needs --scenario).
        #[arg(long)]
        frame: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge the layers of a render directory.
    Compose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render frames on a circle around the layout center.
    Orbit {
        #[command(flatten)]
        scene: SceneOpts,
        /// Orbit radius in cells.
        #[arg(long)]
        radius: f64,
        /// Camera height in cells.
        #[arg(long)]
        height: f64,
        #[arg(long)]
        frames: usize,
        #[arg(long, default_value_t = 960)]
        width: usize,
        #[arg(long, default_value_t = 540)]
        image_height: usize,
        #[arg(long)]
        fx: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the hash-grid and periodic encodings of a point as JSON.
    Encode {
        /// x,y,z of the probe point.
        #[arg(long, value_parser = parse_list::<3>, allow_hyphen_values = true)]
        probe: [f64; 3],
        /// Scene feature values, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        feature: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edit one building or vehicle; re-render afterwards to see it.
    #[command(subcommand)]
    Edit(EditCommand),
    /// Run the pipeline described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed of every stage without its own (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated stages to run (overrides the config).
        #[arg(long, value_delimiter = ',')]
        stages: Option<Vec<String>>,
    },
}

#[derive(Subcommand, Debug)]
enum EditCommand {
    /// Translate and turn one vehicle of a scenario.
    MoveVehicle {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        vehicle: usize,
        /// Offset along x in cells.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        dx: f64,
        /// Offset along y in cells.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        dy: f64,
        /// Yaw change in degrees.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        dyaw: f64,
        /// Only this frame (all frames when omitted).
        #[arg(long)]
        frame: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assign a style seed to one building or vehicle.
    SetStyle {
        /// Style file to update; created when missing.
        #[arg(long)]
        styles: PathBuf,
        #[arg(long)]
        building: Option<u32>,
        #[arg(long)]
        vehicle: Option<usize>,
        #[arg(long)]
        seed: u64,
        /// Where to write the result (defaults to --styles).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Change the roof height of one building.
    SetHeight {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        building: u32,
        /// New roof height above ground, meters.
        #[arg(long)]
        height_m: f64,
        /// Output basename of the edited layout.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
struct SceneOpts {
    #[arg(long)]
    layout: PathBuf,
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Style seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Window sizes: google-earth or citytopia.
    #[arg(long, default_value = "google-earth")]
    profile: String,
    /// Per-instance style overrides written by `edit set-style`.
    #[arg(long)]
    styles: Option<PathBuf>,
}

impl From<SceneOpts> for SceneArgs {
    fn from(o: SceneOpts) -> Self {
        SceneArgs {
            layout: o.layout,
            scenario: o.scenario,
            seed: o.seed,
            profile: o.profile,
            styles: o.styles,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct ViewOpts {
    #[arg(long, default_value_t = 960)]
    width: usize,
    #[arg(long = "image-height", default_value_t = 540)]
    image_height: usize,
    #[arg(long)]
    fx: Option<f64>,
    /// Default-camera orbit radius in cells.
    #[arg(long)]
    radius: Option<f64>,
    /// Default-camera height in cells.
    #[arg(long)]
    elevation: Option<f64>,
}

fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<_, _>>()?;
    vals.try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn setup_threads(threads: Option<usize>) -> CliResult<Exec> {
    match threads {
        Some(0) => Err(CliError::config("--threads must be at least 1")),
        Some(1) => Ok(Exec::Sequential),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(_n)
                .build_global()
                .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
            Ok(Exec::Parallel)
        }
        None => Ok(Exec::Parallel),
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let exec = setup_threads(cli.common.threads)?;
    let common = cli.common;
    if let Command::Run {
        config,
        out,
        seed,
        stages,
    } = cli.command
    {
        return run_config(&config, out, seed, stages, &common, exec);
    }
    let mut ctx = Ctx::new(exec, common.manifest.as_deref(), common.force)?;
    match cli.command {
        Command::Ingest {
            features,
            bbox,
            zoom,
            seed,
            out,
        } => ingest(
            &mut ctx,
            &IngestArgs {
                features,
                bbox,
                zoom,
                seed,
                out,
            },
        ),
        Command::Hdmap { layout, out } => hdmap(&mut ctx, &layout, &out),
        Command::Simulate {
            map,
            vehicles,
            frames,
            dt,
            seed,
            out,
        } => simulate(
            &mut ctx,
            &SimulateArgs {
                map,
                vehicles,
                frames,
                dt,
                seed,
                out,
            },
        ),
        Command::Render {
            scene,
            camera,
            view,
            frame,
            out,
        } => render(
            &mut ctx,
            &RenderArgs {
                scene: scene.into(),
                camera,
                view: ViewArgs {
                    width: view.width,
                    height: view.image_height,
                    fx: view.fx,
                    radius: view.radius,
                    elevation: view.elevation,
                },
                frame,
                out,
            },
        ),
        Command::Compose { input, out } => compose_dir(&mut ctx, &input, &out),
        Command::Orbit {
            scene,
            radius,
            height,
            frames,
            width,
            image_height,
            fx,
            out,
        } => orbit(
            &mut ctx,
            &OrbitArgs {
                scene: scene.into(),
                view: ViewArgs {
                    width,
                    height: image_height,
                    fx,
                    radius: Some(radius),
                    elevation: Some(height),
                },
                frames,
                out,
            },
        ),
        Command::Encode {
            probe,
            feature,
            seed,
            out,
        } => encode(
            &mut ctx,
            &EncodeArgs {
                probe,
                feature,
                seed,
                out,
            },
        ),
        Command::Edit(edit) => match edit {
            EditCommand::MoveVehicle {
                scenario,
                vehicle,
                dx,
                dy,
                dyaw,
                frame,
                out,
            } => edit_move_vehicle(
                &mut ctx,
                &MoveVehicleArgs {
                    scenario,
                    vehicle,
                    dx,
                    dy,
                    dyaw,
                    frame,
                    out,
                },
            ),
            EditCommand::SetStyle {
                styles,
                building,
                vehicle,
                seed,
                out,
            } => {
                let out = out.unwrap_or_else(|| styles.clone());
                edit_set_style(
                    &mut ctx,
                    &SetStyleArgs {
                        styles,
                        building,
                        vehicle,
                        seed,
                        out,
                    },
                )
            }
            EditCommand::SetHeight {
                layout,
                building,
                height_m,
                out,
            } => edit_set_height(&mut ctx, &layout, building, height_m, &out),
        },
        Command::Run { .. } => unreachable!("handled above"),
    }
}

/// Runs the configured stages in order. Artifacts go to fixed names in the
/// output directory and the manifest defaults to `<out>/manifest.json`.
fn run_config(
    config: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
    stages: Option<Vec<String>>,
    common: &Common,
    exec: Exec,
) -> CliResult<()> {
    let mut cfg = RunConfig::load(config)?;
    if out.is_some() {
        cfg.out = out;
    }
    if seed.is_some() {
        cfg.seed = seed;
    }
    if stages.is_some() {
        cfg.stages = stages;
    }
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("cityforge-out"));
    std::fs::create_dir_all(&out)?;
    let manifest = common.manifest.clone().unwrap_or_else(|| out.join("manifest.json"));
    let mut ctx = Ctx::new(exec, Some(&manifest), common.force)?;

    let layout = out.join("layout");
    let map = out.join("map.json");
    let scenario = out.join("scenario.json");
    let render_dir = out.join("render");
    let selected = cfg.selected_stages()?;
    let style_seed = cfg.seed_or(cfg.render.seed);
    let scene = |scenario_path: Option<PathBuf>| SceneArgs {
        layout: layout.clone(),
        scenario: scenario_path,
        seed: style_seed,
        profile: cfg.render.profile.clone().unwrap_or_else(|| "google-earth".into()),
        styles: cfg.render.styles.clone(),
    };
    let has_scenario = selected.contains(&"simulate") || scenario.exists();
    let scenario_arg = has_scenario.then(|| scenario.clone());

    for stage in selected {
        match stage {
            "ingest" => {
                let s = &cfg.ingest;
                let features = s
                    .features
                    .clone()
                    .ok_or_else(|| CliError::config("[ingest] needs `features`"))?;
                let bbox = s.bbox.ok_or_else(|| CliError::config("[ingest] needs `bbox`"))?;
                ingest(
                    &mut ctx,
                    &IngestArgs {
                        features,
                        bbox,
                        zoom: s.zoom.unwrap_or(18),
                        seed: cfg.seed_or(s.seed),
                        out: layout.clone(),
                    },
                )?;
            }
            "hdmap" => hdmap(&mut ctx, &layout, &map)?,
            "simulate" => {
                let s = &cfg.simulate;
                simulate(
                    &mut ctx,
                    &SimulateArgs {
                        map: map.clone(),
                        vehicles: s.vehicles.unwrap_or(20),
                        frames: s.frames.unwrap_or(100),
                        dt: s.dt.unwrap_or(0.1),
                        seed: cfg.seed_or(s.seed),
                        out: scenario.clone(),
                    },
                )?;
            }
            "render" => {
                let r = &cfg.render;
                render(
                    &mut ctx,
                    &RenderArgs {
                        scene: scene(scenario_arg.clone()),
                        camera: r.camera.clone(),
                        view: ViewArgs {
                            width: r.width.unwrap_or(960),
                            height: r.height.unwrap_or(540),
                            fx: r.fx,
                            radius: r.radius,
                            elevation: r.elevation,
                        },
                        frame: r.frame,
                        out: render_dir.clone(),
                    },
                )?;
            }
            "compose" => compose_dir(&mut ctx, &render_dir, &out.join("composed.png"))?,
            "orbit" => {
                let o = &cfg.orbit;
                orbit(
                    &mut ctx,
                    &OrbitArgs {
                        scene: scene(scenario_arg.clone()),
                        view: ViewArgs {
                            width: o.width.unwrap_or(960),
                            height: o.height.unwrap_or(540),
                            fx: o.fx,
                            radius: o.radius,
                            elevation: o.elevation,
                        },
                        frames: o.frames.unwrap_or(60),
                        out: out.join("orbit"),
                    },
                )?;
            }
            other => unreachable!("unknown stage {other}"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.exit_code())
        }
    }
}
