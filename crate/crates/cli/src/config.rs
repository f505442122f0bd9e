//! TOML run configuration: top-level defaults plus one flat table per
//! stage. Relative paths are resolved against the config file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const STAGE_ORDER: [&str; 6] = ["ingest", "hdmap", "simulate", "render", "compose", "orbit"];

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Fallback seed of every stochastic stage.
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub stages: Option<Vec<String>>,
    #[serde(default)]
    pub ingest: IngestSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub render: RenderSection,
    #[serde(default)]
    pub orbit: OrbitSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestSection {
    pub features: Option<PathBuf>,
    pub bbox: Option<[f64; 4]>,
    pub zoom: Option<u32>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub vehicles: Option<usize>,
    pub frames: Option<usize>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderSection {
    pub frame: Option<usize>,
    pub camera: Option<PathBuf>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub fx: Option<f64>,
    pub radius: Option<f64>,
    pub elevation: Option<f64>,
    pub profile: Option<String>,
    pub styles: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    pub frames: Option<usize>,
    pub radius: Option<f64>,
    pub elevation: Option<f64>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub fx: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::config(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(v) = p.as_mut() {
                if v.is_relative() {
                    *v = base.join(&*v);
                }
            }
        };
        fix(&mut cfg.out);
        fix(&mut cfg.ingest.features);
        fix(&mut cfg.render.camera);
        fix(&mut cfg.render.styles);
        Ok(cfg)
    }

    /// Stages to run, in pipeline order. Without an explicit list every
    /// stage runs except the orbit, which runs when it has frames.
    pub fn selected_stages(&self) -> CliResult<Vec<&'static str>> {
        match &self.stages {
            Some(list) => {
                for s in list {
                    if !STAGE_ORDER.contains(&s.as_str()) {
                        return Err(CliError::config(format!(
                            "unknown stage `{s}`; expected one of {}",
                            STAGE_ORDER.join(", ")
                        )));
                    }
                }
                Ok(STAGE_ORDER.iter().copied().filter(|s| list.iter().any(|l| l == s)).collect())
            }
            None => Ok(STAGE_ORDER
                .iter()
                .copied()
                .filter(|&s| s != "orbit" || self.orbit.frames.unwrap_or(0) > 0)
                .collect()),
        }
    }

    pub fn seed_or(&self, stage_seed: Option<u64>) -> u64 {
        stage_seed.or(self.seed).unwrap_or(0)
    }
}
