//! JSON scene configurations.

use crate::billiard::Wall;
use crate::dual::{Orientation, Vec4};
use crate::numeric::ode::Tolerances;
use crate::surface::{Chart, IntegratorConfig, LiouvilleMetric};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid config: {0}")]
    Schema(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub surface: SurfaceSpec,
    pub experiment: Experiment,
    #[serde(default)]
    pub tolerances: Option<TolSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SurfaceSpec {
    Liouville {
        a: String,
        b: String,
        chart: ChartSpec,
    },
    Epsilon {
        epsilon: f64,
        #[serde(default)]
        z_min: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub u: [f64; 2],
    pub v: [f64; 2],
    #[serde(default)]
    pub u_period: Option<f64>,
    #[serde(default)]
    pub v_period: Option<f64>,
}

impl ChartSpec {
    pub fn chart(&self) -> Result<Chart, ConfigError> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if !ok(self.u) || !ok(self.v) {
            return Err(ConfigError::Invalid("chart ranges must be finite with min < max".into()));
        }
        let mut c = Chart::rect((self.u[0], self.u[1]), (self.v[0], self.v[1]));
        if let Some(p) = self.u_period {
            if !(p > 0.0) {
                return Err(ConfigError::Invalid("u_period must be positive".into()));
            }
            c = c.with_u_period(p);
        }
        if let Some(p) = self.v_period {
            if !(p > 0.0) {
                return Err(ConfigError::Invalid("v_period must be positive".into()));
            }
            c = c.with_v_period(p);
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    Billiard {
        wall: Wall,
        #[serde(default)]
        start: Option<StartSpec>,
        #[serde(default)]
        bounces: Option<usize>,
    },
    WebCheck {
        #[serde(default)]
        web: WebKind,
        #[serde(default)]
        amplitude: f64,
        grid: GridConfig,
    },
    Poncelet(PonceletSpec),
    Caustics {
        wall: Wall,
        mu: Vec<f64>,
    },
    Render {
        input: String,
        artifact: ArtifactKind,
        #[serde(default)]
        embedding: Embedding,
        #[serde(default)]
        wall: Option<Wall>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSpec {
    /// Wall leaf value of the starting point.
    pub leaf: f64,
    /// Other coordinate of the starting point.
    pub along: f64,
    pub angle_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WebKind {
    #[default]
    Liouville,
    Perturbed,
    Control,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x: [f64; 2],
    pub y: [f64; 2],
    #[serde(default = "default_n")]
    pub nx: usize,
    #[serde(default = "default_n")]
    pub ny: usize,
}

fn default_n() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PonceletSpec {
    /// Plane of the caustic conic `c_I`.
    pub caustic: [f64; 4],
    /// Plane of the wall conic `c_w`.
    pub wall: [f64; 4],
    #[serde(default = "default_family")]
    pub family: i32,
    #[serde(default = "default_orientation")]
    pub orientation: Orientation,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub tune: Option<TuneSpec>,
}

fn default_family() -> i32 {
    1
}
fn default_orientation() -> Orientation {
    Orientation::Positive
}
fn default_starts() -> usize {
    10
}
fn default_steps() -> usize {
    500
}

/// Tunes the caustic along `caustic + d · direction`, `d ∈ bracket`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneSpec {
    pub direction: [f64; 4],
    pub bracket: [f64; 2],
    pub p: u32,
    pub q: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactKind {
    Billiard,
    Web,
    Poncelet,
}

/// Map from the chart to the picture plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Embedding {
    #[default]
    Chart,
    /// `x = cosh u cos v`, `y = sinh u sin v`.
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    pub rtol: f64,
    pub atol: f64,
    #[serde(default)]
    pub max_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Jsonl,
    Csv,
    Svg,
}

impl SceneConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => ConfigError::NotFound(path.display().to_string()),
            _ => ConfigError::Io { path: path.display().to_string(), message: e.to_string() },
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Semantic checks that do not need any numerics.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match &self.surface {
            SurfaceSpec::Liouville { chart, .. } => {
                chart.chart()?;
            }
            SurfaceSpec::Epsilon { epsilon, z_min } => {
                if *epsilon != 1.0 && *epsilon != -1.0 {
                    return Err(ConfigError::Invalid(format!("epsilon must be 1 or -1, got {epsilon}")));
                }
                if !(*z_min >= 0.0) {
                    return Err(ConfigError::Invalid("z_min must be nonnegative".into()));
                }
            }
        }
        let needs_liouville = !matches!(
            self.experiment,
            Experiment::Poncelet(_) | Experiment::Render { artifact: ArtifactKind::Poncelet, .. }
        );
        let is_liouville = matches!(self.surface, SurfaceSpec::Liouville { .. });
        if needs_liouville != is_liouville {
            return Err(ConfigError::Invalid(if needs_liouville {
                "this experiment needs a liouville surface".into()
            } else {
                "this experiment needs an epsilon surface".into()
            }));
        }
        if let Some(t) = &self.tolerances {
            if !(t.rtol > 0.0 && t.atol > 0.0) {
                return Err(ConfigError::Invalid("tolerances must be positive".into()));
            }
        }
        match &self.experiment {
            Experiment::WebCheck { grid, .. } => {
                if grid.nx == 0 || grid.ny == 0 || !(grid.x[0] < grid.x[1]) || !(grid.y[0] < grid.y[1]) {
                    return Err(ConfigError::Invalid("grid must be nonempty with min < max".into()));
                }
            }
            Experiment::Poncelet(p) => {
                if p.family != 1 && p.family != -1 {
                    return Err(ConfigError::Invalid("family must be 1 or -1".into()));
                }
                if p.steps == 0 || p.starts == 0 {
                    return Err(ConfigError::Invalid("steps and starts must be positive".into()));
                }
                if let Some(t) = &p.tune {
                    if t.q == 0 || !(t.bracket[0] < t.bracket[1]) {
                        return Err(ConfigError::Invalid("tune needs q > 0 and an increasing bracket".into()));
                    }
                }
            }
            Experiment::Caustics { mu, .. } if mu.is_empty() => {
                return Err(ConfigError::Invalid("caustics needs at least one mu".into()));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn metric(&self) -> Result<LiouvilleMetric, ConfigError> {
        match &self.surface {
            SurfaceSpec::Liouville { a, b, chart } => {
                LiouvilleMetric::parse(a, b, chart.chart()?).map_err(|e| ConfigError::Invalid(e.to_string()))
            }
            SurfaceSpec::Epsilon { .. } => Err(ConfigError::Invalid("not a liouville surface".into())),
        }
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let mut cfg = IntegratorConfig::default();
        if let Some(t) = &self.tolerances {
            cfg.tol = Tolerances { rtol: t.rtol, atol: t.atol, ..cfg.tol };
            if let Some(l) = t.max_length {
                cfg.max_length = l;
            }
        }
        cfg
    }
}

pub fn vec4(a: [f64; 4]) -> Vec4 {
    Vec4::new(a[0], a[1], a[2], a[3])
}
