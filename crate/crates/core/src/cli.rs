//! Command-line front end. Exit codes: 0 success, 2 invalid input,
//! 3 numerical failure.

use crate::billiard::{BilliardError, BilliardTable, BounceRecord};
use crate::config::{ConfigError, Experiment, OutputFormat, SceneConfig, SurfaceSpec};
use crate::experiments::{billiard_start, caustic_rows, poncelet_experiment, PonceletReport};
use crate::io::{self, IoError};
use crate::render::{self, RenderError};
use crate::svg::Style;
use crate::webs::{control_web, liouville_web, perturbed_net, residual_grid, GridMaxima, GridRow, GridSpec};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "geoweb", version, about = "Geodesic flows, webs and integrable billiards")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative integration tolerance (absolute set to 1e-2 of it).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a billiard and write one record per bounce.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        bounces: Option<usize>,
    },
    /// Evaluate web residuals and curvature on a grid.
    WebCheck {
        #[command(flatten)]
        common: Common,
        /// Grid size as WxH.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
    },
    /// Rotation numbers and closure of dual-space billiard orbits.
    Poncelet {
        #[command(flatten)]
        common: Common,
    },
    /// Caustic leaves for a list of mu values.
    Caustics {
        #[command(flatten)]
        common: Common,
    },
    /// Draw an artifact of a previous run as SVG.
    Render {
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance suite.
    Selftest,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let w: usize = w.trim().parse().map_err(|_| "bad width")?;
    let h: usize = h.trim().parse().map_err(|_| "bad height")?;
    if w == 0 || h == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok((w, h))
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric { name: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric { .. } => 3,
        }
    }

    fn numeric<E: std::fmt::Debug + std::fmt::Display>(e: E) -> Self {
        CliError::Numeric { name: error_name(&e), message: e.to_string() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Numeric { name, message } => write!(f, "error: {name}: {message}"),
        }
    }
}

/// Variant path of an error from its `Debug` form, e.g. `Surface::Step`.
pub fn error_name(e: &impl std::fmt::Debug) -> String {
    let d = format!("{e:?}");
    let mut names = Vec::new();
    let mut rest = d.as_str();
    loop {
        let end = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
        if end == 0 {
            break;
        }
        names.push(&rest[..end]);
        match rest[end..].chars().next() {
            Some('(') => rest = &rest[end + 1..],
            _ => break,
        }
    }
    if names.is_empty() {
        "Error".into()
    } else {
        names.join("::")
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::NotFound(_) | IoError::MalformedArtifact { .. } | IoError::Csv(_) | IoError::Json(_) => {
                CliError::Validation(e.to_string())
            }
            other => CliError::numeric(other),
        }
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<BilliardError> for CliError {
    fn from(e: BilliardError) -> Self {
        match e {
            BilliardError::InvalidTable(m) => CliError::Validation(format!("invalid table: {m}")),
            other => CliError::numeric(other),
        }
    }
}

fn load(common: &Common) -> Result<SceneConfig, CliError> {
    let mut cfg = SceneConfig::load(&common.config)?;
    if let Some(t) = common.tol {
        if !(t > 0.0) {
            return Err(CliError::Validation("--tol must be positive".into()));
        }
        let max_length = cfg.tolerances.and_then(|x| x.max_length);
        cfg.tolerances = Some(crate::config::TolSpec { rtol: t, atol: 1e-2 * t, max_length });
    }
    Ok(cfg)
}

fn out_path(common: &Common, cfg: &SceneConfig) -> Option<PathBuf> {
    common.out.clone().or_else(|| cfg.output.as_ref().and_then(|o| o.path.clone()).map(PathBuf::from))
}

fn out_format(common: &Common, cfg: &SceneConfig, default: OutputFormat) -> OutputFormat {
    common.format.or_else(|| cfg.output.as_ref().and_then(|o| o.format)).unwrap_or(default)
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::numeric(IoError::Io(e))),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::numeric(IoError::Io(e))),
    }
}

fn rows_bytes<T: serde::Serialize>(rows: &[T], format: OutputFormat) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Jsonl => io::to_jsonl(rows, &mut buf)?,
        OutputFormat::Csv => io::to_csv(rows, &mut buf)?,
        OutputFormat::Svg => unreachable!("svg handled by the caller"),
    }
    Ok(buf)
}

fn simulate(common: &Common, bounces: Option<usize>) -> Result<(), CliError> {
    let cfg = load(common)?;
    let Experiment::Billiard { wall, start, bounces: cfg_bounces } = &cfg.experiment else {
        return Err(CliError::Validation("simulate needs a billiard experiment".into()));
    };
    let metric = cfg.metric()?;
    let table = BilliardTable::new(metric.clone(), *wall, cfg.integrator())?;
    let s = billiard_start(&table, *start, common.seed)?;
    let n = bounces.or(*cfg_bounces).unwrap_or(100);
    let records: Vec<BounceRecord> = table.run(&s, n)?;
    let out = out_path(common, &cfg);
    let bytes = match out_format(common, &cfg, OutputFormat::Jsonl) {
        OutputFormat::Svg => {
            render::render_billiard(&metric, wall, &records, Default::default(), Style::default())?.into_bytes()
        }
        f => rows_bytes(&records, f)?,
    };
    emit(out.as_deref(), &bytes)
}

fn web_check(common: &Common, grid: Option<(usize, usize)>) -> Result<(), CliError> {
    let cfg = load(common)?;
    let Experiment::WebCheck { web, amplitude, grid: g } = &cfg.experiment else {
        return Err(CliError::Validation("web-check needs a web-check experiment".into()));
    };
    let metric = cfg.metric()?;
    let fields = match web {
        crate::config::WebKind::Liouville => liouville_web(&metric),
        crate::config::WebKind::Perturbed => perturbed_net(&metric, *amplitude),
        crate::config::WebKind::Control => control_web(&metric, *amplitude),
    };
    let (nx, ny) = grid.unwrap_or((g.nx, g.ny));
    let spec = GridSpec { x: (g.x[0], g.x[1]), y: (g.y[0], g.y[1]), nx, ny };
    let rows: Vec<GridRow> = residual_grid(&fields, &spec).map_err(CliError::numeric)?;
    let m = GridMaxima::of(&rows);
    eprintln!(
        "max |r_Px| {:.3e}  max |r_Py| {:.3e}  max |r_flat| {:.3e}  max |K_B| {:.3e}",
        m.r_px, m.r_py, m.r_flat, m.k_b
    );
    let out = out_path(common, &cfg);
    let bytes = match out_format(common, &cfg, OutputFormat::Csv) {
        OutputFormat::Svg => render::render_web(&metric, &rows, Style::default())?.into_bytes(),
        f => rows_bytes(&rows, f)?,
    };
    emit(out.as_deref(), &bytes)
}

fn epsilon(cfg: &SceneConfig) -> Result<f64, CliError> {
    match cfg.surface {
        SurfaceSpec::Epsilon { epsilon, .. } => Ok(epsilon),
        _ => Err(CliError::Validation("this experiment needs an epsilon surface".into())),
    }
}

fn poncelet(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let Experiment::Poncelet(spec) = &cfg.experiment else {
        return Err(CliError::Validation("poncelet needs a poncelet experiment".into()));
    };
    let report = poncelet_experiment(epsilon(&cfg)?, spec).map_err(CliError::numeric)?;
    let out = out_path(common, &cfg);
    let bytes = match out_format(common, &cfg, OutputFormat::Jsonl) {
        OutputFormat::Svg => render::render_poncelet(&report, Style::default())?.into_bytes(),
        OutputFormat::Csv => return Err(CliError::Validation("poncelet writes json or svg".into())),
        OutputFormat::Jsonl => {
            let mut b = serde_json::to_vec_pretty(&report).map_err(|e| CliError::numeric(IoError::Json(e)))?;
            b.push(b'\n');
            b
        }
    };
    emit(out.as_deref(), &bytes)
}

fn caustics(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let Experiment::Caustics { wall, mu } = &cfg.experiment else {
        return Err(CliError::Validation("caustics needs a caustics experiment".into()));
    };
    let table = BilliardTable::new(cfg.metric()?, *wall, cfg.integrator())?;
    let rows = caustic_rows(&table, mu)?;
    let out = out_path(common, &cfg);
    let f = match out_format(common, &cfg, OutputFormat::Csv) {
        OutputFormat::Svg => return Err(CliError::Validation("caustics writes csv or jsonl".into())),
        f => f,
    };
    emit(out.as_deref(), &rows_bytes(&rows, f)?)
}

fn render_cmd(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let Experiment::Render { input, artifact, embedding, wall } = &cfg.experiment else {
        return Err(CliError::Validation("render needs a render experiment".into()));
    };
    let input = Path::new(input);
    let svg = match artifact {
        crate::config::ArtifactKind::Billiard => {
            let wall = wall.ok_or_else(|| CliError::Validation("billiard render needs the wall".into()))?;
            let records: Vec<BounceRecord> = io::read_jsonl(input)?;
            render::render_billiard(&cfg.metric()?, &wall, &records, *embedding, Style::default())?
        }
        crate::config::ArtifactKind::Web => {
            let rows: Vec<GridRow> = io::read_csv(input)?;
            render::render_web(&cfg.metric()?, &rows, Style::default())?
        }
        crate::config::ArtifactKind::Poncelet => {
            let report: PonceletReport = io::read_json(input)?;
            render::render_poncelet(&report, Style::default())?
        }
    };
    emit(out_path(common, &cfg).as_deref(), svg.as_bytes())
}

fn selftest() -> Result<(), CliError> {
    let results = crate::acceptance::run_all();
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        return Err(CliError::Numeric {
            name: "AcceptanceFailure".into(),
            message: format!("{failed} criteria failed"),
        });
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate { common, bounces } => simulate(common, *bounces),
        Command::WebCheck { common, grid } => web_check(common, *grid),
        Command::Poncelet { common } => poncelet(common),
        Command::Caustics { common } => caustics(common),
        Command::Render { common } => render_cmd(common),
        Command::Selftest => selftest(),
    }
}

/// Parses `argv` (including the program name), runs, and returns the exit
/// code. Errors are printed to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_error_names() {
        let e = BilliardError::Surface(crate::surface::SurfaceError::ZeroVelocity);
        assert_eq!(error_name(&e), "Surface::ZeroVelocity");
        assert_eq!(error_name(&BilliardError::TangentRay { bounce: 3 }), "TangentRay");
    }

    #[test]
    fn grid_flag() {
        assert_eq!(parse_grid("50x40"), Ok((50, 40)));
        assert!(parse_grid("50").is_err());
        assert!(parse_grid("0x3").is_err());
    }
}
