//! Writes SVG figures of a billiard run, a web grid and a dual-space orbit
//! into a directory (default `figures`).

use geoweb::billiard::BilliardTable;
use geoweb::config::{Embedding, Experiment, SceneConfig};
use geoweb::experiments::poncelet_experiment;
use geoweb::render::{render_billiard, render_poncelet, render_web};
use geoweb::surface::{Chart, LiouvilleMetric};
use geoweb::svg::Style;
use geoweb::webs::{liouville_web, residual_grid, GridSpec};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;

    let table = BilliardTable::elliptic(1.0)?;
    let recs = table.run(&table.launch(1.0, 0.7, 0.7)?, 60)?;
    let svg = render_billiard(table.metric(), table.wall(), &recs, Embedding::Elliptic, Style::default())?;
    std::fs::write(dir.join("billiard.svg"), svg)?;

    let m = LiouvilleMetric::parse("sinh(u)", "sin(v)", Chart::rect((0.2, 2.0), (0.2, 2.0)))?;
    let rows = residual_grid(&liouville_web(&m), &GridSpec { x: (0.5, 1.5), y: (0.5, 1.5), nx: 10, ny: 10 })?;
    std::fs::write(dir.join("web.svg"), render_web(&m, &rows, Style::default())?)?;

    let cfg =
        SceneConfig::load(std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/porism.json")))?;
    let Experiment::Poncelet(spec) = &cfg.experiment else { unreachable!("porism.json holds a poncelet experiment") };
    let report = poncelet_experiment(-1.0, spec)?;
    std::fs::write(dir.join("poncelet.svg"), render_poncelet(&report, Style::default())?)?;

    println!("wrote billiard.svg, web.svg and poncelet.svg to {}", dir.display());
    Ok(())
}
