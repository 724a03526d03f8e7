//! SVG figures of billiard runs, web grids and dual-space orbits.

use crate::billiard::{BilliardTable, BounceRecord, Wall};
use crate::config::Embedding;
use crate::dual::cone::wall_planes_at;
use crate::dual::{incidence_plane, PonceletSystem, Vec4};
use crate::experiments::PonceletReport;
use crate::surface::{Coord, IntegratorConfig, LiouvilleMetric, StopCondition};
use crate::svg::{Bounds, Style, Svg};
use crate::webs::linearize::{net_leaf, Linearization};
use crate::webs::GridRow;

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("malformed artifact: {0}")]
    MalformedArtifact(String),
}

const SAMPLES: usize = 48;

fn embed(e: Embedding, (u, v): (f64, f64)) -> (f64, f64) {
    match e {
        Embedding::Chart => (u, v),
        Embedding::Elliptic => (u.cosh() * v.cos(), u.sinh() * v.sin()),
    }
}

fn along(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn leaf_points(c: Coord, x: f64, range: (f64, f64), e: Embedding) -> Vec<(f64, f64)> {
    along(range.0, range.1, 4 * SAMPLES).map(|t| embed(e, if c == Coord::U { (x, t) } else { (t, x) })).collect()
}

/// Wall leaves, the caustic of the run's `μ` and the trajectory chords
/// (re-integrated between consecutive bounces).
pub fn render_billiard(
    metric: &LiouvilleMetric,
    wall: &Wall,
    records: &[BounceRecord],
    embedding: Embedding,
    style: Style,
) -> Result<String, RenderError> {
    let chart = metric.chart();
    let wc = wall.coord();
    let other = chart.bounds(wc.other());
    let wall_range = (wall.lower.unwrap_or(chart.bounds(wc).0), wall.upper.unwrap_or(chart.bounds(wc).1));
    let walls: Vec<Vec<(f64, f64)>> =
        [wall.lower, wall.upper].into_iter().flatten().map(|x| leaf_points(wc, x, other, embedding)).collect();

    let cfg = IntegratorConfig::default();
    let mut chords = Vec::new();
    for pair in records.windows(2) {
        let (r, next) = (&pair[0], &pair[1]);
        for x in [r.u, r.v, r.du_out, r.dv_out, next.arc_len] {
            if !x.is_finite() {
                return Err(RenderError::MalformedArtifact(format!("non-finite value in bounce {}", r.i)));
            }
        }
        let Ok(s) = metric.phase_point(r.u, r.v, r.du_out, r.dv_out) else { continue };
        let Ok(seg) = metric.integrate(&s, StopCondition::ArcLength(next.arc_len), &cfg) else { continue };
        let pts: Vec<_> = along(0.0, next.arc_len, SAMPLES)
            .filter_map(|t| metric.state_at(&seg, t, &cfg).ok())
            .map(|y| embed(embedding, (y[0], y[1])))
            .collect();
        chords.push(pts);
    }

    let mut caustics = Vec::new();
    if let Some(r) = records.first() {
        if let Ok(table) = BilliardTable::new(metric.clone(), *wall, cfg) {
            if let Ok(c) = table.caustic_of(r.mu_out) {
                let cc: Coord = c.coord.into();
                let range = if cc == wc { other } else { wall_range };
                for x in &c.roots {
                    caustics.push(leaf_points(cc, *x, range, embedding));
                }
            }
        }
    }

    let all = walls.iter().chain(&chords).chain(&caustics).flatten().copied();
    let bounds = Bounds::around(all).unwrap_or(Bounds { x: (-1.0, 1.0), y: (-1.0, 1.0) });
    let mut svg = Svg::new(bounds, style);
    for layer in ["wall", "caustics", "chords"] {
        svg.ensure_layer(layer);
    }
    for w in &walls {
        svg.polyline("wall", w, "black", 2.0);
    }
    for c in &caustics {
        svg.polyline("caustics", c, "#c03030", 1.0);
    }
    for c in &chords {
        svg.polyline("chords", c, "#3050c0", 0.6);
    }
    for r in records {
        svg.circle("chords", embed(embedding, (r.u, r.v)), 1.5, "#3050c0");
    }
    Ok(svg.finish())
}

/// Leaves of the four foliations of the Liouville web over the grid's
/// rectangle, drawn in linearizing coordinates where they are straight.
pub fn render_web(metric: &LiouvilleMetric, rows: &[GridRow], style: Style) -> Result<String, RenderError> {
    let xs = rows.iter().map(|r| r.x);
    let ys = rows.iter().map(|r| r.y);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    if !(x0 < x1 && y0 < y1) {
        return Err(RenderError::MalformedArtifact("grid must span a rectangle".into()));
    }
    let anchor = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let lin = Linearization::new(metric, anchor);
    let map = |pts: Vec<(f64, f64)>| -> Vec<(f64, f64)> {
        pts.into_iter().filter_map(|(u, v)| lin.coords(u, v).ok()).collect()
    };
    type Layer = (&'static str, &'static str, Vec<Vec<(f64, f64)>>);
    let mut layers: Vec<Layer> = vec![
        ("bisector", "black", Vec::new()),
        ("net-plus", "#c03030", Vec::new()),
        ("net-minus", "#3050c0", Vec::new()),
    ];
    for x in along(x0, x1, 7) {
        layers[0].2.push(map(along(y0, y1, SAMPLES).map(|y| (x, y)).collect()));
    }
    for y in along(y0, y1, 7) {
        layers[0].2.push(map(along(x0, x1, SAMPLES).map(|x| (x, y)).collect()));
    }
    let len = 0.5 * (x1 - x0).min(y1 - y0);
    for y in along(y0, y1, 7) {
        for (k, plus) in [(1usize, true), (2, false)] {
            for sign in [1.0, -1.0] {
                let mut l = len;
                let pts = loop {
                    match net_leaf(metric, (anchor.0, y), plus, sign * l, SAMPLES) {
                        Ok(p) => break Some(p),
                        Err(_) if l > len / 32.0 => l *= 0.5,
                        Err(_) => break None,
                    }
                };
                if let Some(p) = pts {
                    layers[k].2.push(map(p));
                }
            }
        }
    }
    let bounds = Bounds::around(layers.iter().flat_map(|l| l.2.iter().flatten().copied()))
        .unwrap_or(Bounds { x: (-1.0, 1.0), y: (-1.0, 1.0) });
    let mut svg = Svg::new(bounds, style);
    for (id, color, lines) in &layers {
        svg.ensure_layer(id);
        for l in lines {
            svg.polyline(id, l, color, 0.8);
        }
    }
    Ok(svg.finish())
}

fn trace(c: &crate::dual::PlaneConic, ys: &[f64], keep: impl Fn(&Vec4) -> bool) -> Vec<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for branch in 0..2 {
        let mut run = Vec::new();
        for &y in ys {
            let p = wall_planes_at(c, y).map(|s| s[branch]).filter(|s| *s > 0.0).map(|s| (s.sqrt(), y));
            match p {
                Some((z, y)) if keep(&incidence_plane(z, y)) => run.push((z, y)),
                _ => {
                    if run.len() > 1 {
                        out.push(std::mem::take(&mut run));
                    }
                    run.clear();
                }
            }
        }
        if run.len() > 1 {
            out.push(run);
        }
    }
    out
}

/// The `(z, y)` picture of a dual-space orbit: the wall and caustic as
/// envelopes of their geodesics, and the orbit's geodesic chords between
/// consecutive wall points.
pub fn render_poncelet(report: &PonceletReport, style: Style) -> Result<String, RenderError> {
    let v = |a: [f64; 4]| Vec4::new(a[0], a[1], a[2], a[3]);
    let sys = PonceletSystem::new(report.epsilon, v(report.caustic), v(report.wall), report.family)
        .map_err(|e| RenderError::MalformedArtifact(e.to_string()))?;
    let pts: Vec<(f64, f64)> = report.orbit.iter().filter_map(|o| Some((o.z?, o.y?))).collect();
    let (ylo, yhi) = pts.iter().fold((-1.0f64, 1.0f64), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let pad = 0.5 * (yhi - ylo);
    let ys: Vec<f64> = along(ylo - pad, yhi + pad, 8 * SAMPLES).collect();
    let walls = trace(sys.wall(), &ys, |pi| sys.family_of(pi) == sys.family());
    let caustics = trace(sys.caustic(), &ys, |_| true);

    let mut chords = Vec::new();
    for pair in report.orbit.windows(2) {
        let (Some(z0), Some(y0), Some(z1), Some(y1)) = (pair[0].z, pair[0].y, pair[1].z, pair[1].y) else { continue };
        let l = pair[0].l;
        if l[3] == 0.0 {
            chords.push(vec![(z0, y0), (z1, y1)]);
            continue;
        }
        let c: Vec<(f64, f64)> = along(y0, y1, SAMPLES)
            .filter_map(|y| {
                let s = -(l[0] * y * y + 2.0 * l[1] * y + l[2]) / l[3];
                (s >= 0.0).then(|| (s.sqrt(), y))
            })
            .collect();
        chords.push(c);
    }
    let bounds = Bounds::around(walls.iter().chain(&caustics).chain(&chords).flatten().copied())
        .unwrap_or(Bounds { x: (0.0, 1.0), y: (-1.0, 1.0) });
    let mut svg = Svg::new(bounds, style);
    for layer in ["wall", "caustics", "chords"] {
        svg.ensure_layer(layer);
    }
    for w in &walls {
        svg.polyline("wall", w, "black", 2.0);
    }
    for c in &caustics {
        svg.polyline("caustics", c, "#c03030", 1.0);
    }
    for c in &chords {
        svg.polyline("chords", c, "#3050c0", 0.6);
    }
    for p in &pts {
        svg.circle("chords", *p, 1.5, "#3050c0");
    }
    Ok(svg.finish())
}
