//! Run reports: JSON summaries, trace CSV and SVG drawings of 2-D instances.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gcs::{ConvexSet, GcsGraph, HPolytope, HeuristicTable, VertexSet};
use crate::search::{optimality_gap, RunResult};

/// Context written next to a run's numbers.
#[derive(Clone, Debug)]
pub struct ReportContext {
    pub version: String,
    pub algo: String,
    pub sinit: Option<String>,
    pub seed: u64,
    pub accuracy: f64,
    pub backend: String,
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(null)
    }
}

pub fn run_report(result: &RunResult, h: Option<&HeuristicTable>, ctx: &ReportContext) -> Value {
    let gap = result.gap().ok();
    json!({
        "version": ctx.version,
        "algo": ctx.algo,
        "sinit": ctx.sinit,
        "seed": ctx.seed,
        "backend": ctx.backend,
        "accuracy": ctx.accuracy,
        "heuristic": h.map(|h| h.meta()),
        "c_lb": num(result.c_lb),
        "upper_bound": result.upper_bound().map(num),
        "gap_pct": gap.map(num),
        "termination": result.termination,
        "iterations": result.iterations,
        "final_cut_size": result.final_cut.len(),
        "final_cut": result.final_cut,
        "millis": result.millis,
        "best_feasible": result.best_feasible,
        "trace": result.trace,
    })
}

fn cell(x: Option<f64>) -> String {
    match x {
        None => String::new(),
        Some(v) if v.is_infinite() => "inf".into(),
        Some(v) => format!("{v}"),
    }
}

pub const TRACE_HEADER: &str =
    "iter,phase,S_size,Sprime_size,R_star_frontier,R_star_dest,C_lb,C_f,millis";

pub fn trace_csv(result: &RunResult) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for (i, r) in result.trace.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.3}",
            i + 1,
            r.phase.number(),
            r.s_size,
            r.sprime_size,
            cell(r.r_star_frontier),
            cell(r.r_star_dest),
            cell(Some(r.c_lb)),
            cell(r.c_f),
            r.millis
        );
    }
    out
}

/// Formats a gap for CSV output: `n/a` when the lower bound is not positive.
pub fn gap_cell(ub: Option<f64>, lb: f64) -> String {
    match ub.map(|ub| optimality_gap(ub, lb)) {
        Some(Ok(g)) => format!("{g:.6}"),
        _ => "n/a".into(),
    }
}

/// Corners of `{x : A x ≤ b} ∩ bbox` in the plane, counter-clockwise.
fn polygon(h: &HPolytope) -> Vec<[f64; 2]> {
    let (lo, hi) = h.bbox();
    let mut poly = vec![
        [lo[0], lo[1]],
        [hi[0], lo[1]],
        [hi[0], hi[1]],
        [lo[0], hi[1]],
    ];
    for (row, &b) in h.rows().iter().zip(h.offsets()) {
        let side = |p: &[f64; 2]| row[0] * p[0] + row[1] * p[1] - b;
        let mut next = Vec::new();
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            let (sp, sq) = (side(&p), side(&q));
            if sp <= 0.0 {
                next.push(p);
            }
            if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
                let t = sp / (sp - sq);
                next.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        poly = next;
    }
    poly
}

pub struct PlotOptions<'a> {
    pub path_points: Option<&'a [Vec<f64>]>,
    pub cut: Option<&'a VertexSet>,
    /// Draw edges between set centroids. Off by default for large graphs.
    pub edges: bool,
}

/// Draws a planar instance: sets, optional edges, cut-set shading and one
/// polyline for the path. The y axis points up.
pub fn render_svg(graph: &GcsGraph, opts: &PlotOptions) -> Result<String> {
    if graph.dim() != 2 {
        return Err(Error::input(format!(
            "plotting needs a 2-D instance, got dimension {}",
            graph.dim()
        )));
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for s in graph.sets() {
        let (a, b) = s.bounds();
        for k in 0..2 {
            lo[k] = lo[k].min(a[k]);
            hi[k] = hi[k].max(b[k]);
        }
    }
    let pad = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0);
    let (x0, y0) = (lo[0] - pad, lo[1] - pad);
    let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    let scale = 800.0 / w.max(h);
    let px = |p: &[f64]| (((p[0] - x0) * scale), ((y0 + h - p[1]) * scale));
    let stroke = 0.04 * scale;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.2} {:.2}">"#,
        w * scale,
        h * scale,
        w * scale,
        h * scale
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    if opts.edges {
        let cents: Vec<Vec<f64>> = graph
            .sets()
            .iter()
            .map(|s| s.centroid())
            .collect::<Result<_>>()?;
        let _ = writeln!(
            svg,
            r##"<g stroke="#bbbbbb" stroke-width="{:.2}">"##,
            stroke * 0.3
        );
        for &(u, v) in graph.edges() {
            if u < v || !graph.has_edge(v, u) {
                let (a, b) = (px(&cents[u]), px(&cents[v]));
                let _ = writeln!(
                    svg,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                    a.0, a.1, b.0, b.1
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }

    for (v, set) in graph.sets().iter().enumerate() {
        let in_cut = opts.cut.is_some_and(|c| c.contains(&v));
        let color = if v == graph.origin() {
            "#1b7f3b"
        } else if v == graph.destination() {
            "#b3261e"
        } else if in_cut {
            "#e08a00"
        } else {
            "#3a5a99"
        };
        let fill = if in_cut { "#f7c873" } else { "#dfe6f3" };
        match set {
            ConvexSet::Point { p } => {
                let c = px(p);
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{color}"/>"#,
                    c.0,
                    c.1,
                    stroke * 2.5
                );
            }
            ConvexSet::Segment { a, b } => {
                let (a, b) = (px(a), px(b));
                let width = if in_cut { stroke * 2.0 } else { stroke };
                let _ = writeln!(
                    svg,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="{width:.2}" stroke-linecap="round"/>"#,
                    a.0, a.1, b.0, b.1
                );
            }
            ConvexSet::Box { lo, hi } => {
                let (a, b) = (px(&[lo[0], hi[1]]), px(&[hi[0], lo[1]]));
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}" stroke="{color}" stroke-width="{:.2}"/>"#,
                    a.0,
                    a.1,
                    (b.0 - a.0).max(stroke * 0.5),
                    (b.1 - a.1).max(stroke * 0.5),
                    stroke * 0.5
                );
            }
            ConvexSet::HPolytope(hp) => {
                let pts: Vec<String> = polygon(hp)
                    .iter()
                    .map(|p| {
                        let c = px(p);
                        format!("{:.2},{:.2}", c.0, c.1)
                    })
                    .collect();
                let _ = writeln!(
                    svg,
                    r#"<polygon points="{}" fill="{fill}" stroke="{color}" stroke-width="{:.2}"/>"#,
                    pts.join(" "),
                    stroke * 0.5
                );
            }
        }
    }

    if let Some(points) = opts.path_points {
        let pts: Vec<String> = points
            .iter()
            .map(|p| {
                let c = px(p);
                format!("{:.2},{:.2}", c.0, c.1)
            })
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" fill="none" stroke="#d81b60" stroke-width="{:.2}" stroke-linejoin="round"/>"##,
            pts.join(" "),
            stroke * 1.5
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
