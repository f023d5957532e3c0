//! Exact solutions for small instances by enumerating every simple path.
//!
//! Restricting to simple paths loses nothing: costs are nonnegative
//! distances, so cutting the cycle out of a walk that revisits a vertex (and
//! reusing the point chosen at its first visit) never increases the length.

use serde::Serialize;

use crate::conic::ConicSolver;
use crate::error::{Error, Result};
use crate::gcs::{GcsGraph, HeuristicTable};
use crate::relaxation::{solve_fixed_path, FeasibleSolution};

pub const DEFAULT_CAP: usize = 100_000;

/// Tolerance for flagging `h(v) > C_opt(v, d)`.
pub const ADMISSIBILITY_TOL: f64 = 1e-6;

/// All simple `src → dst` paths in lexicographic order.
pub fn enumerate_paths(
    graph: &GcsGraph,
    src: usize,
    dst: usize,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    if cap == 0 {
        return Err(Error::input("path cap must be at least 1"));
    }
    graph.check_ids(&[src, dst])?;
    let succ: Vec<Vec<usize>> = (0..graph.num_vertices())
        .map(|u| {
            let mut s: Vec<usize> = graph.successors(u).collect();
            s.sort_unstable();
            s
        })
        .collect();
    let useful = graph.reaching(dst);
    let mut out = Vec::new();
    if !useful[src] {
        return Ok(out);
    }
    let mut on_path = vec![false; graph.num_vertices()];
    let mut path = vec![src];
    // Each frame is (vertex, index of the next successor to try).
    let mut stack = vec![(src, 0usize)];
    on_path[src] = true;
    if src == dst {
        return Ok(vec![path]);
    }
    while let Some(top) = stack.last_mut() {
        let (u, next) = *top;
        if let Some(&v) = succ[u].get(next) {
            top.1 += 1;
            if on_path[v] || !useful[v] {
                continue;
            }
            if v == dst {
                if out.len() == cap {
                    return Err(Error::TooLarge { cap });
                }
                let mut p = path.clone();
                p.push(v);
                out.push(p);
                continue;
            }
            on_path[v] = true;
            path.push(v);
            stack.push((v, 0));
        } else {
            stack.pop();
            on_path[u] = false;
            path.pop();
        }
    }
    Ok(out)
}

/// `C_opt(src, dst)` and a minimizing solution. Ties keep the
/// lexicographically first path.
pub fn exact_opt(
    solver: &ConicSolver,
    graph: &GcsGraph,
    src: usize,
    dst: usize,
    cap: usize,
) -> Result<(f64, FeasibleSolution)> {
    let mut best: Option<FeasibleSolution> = None;
    for path in enumerate_paths(graph, src, dst, cap)? {
        let sol = solve_fixed_path(solver, graph, &path)?;
        if best.as_ref().map_or(true, |b| sol.cost < b.cost) {
            best = Some(sol);
        }
    }
    let best = best.ok_or(Error::NoPath { from: src, to: dst })?;
    Ok((best.cost, best))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityViolation {
    pub vertex: usize,
    pub h: f64,
    pub c_opt: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub checked: usize,
    pub violations: Vec<AdmissibilityViolation>,
}

impl AdmissibilityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `C_opt(v, d)` for every vertex, `None` where `d` is unreachable.
pub fn cost_to_go(solver: &ConicSolver, graph: &GcsGraph, cap: usize) -> Result<Vec<Option<f64>>> {
    let d = graph.destination();
    let reaching = graph.reaching(d);
    (0..graph.num_vertices())
        .map(|v| match v {
            _ if v == d => Ok(Some(0.0)),
            _ if !reaching[v] => Ok(None),
            _ => Ok(Some(exact_opt(solver, graph, v, d, cap)?.0)),
        })
        .collect()
}

/// Checks `h` against a precomputed `cost_to_go` table.
pub fn admissibility_against(
    h: &HeuristicTable,
    c_opt: &[Option<f64>],
) -> Result<AdmissibilityReport> {
    if h.len() != c_opt.len() {
        return Err(Error::input("heuristic does not cover the graph"));
    }
    let mut report = AdmissibilityReport::default();
    for (v, c) in c_opt.iter().enumerate() {
        let Some(c) = *c else { continue };
        report.checked += 1;
        if h.get(v) > c + ADMISSIBILITY_TOL {
            report.violations.push(AdmissibilityViolation {
                vertex: v,
                h: h.get(v),
                c_opt: c,
            });
        }
    }
    Ok(report)
}

/// Compares `h(v)` with `C_opt(v, d)` for every vertex that can reach `d`.
pub fn check_admissible(
    solver: &ConicSolver,
    graph: &GcsGraph,
    h: &HeuristicTable,
    cap: usize,
) -> Result<AdmissibilityReport> {
    if h.len() != graph.num_vertices() {
        return Err(Error::input("heuristic does not cover the graph"));
    }
    admissibility_against(h, &cost_to_go(solver, graph, cap)?)
}
