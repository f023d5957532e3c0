//! The convex relaxation of the cut-set shortest-path problem, and the convex
//! program that places points along a fixed vertex path.
//!
//! For a cut-set `S` and terminals `S′ ⊆ N_S`, the program ranges over the
//! edges `Ē = {(u, v) ∈ E : u ∈ S, v ∈ S ∪ S′}`. Each edge carries a flow
//! `y ∈ [0, 1]`, perspective points `(z, y) ∈ cone(X_u)` and
//! `(z′, y) ∈ cone(X_v)`, and an epigraph variable `t ≥ ‖z − z′‖₂`. Each
//! terminal carries `α ∈ [0, 1]` priced at its heuristic value.
//!
//! The origin is exempt from conservation, as in the integer formulation.
//! Its inflow is still forced to zero: conservation over `S ∖ {s}` plus
//! `Σα = 1` and unit outflow at `s` leave no slack for flow returning to `s`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::conic::{ConicProgram, ConicSolver, LinearExpr, SolveStatus};
use crate::error::{Error, Result};
use crate::gcs::{distance, GcsGraph, HeuristicTable, VertexSet, DEFAULT_TOL};
use crate::perspective::{add_perspective, Scale};

/// Where the unit of flow starts.
#[derive(Clone, Debug)]
pub(crate) enum Source {
    /// A real vertex of `S`, exempt from conservation.
    Vertex(usize),
    /// A set-less super source feeding each listed vertex of `S` at a fixed
    /// cost per unit of flow. Every vertex of `S` then obeys conservation.
    Virtual(Vec<(usize, f64)>),
}

/// Variable layout of a built relaxation.
#[derive(Clone, Debug)]
pub struct VariableMap {
    pub edges: Vec<(usize, usize)>,
    pub y: Vec<usize>,
    pub z: Vec<Vec<usize>>,
    pub z_prime: Vec<Vec<usize>>,
    pub t: Vec<usize>,
    /// Segment-parameter variables introduced for the tail and head sets.
    pub sigma: Vec<(Option<usize>, Option<usize>)>,
    pub terminals: Vec<usize>,
    pub alpha: Vec<usize>,
    /// `(vertex, y, z′)` for each virtual-source entry edge.
    pub(crate) entries: Vec<(usize, usize, Vec<usize>)>,
}

pub(crate) struct RelaxationSpec<'a> {
    pub graph: &'a GcsGraph,
    pub source: Source,
    pub cut: &'a VertexSet,
    pub terminals: &'a VertexSet,
    pub terminal_cost: &'a dyn Fn(usize) -> f64,
}

impl RelaxationSpec<'_> {
    pub(crate) fn build(&self) -> (ConicProgram, VariableMap) {
        let g = self.graph;
        let n = g.dim();
        let mut p = ConicProgram::new();
        let mut map = VariableMap {
            edges: Vec::new(),
            y: Vec::new(),
            z: Vec::new(),
            z_prime: Vec::new(),
            t: Vec::new(),
            sigma: Vec::new(),
            terminals: self.terminals.iter().copied().collect(),
            alpha: Vec::new(),
            entries: Vec::new(),
        };

        for &(u, v) in g.edges() {
            if !self.cut.contains(&u) || !(self.cut.contains(&v) || self.terminals.contains(&v)) {
                continue;
            }
            let y = p.add_var(0.0, 1.0);
            let z = p.add_free_vec(n);
            let zp = p.add_free_vec(n);
            let t = p.add_var(0.0, f64::INFINITY);
            p.add_cost(t, 1.0);
            let su = add_perspective(&mut p, g.set(u), &z, Scale::Var(y));
            let sv = add_perspective(&mut p, g.set(v), &zp, Scale::Var(y));
            let rows = (0..n)
                .map(|k| LinearExpr::new(vec![(z[k], 1.0), (zp[k], -1.0)], 0.0))
                .collect();
            p.add_soc(t, rows);
            map.edges.push((u, v));
            map.y.push(y);
            map.z.push(z);
            map.z_prime.push(zp);
            map.t.push(t);
            map.sigma.push((su, sv));
        }

        for &v in &map.terminals {
            let a = p.add_var(0.0, 1.0);
            p.add_cost(a, (self.terminal_cost)(v));
            map.alpha.push(a);
        }
        // Σ α = 1
        p.add_eq(map.alpha.iter().map(|&a| (a, 1.0)).collect(), 1.0);

        let origin = match &self.source {
            Source::Vertex(s) => {
                let terms = map
                    .edges
                    .iter()
                    .zip(&map.y)
                    .filter(|((u, _), _)| u == s)
                    .map(|(_, &y)| (y, 1.0))
                    .collect();
                p.add_eq(terms, 1.0);
                Some(*s)
            }
            Source::Virtual(entries) => {
                for &(b, cost) in entries {
                    let y = p.add_var(0.0, 1.0);
                    p.add_cost(y, cost);
                    let zp = p.add_free_vec(n);
                    add_perspective(&mut p, g.set(b), &zp, Scale::Var(y));
                    map.entries.push((b, y, zp));
                }
                p.add_eq(map.entries.iter().map(|(_, y, _)| (*y, 1.0)).collect(), 1.0);
                None
            }
        };

        // Terminal degree: inflow equals α.
        for (&v, &a) in map.terminals.iter().zip(&map.alpha) {
            let mut terms: Vec<(usize, f64)> = map
                .edges
                .iter()
                .zip(&map.y)
                .filter(|((_, w), _)| *w == v)
                .map(|(_, &y)| (y, 1.0))
                .collect();
            terms.push((a, -1.0));
            p.add_eq(terms, 0.0);
        }

        // Conservation of (z′, y) in against (z, y) out.
        for &v in self.cut {
            if Some(v) == origin {
                continue;
            }
            let mut flow = Vec::new();
            let mut coords: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
            for (e, &(a, b)) in map.edges.iter().enumerate() {
                if b == v {
                    flow.push((map.y[e], 1.0));
                    for k in 0..n {
                        coords[k].push((map.z_prime[e][k], 1.0));
                    }
                }
                if a == v {
                    flow.push((map.y[e], -1.0));
                    for k in 0..n {
                        coords[k].push((map.z[e][k], -1.0));
                    }
                }
            }
            for (b, y, zp) in &map.entries {
                if *b == v {
                    flow.push((*y, 1.0));
                    for k in 0..n {
                        coords[k].push((zp[k], 1.0));
                    }
                }
            }
            p.add_eq(flow, 0.0);
            for row in coords {
                p.add_eq(row, 0.0);
            }
        }
        (p, map)
    }
}

/// Flow and perspective values on one relaxation edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeFlow {
    pub u: usize,
    pub v: usize,
    pub y: f64,
    pub z: Vec<f64>,
    pub z_prime: Vec<f64>,
}

/// Optimal values of a relaxation on `(S, S′)`. When the program is not
/// solved to optimality `objective` is `+∞` and the value vectors are empty.
#[derive(Clone, Debug)]
pub struct RelaxedSolution {
    pub status: SolveStatus,
    pub objective: f64,
    pub cut: VertexSet,
    pub terminals: VertexSet,
    pub edges: Vec<EdgeFlow>,
    pub alpha: Vec<(usize, f64)>,
    pub solve_millis: f64,
}

/// Largest absolute residual of each constraint family of the relaxation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RelaxationResiduals {
    pub alpha_sum: f64,
    pub source_degree: f64,
    pub terminal_degree: f64,
    pub conservation: f64,
    pub perspective: f64,
    pub bounds: f64,
}

impl RelaxationResiduals {
    pub fn max(&self) -> f64 {
        [
            self.alpha_sum,
            self.source_degree,
            self.terminal_degree,
            self.conservation,
            self.perspective,
            self.bounds,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl RelaxedSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn alpha_of(&self, v: usize) -> Option<f64> {
        self.alpha.iter().find(|(w, _)| *w == v).map(|(_, a)| *a)
    }

    pub fn y(&self, u: usize, v: usize) -> Option<f64> {
        self.edges
            .iter()
            .find(|e| e.u == u && e.v == v)
            .map(|e| e.y)
    }

    /// Recomputes every constraint residual directly from the returned values,
    /// independent of the conic program that produced them.
    pub fn residuals(&self, graph: &GcsGraph) -> RelaxationResiduals {
        let mut r = RelaxationResiduals::default();
        let n = graph.dim();
        let s = graph.origin();
        r.alpha_sum = (self.alpha.iter().map(|(_, a)| a).sum::<f64>() - 1.0).abs();
        let out_of_s: f64 = self.edges.iter().filter(|e| e.u == s).map(|e| e.y).sum();
        r.source_degree = (out_of_s - 1.0).abs();
        for &(v, a) in &self.alpha {
            let inflow: f64 = self.edges.iter().filter(|e| e.v == v).map(|e| e.y).sum();
            r.terminal_degree = r.terminal_degree.max((inflow - a).abs());
            r.bounds = r.bounds.max(-a).max(a - 1.0);
        }
        for &v in self.cut.iter().filter(|&&v| v != s) {
            let mut flow = 0.0;
            let mut coords = vec![0.0; n];
            for e in &self.edges {
                if e.v == v {
                    flow += e.y;
                    coords.iter_mut().zip(&e.z_prime).for_each(|(c, x)| *c += x);
                }
                if e.u == v {
                    flow -= e.y;
                    coords.iter_mut().zip(&e.z).for_each(|(c, x)| *c -= x);
                }
            }
            r.conservation = coords
                .iter()
                .fold(r.conservation.max(flow.abs()), |m, c| m.max(c.abs()));
        }
        for e in &self.edges {
            r.perspective = r
                .perspective
                .max(graph.set(e.u).perspective_violation(&e.z, e.y))
                .max(graph.set(e.v).perspective_violation(&e.z_prime, e.y));
            r.bounds = r.bounds.max(-e.y).max(e.y - 1.0);
        }
        r
    }

    /// Edge flows keyed `"u->v"`, terminal weights keyed by id.
    pub fn to_json(&self) -> serde_json::Value {
        let y: serde_json::Map<String, serde_json::Value> = self
            .edges
            .iter()
            .map(|e| (format!("{}->{}", e.u, e.v), json!(e.y)))
            .collect();
        let alpha: serde_json::Map<String, serde_json::Value> = self
            .alpha
            .iter()
            .map(|(v, a)| (v.to_string(), json!(a)))
            .collect();
        json!({
            "status": self.status,
            "objective": if self.objective.is_finite() { json!(self.objective) } else { json!(null) },
            "cut": self.cut,
            "terminals": self.terminals,
            "y": y,
            "alpha": alpha,
        })
    }
}

fn check_relaxation_inputs(
    graph: &GcsGraph,
    cut: &VertexSet,
    terminals: &VertexSet,
    h: &HeuristicTable,
) -> Result<()> {
    graph.check_ids(cut)?;
    graph.check_ids(terminals)?;
    if !cut.contains(&graph.origin()) || cut.contains(&graph.destination()) {
        return Err(Error::input(
            "S must contain the origin and exclude the destination",
        ));
    }
    if terminals.is_empty() {
        return Err(Error::input("terminal set S' must be nonempty"));
    }
    let nbhd = graph.neighborhood(cut)?;
    if let Some(v) = terminals.iter().find(|v| !nbhd.contains(v)) {
        return Err(Error::input(format!(
            "terminal {v} is not in the neighborhood of S"
        )));
    }
    if h.len() != graph.num_vertices() {
        return Err(Error::input(format!(
            "heuristic covers {} vertices, graph has {}",
            h.len(),
            graph.num_vertices()
        )));
    }
    Ok(())
}

/// Builds the relaxation program for `(S, S′)` with terminal heuristic `h`.
pub fn build_sppstar(
    graph: &GcsGraph,
    cut: &VertexSet,
    terminals: &VertexSet,
    h: &HeuristicTable,
) -> Result<(ConicProgram, VariableMap)> {
    check_relaxation_inputs(graph, cut, terminals, h)?;
    let cost = |v: usize| h.get(v);
    let spec = RelaxationSpec {
        graph,
        source: Source::Vertex(graph.origin()),
        cut,
        terminals,
        terminal_cost: &cost,
    };
    Ok(spec.build())
}

pub(crate) fn extract(
    graph: &GcsGraph,
    cut: &VertexSet,
    terminals: &VertexSet,
    program: &ConicProgram,
    map: &VariableMap,
    solver: &ConicSolver,
) -> RelaxedSolution {
    let _ = graph;
    let sol = solver.solve(program);
    let mut out = RelaxedSolution {
        status: sol.status,
        objective: f64::INFINITY,
        cut: cut.clone(),
        terminals: terminals.clone(),
        edges: Vec::new(),
        alpha: Vec::new(),
        solve_millis: sol.solve_millis,
    };
    if let Some(x) = sol.primal {
        out.objective = sol.objective;
        let pick = |ids: &[usize]| ids.iter().map(|&j| x[j]).collect::<Vec<f64>>();
        out.edges = map
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| EdgeFlow {
                u,
                v,
                y: x[map.y[e]],
                z: pick(&map.z[e]),
                z_prime: pick(&map.z_prime[e]),
            })
            .collect();
        out.alpha = map
            .terminals
            .iter()
            .zip(&map.alpha)
            .map(|(&v, &a)| (v, x[a]))
            .collect();
    }
    out
}

/// Solves the relaxation. Infeasible or failed solves come back with
/// `objective = +∞` and the backend status; the caller decides what that means.
pub fn solve_sppstar(
    solver: &ConicSolver,
    graph: &GcsGraph,
    cut: &VertexSet,
    terminals: &VertexSet,
    h: &HeuristicTable,
) -> Result<RelaxedSolution> {
    let (program, map) = build_sppstar(graph, cut, terminals, h)?;
    Ok(extract(graph, cut, terminals, &program, &map, solver))
}

/// A vertex path with one point per vertex and its Euclidean length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSolution {
    pub path: Vec<usize>,
    pub points: Vec<Vec<f64>>,
    pub cost: f64,
}

impl FeasibleSolution {
    pub fn from_points(path: Vec<usize>, points: Vec<Vec<f64>>) -> Self {
        let cost = points.windows(2).map(|w| distance(&w[0], &w[1])).sum();
        Self { path, points, cost }
    }

    /// Consecutive vertices joined by edges, points inside their sets, and a
    /// cost that matches the points.
    pub fn validate(&self, graph: &GcsGraph) -> Result<()> {
        if self.path.len() != self.points.len() || self.path.is_empty() {
            return Err(Error::invariant("path and points disagree in length"));
        }
        graph.check_ids(&self.path)?;
        if let Some(w) = self.path.windows(2).find(|w| !graph.has_edge(w[0], w[1])) {
            return Err(Error::invariant(format!(
                "({}, {}) is not an edge",
                w[0], w[1]
            )));
        }
        for (&v, x) in self.path.iter().zip(&self.points) {
            if !graph.set(v).contains(x, DEFAULT_TOL) {
                return Err(Error::invariant(format!(
                    "point for vertex {v} lies outside its set"
                )));
            }
        }
        let cost: f64 = self.points.windows(2).map(|w| distance(&w[0], &w[1])).sum();
        if (cost - self.cost).abs() > 1e-9 * cost.max(1.0) {
            return Err(Error::invariant("cost does not match points"));
        }
        Ok(())
    }
}

fn check_path(graph: &GcsGraph, path: &[usize]) -> Result<()> {
    if path.is_empty() {
        return Err(Error::input("empty path"));
    }
    graph.check_ids(path)?;
    if let Some(w) = path.windows(2).find(|w| !graph.has_edge(w[0], w[1])) {
        return Err(Error::input(format!("({}, {}) is not an edge", w[0], w[1])));
    }
    Ok(())
}

/// Places one point per path vertex to minimize the path length.
pub fn solve_fixed_path(
    solver: &ConicSolver,
    graph: &GcsGraph,
    path: &[usize],
) -> Result<FeasibleSolution> {
    check_path(graph, path)?;
    if path.len() == 1 {
        let x = graph.set(path[0]).centroid()?;
        return Ok(FeasibleSolution::from_points(path.to_vec(), vec![x]));
    }
    let n = graph.dim();
    let mut p = ConicProgram::new();
    let xs: Vec<Vec<usize>> = path
        .iter()
        .map(|&v| {
            let x = p.add_free_vec(n);
            add_perspective(&mut p, graph.set(v), &x, Scale::One);
            x
        })
        .collect();
    for w in xs.windows(2) {
        let t = p.add_var(0.0, f64::INFINITY);
        p.add_cost(t, 1.0);
        let rows = (0..n)
            .map(|k| LinearExpr::new(vec![(w[0][k], 1.0), (w[1][k], -1.0)], 0.0))
            .collect();
        p.add_soc(t, rows);
    }
    let sol = solver.solve(&p);
    let x = sol
        .primal
        .ok_or_else(|| Error::Numerical(format!("fixed-path program ended {:?}", sol.status)))?;
    let points = path
        .iter()
        .zip(&xs)
        .map(|(&v, ids)| {
            graph
                .set(v)
                .project(&ids.iter().map(|&j| x[j]).collect::<Vec<_>>())
        })
        .collect();
    Ok(FeasibleSolution::from_points(path.to_vec(), points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcs::{ConvexSet, HeuristicMeta, HeuristicMethod};

    /// s = (0,0), a = segment x=1 from y=−1 to y=1, d = (2,0).
    pub(crate) fn tri() -> GcsGraph {
        let sets = vec![
            ConvexSet::point([0.0, 0.0]),
            ConvexSet::segment([1.0, -1.0], [1.0, 1.0]),
            ConvexSet::point([2.0, 0.0]),
        ];
        GcsGraph::new(2, sets, vec![(0, 1), (1, 2)], 0, 2).unwrap()
    }

    fn vs(ids: &[usize]) -> VertexSet {
        ids.iter().copied().collect()
    }

    fn table(values: Vec<f64>) -> HeuristicTable {
        let meta = HeuristicMeta {
            method: HeuristicMethod::Custom,
            weight: None,
            n_max: None,
            build_millis: 0.0,
        };
        let d = values.len() - 1;
        HeuristicTable::new(values, d, meta).unwrap()
    }

    #[test]
    fn tri_program_shape() {
        let g = tri();
        let h = HeuristicTable::zero(3);
        let (p, map) = build_sppstar(&g, &vs(&[0]), &vs(&[1]), &h).unwrap();
        assert_eq!(map.edges, vec![(0, 1)]);
        assert_eq!(map.alpha.len(), 1);
        // y, z(2), z′(2), t, σ for the segment head, α.
        assert_eq!(p.num_vars(), 1 + 2 + 2 + 1 + 1 + 1);
        assert_eq!(map.sigma, vec![(None, Some(map.t[0] + 1))]);

        let (p2, map2) = build_sppstar(&g, &vs(&[0, 1]), &vs(&[2]), &h).unwrap();
        assert_eq!(map2.edges, vec![(0, 1), (1, 2)]);
        // Σα, source degree, terminal degree, and 1 + 2 conservation rows at a,
        // plus the point and segment perspective rows.
        let conservation_rows = 3;
        let perspective_rows = 2 + 2 + 2 + 2;
        assert_eq!(
            p2.equalities().len(),
            3 + conservation_rows + perspective_rows
        );
    }

    #[test]
    fn singleton_perspective_rows_are_equalities() {
        let sets = (0..3).map(|i| ConvexSet::point([i as f64])).collect();
        let g = GcsGraph::new(1, sets, vec![(0, 1), (1, 2)], 0, 2).unwrap();
        let (p, _) = build_sppstar(&g, &vs(&[0, 1]), &vs(&[2]), &HeuristicTable::zero(3)).unwrap();
        assert!(p.inequalities().is_empty());
        assert_eq!(p.cones().len(), 2);
    }

    #[test]
    fn tri_relaxation_values() {
        let g = tri();
        let solver = ConicSolver::default();
        let r = solve_sppstar(&solver, &g, &vs(&[0]), &vs(&[1]), &HeuristicTable::zero(3)).unwrap();
        assert!((r.objective - 1.0).abs() < 1e-6, "{}", r.objective);

        let r = solve_sppstar(
            &solver,
            &g,
            &vs(&[0, 1]),
            &vs(&[2]),
            &HeuristicTable::zero(3),
        )
        .unwrap();
        assert!((r.objective - 2.0).abs() < 1e-6, "{}", r.objective);
        // x_a = z′_sa / y_sa
        let e = &r.edges[0];
        assert!((e.z_prime[0] / e.y - 1.0).abs() < 1e-5 && (e.z_prime[1] / e.y).abs() < 1e-5);

        let h = table(vec![0.0, 5.0, 0.0]);
        let r = solve_sppstar(&solver, &g, &vs(&[0]), &vs(&[1]), &h).unwrap();
        assert!((r.objective - 6.0).abs() < 1e-6, "{}", r.objective);
        assert!((r.alpha_of(1).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn relaxation_agrees_with_fixed_path_oracle() {
        // Single-terminal relaxations on a chain equal the fixed-path optimum.
        let g = tri();
        let solver = ConicSolver::default();
        let fixed = solve_fixed_path(&solver, &g, &[0, 1]).unwrap();
        let r = solve_sppstar(&solver, &g, &vs(&[0]), &vs(&[1]), &HeuristicTable::zero(3)).unwrap();
        assert!((fixed.cost - r.objective).abs() < 1e-6);
        let fixed = solve_fixed_path(&solver, &g, &[0, 1, 2]).unwrap();
        let r = solve_sppstar(
            &solver,
            &g,
            &vs(&[0, 1]),
            &vs(&[2]),
            &HeuristicTable::zero(3),
        )
        .unwrap();
        assert!((fixed.cost - r.objective).abs() < 1e-6);
    }

    #[test]
    fn reference_backend_agrees_on_tri() {
        let g = tri();
        let r = solve_sppstar(
            &ConicSolver::reference(),
            &g,
            &vs(&[0, 1]),
            &vs(&[2]),
            &HeuristicTable::zero(3),
        )
        .unwrap();
        assert!(r.is_optimal());
        assert!((r.objective - 2.0).abs() < 1e-5, "{}", r.objective);
    }

    #[test]
    fn residuals_within_ten_times_accuracy() {
        let g = tri();
        let solver = ConicSolver::default();
        for (cut, term) in [(vs(&[0]), vs(&[1])), (vs(&[0, 1]), vs(&[2]))] {
            let r = solve_sppstar(&solver, &g, &cut, &term, &HeuristicTable::zero(3)).unwrap();
            assert!(
                r.residuals(&g).max() <= 10.0 * solver.accuracy(),
                "{:?}",
                r.residuals(&g)
            );
        }
    }

    #[test]
    fn unreachable_terminals_are_infeasible() {
        // S = {s, b} where b is not reachable from s; S′ = {c} only fed by b.
        let sets = (0..4).map(|i| ConvexSet::point([i as f64])).collect();
        let g = GcsGraph::new(1, sets, vec![(0, 3), (1, 2), (2, 3)], 0, 3).unwrap();
        let r = solve_sppstar(
            &ConicSolver::default(),
            &g,
            &vs(&[0, 1]),
            &vs(&[2]),
            &HeuristicTable::zero(4),
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert_eq!(r.objective, f64::INFINITY);
    }

    #[test]
    fn input_errors() {
        let g = tri();
        let h = HeuristicTable::zero(3);
        assert!(build_sppstar(&g, &vs(&[1]), &vs(&[2]), &h).is_err());
        assert!(build_sppstar(&g, &vs(&[0]), &vs(&[]), &h).is_err());
        assert!(build_sppstar(&g, &vs(&[0]), &vs(&[2]), &h).is_err());
        assert!(build_sppstar(&g, &vs(&[0]), &vs(&[1]), &HeuristicTable::zero(2)).is_err());
    }

    #[test]
    fn fixed_path_examples() {
        let g = tri();
        let solver = ConicSolver::default();
        let sol = solve_fixed_path(&solver, &g, &[0, 1, 2]).unwrap();
        assert!((sol.cost - 2.0).abs() < 1e-7);
        assert!(distance(&sol.points[1], &[1.0, 0.0]) < 1e-5);
        sol.validate(&g).unwrap();
        let single = solve_fixed_path(&solver, &g, &[0]).unwrap();
        assert_eq!(single.cost, 0.0);
        assert!(solve_fixed_path(&solver, &g, &[0, 2]).is_err());
        assert!(solve_fixed_path(&solver, &g, &[]).is_err());
    }

    /// Brute-force grid search over the box point, then local refinement.
    fn diamond_oracle() -> f64 {
        let f = |x: f64, y: f64| (x * x + y * y).sqrt() + ((3.0 - x).powi(2) + y * y).sqrt();
        let (mut bx, mut by, mut best) = (1.0, 1.0, f64::INFINITY);
        let steps = 1000;
        for i in 0..=steps {
            for j in 0..=steps {
                let x = 1.0 + i as f64 / steps as f64;
                let y = 1.0 + j as f64 / steps as f64;
                if f(x, y) < best {
                    (bx, by, best) = (x, y, f(x, y));
                }
            }
        }
        let mut step = 1e-3;
        while step > 1e-12 {
            let mut improved = false;
            for (dx, dy) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let (x, y) = ((bx + dx).clamp(1.0, 2.0), (by + dy).clamp(1.0, 2.0));
                if f(x, y) < best {
                    (bx, by, best) = (x, y, f(x, y));
                    improved = true;
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        best
    }

    #[test]
    fn fixed_path_matches_grid_oracle_on_diamond() {
        let sets = vec![
            ConvexSet::point([0.0, 0.0]),
            ConvexSet::aabox([1.0, 1.0], [2.0, 2.0]),
            ConvexSet::point([3.0, 0.0]),
        ];
        let g = GcsGraph::new(2, sets, vec![(0, 1), (1, 2)], 0, 2).unwrap();
        let oracle = diamond_oracle();
        let sol = solve_fixed_path(&ConicSolver::default(), &g, &[0, 1, 2]).unwrap();
        assert!((sol.cost - oracle).abs() < 1e-4, "{} vs {oracle}", sol.cost);
    }

    #[test]
    fn json_dump_keys() {
        let g = tri();
        let r = solve_sppstar(
            &ConicSolver::default(),
            &g,
            &vs(&[0, 1]),
            &vs(&[2]),
            &HeuristicTable::zero(3),
        )
        .unwrap();
        let j = r.to_json();
        assert!(j["y"]["0->1"].as_f64().unwrap() > 0.99);
        assert!(j["alpha"]["2"].as_f64().unwrap() > 0.99);
        assert_eq!(j["status"], "optimal");
    }
}
