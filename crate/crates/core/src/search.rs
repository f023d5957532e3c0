//! The A*-GCS driver: grow a cut-set under heuristic guidance, certify lower
//! bounds with relaxations, and round relaxed flows into feasible paths.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::conic::{ConicSolver, SolveStatus};
use crate::error::{Error, Result};
use crate::gcs::{CutState, GcsGraph, HeuristicTable, VertexSet};
use crate::heuristics::{centroids, classic_astar, h1_table, EPS_Y};
use crate::relaxation::{solve_fixed_path, solve_sppstar, FeasibleSolution, RelaxedSolution};

/// Slack in the Phase-2 break test `R*(S, S′) ≥ R*(S, {d})`.
pub const BREAK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rounding {
    /// Follow the largest flow out of each vertex.
    pub greedy: bool,
    /// Random walks choosing edges with probability proportional to flow.
    pub samples: usize,
}

impl Default for Rounding {
    fn default() -> Self {
        Self {
            greedy: true,
            samples: 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub eps_y: f64,
    /// Stop after this many iterations with a partial result.
    pub max_iters: Option<usize>,
    pub rounding: Rounding,
    pub seed: u64,
    pub solver: ConicSolver,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            eps_y: EPS_Y,
            max_iters: None,
            rounding: Rounding::default(),
            seed: 0,
            solver: ConicSolver::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Phase {
    pub fn number(self) -> u8 {
        match self {
            Phase::One => 1,
            Phase::Two => 2,
        }
    }
}

/// Relaxation values at one cut-set. Consecutive records have strictly
/// growing `s_size`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub phase: Phase,
    pub s_size: usize,
    pub sprime_size: usize,
    /// `R*(S, N_S)` in Phase 1, `R*(S, N_S ∖ {d})` in Phase 2.
    pub r_star_frontier: Option<f64>,
    pub r_star_dest: Option<f64>,
    pub c_lb: f64,
    pub c_f: Option<f64>,
    /// Time since the start of the run.
    pub millis: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    BoundTest,
    FrontierExhausted,
    IterationCap,
    Preempted,
    SolverFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub c_lb: f64,
    pub best_feasible: Option<FeasibleSolution>,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
    /// Loop bodies executed across both phases.
    pub iterations: usize,
    pub final_cut: VertexSet,
    pub millis: f64,
}

impl RunResult {
    pub fn upper_bound(&self) -> Option<f64> {
        self.best_feasible.as_ref().map(|f| f.cost)
    }

    pub fn gap(&self) -> Result<f64> {
        let ub = self.upper_bound().ok_or(Error::UndefinedGap(self.c_lb))?;
        optimality_gap(ub, self.c_lb)
    }
}

/// `S ∪ {v ∈ S′ : y*_uv > ε_y for some u ∈ S}`.
pub fn update_subset(
    cut: &VertexSet,
    terminals: &VertexSet,
    sol: &RelaxedSolution,
    eps_y: f64,
) -> Result<VertexSet> {
    let mut grown = cut.clone();
    let mut added = false;
    for e in &sol.edges {
        if cut.contains(&e.u) && terminals.contains(&e.v) && e.y > eps_y {
            added |= grown.insert(e.v);
        }
    }
    if !added {
        return Err(Error::Consistency(format!(
            "no terminal carries flow above {eps_y} although R* = {}",
            sol.objective
        )));
    }
    Ok(grown)
}

/// Flow-guided walk from the origin. Edges at or below `EPS_Y` are ignored.
fn walk<R: Rng>(
    graph: &GcsGraph,
    sol: &RelaxedSolution,
    rng: Option<&mut R>,
) -> Option<Vec<usize>> {
    let mut out: Vec<Vec<(usize, f64)>> = vec![Vec::new(); graph.num_vertices()];
    for e in sol.edges.iter().filter(|e| e.y > EPS_Y) {
        out[e.u].push((e.v, e.y));
    }
    let mut rng = rng;
    let mut visited = vec![false; graph.num_vertices()];
    let mut path = vec![graph.origin()];
    visited[graph.origin()] = true;
    while *path.last().unwrap() != graph.destination() {
        let u = *path.last().unwrap();
        let choices: Vec<(usize, f64)> = out[u]
            .iter()
            .copied()
            .filter(|(v, _)| !visited[*v])
            .collect();
        if choices.is_empty() {
            return None;
        }
        let next = match rng.as_deref_mut() {
            None => {
                choices
                    .iter()
                    .copied()
                    .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                    .unwrap()
                    .0
            }
            Some(rng) => {
                let total: f64 = choices.iter().map(|c| c.1).sum();
                let mut r = rng.gen::<f64>() * total;
                let mut pick = choices[choices.len() - 1].0;
                for &(v, y) in &choices {
                    if r < y {
                        pick = v;
                        break;
                    }
                    r -= y;
                }
                pick
            }
        };
        visited[next] = true;
        path.push(next);
    }
    Some(path)
}

/// Rounds a relaxed solution on `(S, {d})` into a feasible path; the
/// cheapest completed walk wins, `None` if no walk reaches `d`.
pub fn extract_feasible<R: Rng>(
    solver: &ConicSolver,
    graph: &GcsGraph,
    sol: &RelaxedSolution,
    rounding: Rounding,
    rng: &mut R,
) -> Result<Option<FeasibleSolution>> {
    if !sol.is_optimal() {
        return Ok(None);
    }
    let mut paths = BTreeSet::new();
    if rounding.greedy {
        paths.extend(walk::<R>(graph, sol, None));
    }
    for _ in 0..rounding.samples {
        paths.extend(walk(graph, sol, Some(&mut *rng)));
    }
    let mut best = None;
    for path in paths {
        best = update_feasible(best, Some(solve_fixed_path(solver, graph, &path)?));
    }
    Ok(best)
}

/// The cheaper of the two; a missing solution counts as `+∞`.
pub fn update_feasible(
    current: Option<FeasibleSolution>,
    candidate: Option<FeasibleSolution>,
) -> Option<FeasibleSolution> {
    match (current, candidate) {
        (Some(c), Some(n)) => Some(if n.cost < c.cost { n } else { c }),
        (c, n) => c.or(n),
    }
}

/// A* on centroids picks the path, a fixed-path program places the points.
/// The centroid placement itself is feasible and is kept if the solver's
/// answer comes out longer.
pub fn two_step_feasible(
    solver: &ConicSolver,
    graph: &GcsGraph,
    h: &HeuristicTable,
) -> Result<FeasibleSolution> {
    let pts = centroids(graph)?;
    let res = classic_astar(graph, &pts, h)?;
    let on_centroids = FeasibleSolution::from_points(
        res.path.clone(),
        res.path.iter().map(|&v| pts[v].clone()).collect(),
    );
    let placed = solve_fixed_path(solver, graph, &res.path)?;
    Ok(update_feasible(Some(on_centroids), Some(placed)).expect("both candidates exist"))
}

/// `100·(C_f − C_lb)/C_lb`, with `|C_f − C_lb| ≤ 1e−9` reported as 0.
pub fn optimality_gap(c_f: f64, c_lb: f64) -> Result<f64> {
    if !(c_lb > 0.0) || !c_lb.is_finite() {
        return Err(Error::UndefinedGap(c_lb));
    }
    if (c_f - c_lb).abs() <= 1e-9 {
        return Ok(0.0);
    }
    Ok(100.0 * (c_f - c_lb) / c_lb)
}

struct Run<'a, R> {
    graph: &'a GcsGraph,
    h: &'a HeuristicTable,
    opts: &'a SearchOptions,
    rng: R,
    start: Instant,
    c_lb: f64,
    best: Option<FeasibleSolution>,
    trace: Vec<IterationRecord>,
}

impl<R: Rng> Run<'_, R> {
    fn relax(
        &self,
        cut: &VertexSet,
        terminals: &VertexSet,
    ) -> Result<std::result::Result<RelaxedSolution, String>> {
        let sol = solve_sppstar(&self.opts.solver, self.graph, cut, terminals, self.h)?;
        Ok(match sol.status {
            SolveStatus::NumericalFailure => {
                Err(format!("relaxation on |S| = {} failed", cut.len()))
            }
            _ => Ok(sol),
        })
    }

    fn absorb(&mut self, sol: &RelaxedSolution) -> Result<()> {
        let cand = extract_feasible(
            &self.opts.solver,
            self.graph,
            sol,
            self.opts.rounding,
            &mut self.rng,
        )?;
        self.best = update_feasible(self.best.take(), cand);
        Ok(())
    }

    fn record(
        &mut self,
        phase: Phase,
        s_size: usize,
        sprime_size: usize,
        frontier: Option<f64>,
        dest: Option<f64>,
    ) {
        self.trace.push(IterationRecord {
            phase,
            s_size,
            sprime_size,
            r_star_frontier: frontier,
            r_star_dest: dest,
            c_lb: self.c_lb,
            c_f: self.best.as_ref().map(|f| f.cost),
            millis: self.start.elapsed().as_secs_f64() * 1e3,
        });
    }

    fn finish(self, termination: Termination, iterations: usize, cut: VertexSet) -> RunResult {
        RunResult {
            c_lb: self.c_lb,
            best_feasible: self.best,
            millis: self.start.elapsed().as_secs_f64() * 1e3,
            trace: self.trace,
            termination,
            iterations,
            final_cut: cut,
        }
    }
}

/// Runs A*-GCS from `s_init`. Infeasible relaxations count as `R* = +∞`; a
/// backend failure ends the run early with whatever has been certified.
pub fn run_astar_gcs(
    graph: &GcsGraph,
    h: &HeuristicTable,
    s_init: &VertexSet,
    opts: &SearchOptions,
) -> Result<RunResult> {
    let state = CutState::new(graph, s_init.clone())?;
    if h.len() != graph.num_vertices() {
        return Err(Error::input("heuristic does not cover the graph"));
    }
    if opts.max_iters == Some(0) {
        return Err(Error::input("max_iters must be at least 1"));
    }
    let d = graph.destination();
    let only_d: VertexSet = [d].into();
    let mut run = Run {
        graph,
        h,
        opts,
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        start: Instant::now(),
        c_lb: 0.0,
        best: None,
        trace: Vec::new(),
    };
    run.best = Some(two_step_feasible(&opts.solver, graph, h)?);

    let mut cut = state.members().clone();
    let mut nbhd = state.neighborhood().clone();
    let mut iters = 0usize;
    let cap_hit = |iters: usize| opts.max_iters.is_some_and(|m| iters >= m);
    let limit = graph.num_vertices() - 1;

    macro_rules! bail {
        ($term:expr) => {
            return Ok(run.finish($term, iters, cut))
        };
    }

    // Phase 1
    while !nbhd.contains(&d) {
        if cap_hit(iters) {
            bail!(Termination::Preempted);
        }
        if iters >= limit {
            bail!(Termination::IterationCap);
        }
        iters += 1;
        let sol = match run.relax(&cut, &nbhd)? {
            Ok(sol) => sol,
            Err(_) => bail!(Termination::SolverFailure),
        };
        if sol.objective.is_finite() {
            run.c_lb = run.c_lb.max(sol.objective);
        }
        run.record(Phase::One, cut.len(), nbhd.len(), Some(sol.objective), None);
        cut = update_subset(&cut, &nbhd, &sol, opts.eps_y)?;
        nbhd = graph.neighborhood(&cut)?;
    }

    // Phase 2
    let mut dest = match run.relax(&cut, &only_d)? {
        Ok(sol) => sol,
        Err(_) => bail!(Termination::SolverFailure),
    };
    run.absorb(&dest)?;
    let mut termination = Termination::FrontierExhausted;
    while nbhd != only_d {
        if cap_hit(iters) {
            termination = Termination::Preempted;
            break;
        }
        if iters >= limit {
            termination = Termination::IterationCap;
            break;
        }
        iters += 1;
        let frontier: VertexSet = nbhd.iter().copied().filter(|&v| v != d).collect();
        let sol = match run.relax(&cut, &frontier)? {
            Ok(sol) => sol,
            Err(_) => bail!(Termination::SolverFailure),
        };
        let bound = sol.objective.min(dest.objective);
        if bound.is_finite() {
            run.c_lb = run.c_lb.max(bound);
        }
        run.record(
            Phase::Two,
            cut.len(),
            frontier.len(),
            Some(sol.objective),
            Some(dest.objective),
        );
        if sol.objective >= dest.objective - BREAK_TOL {
            return Ok(run.finish(Termination::BoundTest, iters, cut));
        }
        cut = update_subset(&cut, &frontier, &sol, opts.eps_y)?;
        nbhd = graph.neighborhood(&cut)?;
        dest = match run.relax(&cut, &only_d)? {
            Ok(sol) => sol,
            Err(_) => bail!(Termination::SolverFailure),
        };
        run.absorb(&dest)?;
    }
    // With N_S = {d} every path leaves S straight into d, so R*(S, {d}) is a
    // bound on its own.
    if nbhd == only_d && dest.objective.is_finite() {
        run.c_lb = run.c_lb.max(dest.objective);
    }
    let sprime = nbhd.len() - 1;
    run.record(Phase::Two, cut.len(), sprime, None, Some(dest.objective));
    Ok(run.finish(termination, iters, cut))
}

/// One relaxation on `S = V ∖ {d}`, `S′ = {d}`, rounded and compared with the
/// two-step solution.
pub fn run_baseline(graph: &GcsGraph, opts: &SearchOptions) -> Result<RunResult> {
    let start = Instant::now();
    let d = graph.destination();
    let cut: VertexSet = (0..graph.num_vertices()).filter(|&v| v != d).collect();
    let zero = HeuristicTable::zero(graph.num_vertices());
    let sol = solve_sppstar(&opts.solver, graph, &cut, &[d].into(), &zero)?;
    if sol.status == SolveStatus::NumericalFailure {
        return Err(Error::Numerical("baseline relaxation failed".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let h1 = h1_table(graph)?;
    let mut best = Some(two_step_feasible(&opts.solver, graph, &h1)?);
    best = update_feasible(
        best,
        extract_feasible(&opts.solver, graph, &sol, opts.rounding, &mut rng)?,
    );
    let c_lb = if sol.objective.is_finite() {
        sol.objective
    } else {
        0.0
    };
    let millis = start.elapsed().as_secs_f64() * 1e3;
    let record = IterationRecord {
        phase: Phase::Two,
        s_size: cut.len(),
        sprime_size: 1,
        r_star_frontier: None,
        r_star_dest: Some(sol.objective),
        c_lb,
        c_f: best.as_ref().map(|f| f.cost),
        millis,
    };
    Ok(RunResult {
        c_lb,
        best_feasible: best,
        trace: vec![record],
        termination: Termination::FrontierExhausted,
        iterations: 1,
        final_cut: cut,
        millis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcs::ConvexSet;
    use crate::relaxation::EdgeFlow;

    fn tri() -> GcsGraph {
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

    fn flows(edges: &[(usize, usize, f64)]) -> RelaxedSolution {
        RelaxedSolution {
            status: SolveStatus::Optimal,
            objective: 1.0,
            cut: vs(&[0]),
            terminals: VertexSet::new(),
            edges: edges
                .iter()
                .map(|&(u, v, y)| EdgeFlow {
                    u,
                    v,
                    y,
                    z: vec![],
                    z_prime: vec![],
                })
                .collect(),
            alpha: vec![],
            solve_millis: 0.0,
        }
    }

    #[test]
    fn update_subset_examples() {
        let sol = flows(&[(0, 1, 0.7), (0, 2, 0.3), (0, 3, 0.0)]);
        assert_eq!(
            update_subset(&vs(&[0]), &vs(&[1, 2, 3]), &sol, EPS_Y).unwrap(),
            vs(&[0, 1, 2])
        );
        let sol = flows(&[(0, 1, 1.0)]);
        assert_eq!(
            update_subset(&vs(&[0]), &vs(&[1]), &sol, EPS_Y).unwrap(),
            vs(&[0, 1])
        );
        let sol = flows(&[(0, 1, 5e-7)]);
        assert!(matches!(
            update_subset(&vs(&[0]), &vs(&[1]), &sol, EPS_Y),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn update_feasible_examples() {
        let f = |c: f64| {
            Some(FeasibleSolution {
                path: vec![0],
                points: vec![vec![0.0]],
                cost: c,
            })
        };
        assert_eq!(update_feasible(f(5.0), f(4.0)).unwrap().cost, 4.0);
        assert_eq!(update_feasible(None, f(7.0)).unwrap().cost, 7.0);
        assert_eq!(update_feasible(f(3.0), None).unwrap().cost, 3.0);
    }

    #[test]
    fn gap_examples() {
        assert!((optimality_gap(11.0, 10.0).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(optimality_gap(10.0, 10.0).unwrap(), 0.0);
        assert!(matches!(
            optimality_gap(1.0, 0.0),
            Err(Error::UndefinedGap(_))
        ));
    }

    #[test]
    fn greedy_follows_largest_flow() {
        // s→a 0.6, s→b 0.4, both continuing to d.
        let sets = (0..4).map(|i| ConvexSet::point([i as f64, 0.0])).collect();
        let g = GcsGraph::new(2, sets, vec![(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3).unwrap();
        let sol = flows(&[(0, 1, 0.6), (0, 2, 0.4), (1, 3, 0.6), (2, 3, 0.4)]);
        assert_eq!(walk::<ChaCha8Rng>(&g, &sol, None), Some(vec![0, 1, 3]));
        let dead = flows(&[(0, 1, 0.6), (0, 2, 0.4), (2, 3, 0.4)]);
        assert_eq!(walk::<ChaCha8Rng>(&g, &dead, None), None);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = extract_feasible(
            &ConicSolver::default(),
            &g,
            &dead,
            Rounding {
                greedy: true,
                samples: 0,
            },
            &mut rng,
        );
        assert_eq!(r.unwrap(), None);
        let r = extract_feasible(
            &ConicSolver::default(),
            &g,
            &dead,
            Rounding {
                greedy: false,
                samples: 8,
            },
            &mut rng,
        );
        assert_eq!(r.unwrap().unwrap().path, vec![0, 2, 3]);
    }

    #[test]
    fn tri_run_from_origin() {
        let g = tri();
        let res = run_astar_gcs(
            &g,
            &HeuristicTable::zero(3),
            &vs(&[0]),
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(res.trace[0].phase, Phase::One);
        assert!((res.trace[0].r_star_frontier.unwrap() - 1.0).abs() < 1e-6);
        assert!((res.c_lb - 2.0).abs() < 1e-6);
        assert!((res.upper_bound().unwrap() - 2.0).abs() < 1e-7);
        assert_eq!(res.termination, Termination::FrontierExhausted);
        assert_eq!(res.final_cut, vs(&[0, 1]));
        assert!(res.gap().unwrap().abs() < 1e-4);
        assert!(res.iterations <= g.num_vertices() - 1);
    }

    #[test]
    fn two_step_improves_on_centroids() {
        let g = tri();
        let sol = two_step_feasible(&ConicSolver::default(), &g, &HeuristicTable::zero(3)).unwrap();
        assert!((sol.cost - 2.0).abs() < 1e-7);
        // Segment from (1,0) to (1,2): centroid (1,1) gives 2√2, optimum 2.
        let sets = vec![
            ConvexSet::point([0.0, 0.0]),
            ConvexSet::segment([1.0, 0.0], [1.0, 2.0]),
            ConvexSet::point([2.0, 0.0]),
        ];
        let g = GcsGraph::new(2, sets, vec![(0, 1), (1, 2)], 0, 2).unwrap();
        let sol = two_step_feasible(&ConicSolver::default(), &g, &HeuristicTable::zero(3)).unwrap();
        assert!((sol.cost - 2.0).abs() < 1e-6);
        assert!(sol.cost < 2.0 * 2f64.sqrt());
    }

    #[test]
    fn preemption_returns_partial_result() {
        // A long chain forces several Phase-1 iterations from {s}.
        let sets = (0..6).map(|i| ConvexSet::point([i as f64])).collect();
        let edges = (0..5).map(|i| (i, i + 1)).collect();
        let g = GcsGraph::new(1, sets, edges, 0, 5).unwrap();
        let opts = SearchOptions {
            max_iters: Some(2),
            ..Default::default()
        };
        let res = run_astar_gcs(&g, &HeuristicTable::zero(6), &vs(&[0]), &opts).unwrap();
        assert_eq!(res.termination, Termination::Preempted);
        assert_eq!(res.iterations, 2);
        assert_eq!(res.trace.len(), 2);
        assert!(res.c_lb <= 5.0 + 1e-6);

        let full = run_astar_gcs(
            &g,
            &HeuristicTable::zero(6),
            &vs(&[0]),
            &SearchOptions::default(),
        )
        .unwrap();
        assert!((full.c_lb - 5.0).abs() < 1e-6);
        assert!(full.iterations <= 5);
        assert!(full.trace.windows(2).all(|w| w[0].s_size < w[1].s_size));
    }

    #[test]
    fn baseline_on_tri() {
        let res = run_baseline(&tri(), &SearchOptions::default()).unwrap();
        assert!((res.c_lb - 2.0).abs() < 1e-6);
        assert_eq!(res.trace.len(), 1);
        assert_eq!(res.trace[0].s_size, 2);
    }

    #[test]
    fn rejects_bad_sinit() {
        let g = tri();
        let h = HeuristicTable::zero(3);
        assert!(run_astar_gcs(&g, &h, &vs(&[1]), &SearchOptions::default()).is_err());
        assert!(run_astar_gcs(&g, &h, &vs(&[0, 2]), &SearchOptions::default()).is_err());
        let opts = SearchOptions {
            max_iters: Some(0),
            ..Default::default()
        };
        assert!(run_astar_gcs(&g, &h, &vs(&[0]), &opts).is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let g = tri();
        let h = HeuristicTable::zero(3);
        let strip = |r: RunResult| {
            r.trace
                .into_iter()
                .map(|t| IterationRecord { millis: 0.0, ..t })
                .collect::<Vec<_>>()
        };
        let a = run_astar_gcs(&g, &h, &vs(&[0]), &SearchOptions::default()).unwrap();
        let b = run_astar_gcs(&g, &h, &vs(&[0]), &SearchOptions::default()).unwrap();
        assert_eq!(strip(a), strip(b));
    }
}
