//! Cost-to-go underestimates and classic A* over fixed representative points.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use web_time::Instant;

use crate::conic::ConicSolver;
use crate::error::{Error, Result};
use crate::gcs::{
    distance, set_distance, GcsGraph, HeuristicMeta, HeuristicMethod, HeuristicTable, VertexSet,
};
use crate::relaxation::{extract, RelaxationSpec, Source};

/// Flow above this value counts as "used" when reading relaxed solutions.
pub const EPS_Y: f64 = 1e-6;

/// Default size of the active region in expand-and-freeze.
pub const DEFAULT_N_MAX: usize = 100;

fn elapsed_millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// `h₁(v)`: distance from `X_v` to `X_d`.
pub fn h1_table(graph: &GcsGraph) -> Result<HeuristicTable> {
    let start = Instant::now();
    let xd = graph.set(graph.destination());
    let mut values = Vec::with_capacity(graph.num_vertices());
    for (v, set) in graph.sets().iter().enumerate() {
        values.push(if v == graph.destination() {
            0.0
        } else {
            set_distance(set, xd)?
        });
    }
    let meta = HeuristicMeta {
        method: HeuristicMethod::H1,
        weight: None,
        n_max: None,
        build_millis: 0.0,
    };
    let mut table = HeuristicTable::new(values, graph.destination(), meta)?;
    let meta = HeuristicMeta {
        build_millis: elapsed_millis(start),
        ..table.meta().clone()
    };
    table = table.with_meta(meta);
    Ok(table)
}

/// Expand-and-freeze underestimates, computed on the reversed graph.
///
/// Each round solves a relaxation whose source is the destination (or, once
/// the frozen region has been collapsed, a virtual source entering the
/// region's boundary at the boundary's frozen values) and whose terminals are
/// the not-yet-frozen reverse neighbors, priced at zero. Every terminal that
/// receives flow is frozen at the round's optimum. That optimum lower-bounds
/// the cost-to-go of any vertex outside the frozen region, because a reverse
/// path to such a vertex must leave the region through one of the terminals.
///
/// The active region is collapsed once `n_max` vertices have been frozen
/// since the last collapse. Vertices never reached keep the value 0.
pub fn h2_expand_freeze(
    solver: &ConicSolver,
    graph: &GcsGraph,
    n_max: usize,
) -> Result<HeuristicTable> {
    if n_max < 2 {
        return Err(Error::input("n_max must be at least 2"));
    }
    let start = Instant::now();
    let rev = graph.reverse();
    let d = graph.destination();
    let n = graph.num_vertices();
    let mut h = vec![0.0; n];
    let mut frozen = vec![false; n];
    frozen[d] = true;
    let zero = |_: usize| 0.0;

    // Collapsed region and the vertices frozen since the last collapse.
    let mut collapsed: Option<VertexSet> = None;
    let mut active: VertexSet = [d].into();

    loop {
        let (source, cut) = match &collapsed {
            None => (Source::Vertex(d), active.clone()),
            Some(region) => {
                // Reverse out-edges leaving the region mark its boundary.
                let boundary: VertexSet = region
                    .iter()
                    .copied()
                    .filter(|&b| rev.successors(b).any(|w| !region.contains(&w)))
                    .collect();
                let entries = boundary.iter().map(|&b| (b, h[b])).collect();
                (
                    Source::Virtual(entries),
                    boundary.union(&active).copied().collect(),
                )
            }
        };
        let terminals: VertexSet = rev
            .neighborhood(&cut)?
            .into_iter()
            .filter(|&v| !frozen[v])
            .collect();
        if terminals.is_empty() {
            break;
        }
        let spec = RelaxationSpec {
            graph: &rev,
            source,
            cut: &cut,
            terminals: &terminals,
            terminal_cost: &zero,
        };
        let (program, map) = spec.build();
        let sol = extract(&rev, &cut, &terminals, &program, &map, solver);
        if !sol.is_optimal() {
            return Err(Error::Numerical(format!(
                "expand-and-freeze relaxation ended {:?}",
                sol.status
            )));
        }
        let mut reached: Vec<(usize, f64)> = terminals
            .iter()
            .map(|&v| {
                (
                    v,
                    sol.edges
                        .iter()
                        .filter(|e| e.v == v)
                        .map(|e| e.y)
                        .fold(0.0, f64::max),
                )
            })
            .collect();
        let mut fresh: Vec<usize> = reached
            .iter()
            .filter(|(_, y)| *y > EPS_Y)
            .map(|(v, _)| *v)
            .collect();
        if fresh.is_empty() {
            // The α's sum to one, so this only happens through solver noise.
            reached.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            fresh.push(reached[0].0);
        }
        let value = sol.objective.max(0.0);
        for v in fresh {
            h[v] = value;
            frozen[v] = true;
            active.insert(v);
        }
        let active_size = active.len() + usize::from(collapsed.is_some());
        if active_size >= n_max {
            let region = collapsed.get_or_insert_with(VertexSet::new);
            region.append(&mut active);
        }
    }
    let meta = HeuristicMeta {
        method: HeuristicMethod::H2,
        weight: None,
        n_max: Some(n_max),
        build_millis: elapsed_millis(start),
    };
    HeuristicTable::new(h, d, meta)
}

/// `(1 − w)·h₁ + w·h₂`, pointwise.
pub fn blend(h1: &HeuristicTable, h2: &HeuristicTable, w: f64) -> Result<HeuristicTable> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::input(format!("blend weight {w} outside [0, 1]")));
    }
    if h1.len() != h2.len() {
        return Err(Error::input("heuristic tables cover different vertex sets"));
    }
    let values: Vec<f64> = h1
        .values()
        .iter()
        .zip(h2.values())
        .map(|(a, b)| (1.0 - w) * a + w * b)
        .collect();
    let destination = match (h1.destination(), h2.destination()) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::input(
                "heuristic tables target different destinations",
            ))
        }
        (a, b) => a.or(b),
    };
    let meta = HeuristicMeta {
        method: HeuristicMethod::Blend,
        weight: Some(w),
        n_max: h2.meta().n_max,
        build_millis: h1.meta().build_millis + h2.meta().build_millis,
    };
    HeuristicTable::from_parts(values, destination, meta)
}

#[derive(Clone, Copy, Debug)]
struct Open {
    f: f64,
    g: f64,
    v: usize,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// BinaryHeap is a max-heap; reverse so the smallest (f, g, id) pops first.
impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(other.g.total_cmp(&self.g))
            .then(other.v.cmp(&self.v))
    }
}

/// Result of A* over fixed points.
#[derive(Clone, Debug, PartialEq)]
pub struct AstarResult {
    pub path: Vec<usize>,
    pub cost: f64,
    /// Vertices in the order they were expanded, ending with the destination.
    /// A reopened vertex appears once, at its first expansion.
    pub closed: Vec<usize>,
}

/// A* from origin to destination where vertex `v` sits at `points[v]`.
/// Ties go to lower `f`, then lower `g`, then lower id. Closed vertices are
/// reopened when a cheaper route appears, so admissible but inconsistent
/// heuristics still return an optimal path.
pub fn classic_astar(
    graph: &GcsGraph,
    points: &[Vec<f64>],
    h: &HeuristicTable,
) -> Result<AstarResult> {
    let n = graph.num_vertices();
    if points.len() != n || h.len() != n {
        return Err(Error::input("points and heuristic must cover every vertex"));
    }
    let (s, d) = (graph.origin(), graph.destination());
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut expanded = vec![false; n];
    let mut closed = Vec::new();
    let mut open = BinaryHeap::new();
    g[s] = 0.0;
    open.push(Open {
        f: h.get(s),
        g: 0.0,
        v: s,
    });
    while let Some(Open { g: gu, v: u, .. }) = open.pop() {
        if gu > g[u] {
            continue;
        }
        if !expanded[u] {
            expanded[u] = true;
            closed.push(u);
        }
        if u == d {
            let mut path = vec![d];
            while *path.last().unwrap() != s {
                path.push(parent[*path.last().unwrap()]);
            }
            path.reverse();
            return Ok(AstarResult {
                path,
                cost: g[d],
                closed,
            });
        }
        for v in graph.successors(u) {
            let gv = gu + distance(&points[u], &points[v]);
            if gv < g[v] {
                g[v] = gv;
                parent[v] = u;
                open.push(Open {
                    f: gv + h.get(v),
                    g: gv,
                    v,
                });
            }
        }
    }
    Err(Error::NoPath { from: s, to: d })
}

pub fn centroids(graph: &GcsGraph) -> Result<Vec<Vec<f64>>> {
    graph.sets().iter().map(|x| x.centroid()).collect()
}

/// Closed set of A* on centroids, without the destination.
pub fn sinit_from_astar(graph: &GcsGraph, h: &HeuristicTable) -> Result<VertexSet> {
    let pts = centroids(graph)?;
    let res = classic_astar(graph, &pts, h)?;
    Ok(res
        .closed
        .into_iter()
        .filter(|&v| v != graph.destination())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcs::ConvexSet;

    fn meta() -> HeuristicMeta {
        HeuristicMeta {
            method: HeuristicMethod::Custom,
            weight: None,
            n_max: None,
            build_millis: 0.0,
        }
    }

    /// 1-D chain s=0 at 0, m=1 at 1, d=2 at 3.
    fn chain() -> GcsGraph {
        let sets = vec![
            ConvexSet::point([0.0]),
            ConvexSet::point([1.0]),
            ConvexSet::point([3.0]),
        ];
        GcsGraph::new(1, sets, vec![(0, 1), (1, 2)], 0, 2).unwrap()
    }

    fn tri() -> GcsGraph {
        let sets = vec![
            ConvexSet::point([0.0, 0.0]),
            ConvexSet::segment([1.0, -1.0], [1.0, 1.0]),
            ConvexSet::point([2.0, 0.0]),
        ];
        GcsGraph::new(2, sets, vec![(0, 1), (1, 2)], 0, 2).unwrap()
    }

    #[test]
    fn h1_examples() {
        let h = h1_table(&tri()).unwrap();
        assert!((h.get(0) - 2.0).abs() < 1e-12);
        assert!((h.get(1) - 1.0).abs() < 1e-12);
        assert_eq!(h.get(2), 0.0);

        let sets = vec![
            ConvexSet::aabox([0.0, 0.0], [1.0, 1.0]),
            ConvexSet::point([3.0, 0.5]),
        ];
        let g = GcsGraph::new(2, sets, vec![(0, 1)], 0, 1).unwrap();
        assert!((h1_table(&g).unwrap().get(0) - 2.0).abs() < 1e-12);

        let sets = vec![
            ConvexSet::aabox([0.0, 0.0], [4.0, 1.0]),
            ConvexSet::point([3.0, 0.5]),
        ];
        let g = GcsGraph::new(2, sets, vec![(0, 1)], 0, 1).unwrap();
        assert_eq!(h1_table(&g).unwrap().get(0), 0.0);
    }

    #[test]
    fn h2_on_chain() {
        let solver = ConicSolver::default();
        for n_max in [2, 3, 100] {
            let h = h2_expand_freeze(&solver, &chain(), n_max).unwrap();
            assert!(
                (h.get(1) - 2.0).abs() < 1e-6,
                "n_max {n_max}: {:?}",
                h.values()
            );
            assert!(
                (h.get(0) - 3.0).abs() < 1e-6,
                "n_max {n_max}: {:?}",
                h.values()
            );
            assert_eq!(h.get(2), 0.0);
            assert_eq!(h.meta().n_max, Some(n_max));
        }
        assert!(h2_expand_freeze(&solver, &chain(), 1).is_err());
    }

    #[test]
    fn h2_leaves_unreaching_vertices_at_zero() {
        // Vertex 3 has no path to d.
        let sets = (0..4).map(|i| ConvexSet::point([i as f64])).collect();
        let g = GcsGraph::new(1, sets, vec![(0, 1), (1, 2), (0, 3)], 0, 2).unwrap();
        let h = h2_expand_freeze(&ConicSolver::default(), &g, 100).unwrap();
        assert_eq!(h.get(3), 0.0);
        assert!((h.get(0) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn blend_examples() {
        let h1 = HeuristicTable::new(vec![2.0, 0.0], 1, meta()).unwrap();
        let h2 = HeuristicTable::new(vec![4.0, 0.0], 1, meta()).unwrap();
        assert_eq!(blend(&h1, &h2, 0.0).unwrap().values(), h1.values());
        assert_eq!(blend(&h1, &h2, 1.0).unwrap().values(), h2.values());
        assert_eq!(blend(&h1, &h2, 0.25).unwrap().get(0), 2.5);
        assert!(blend(&h1, &h2, 1.5).is_err());
        assert!(blend(&h1, &h2, -0.1).is_err());
    }

    #[test]
    fn astar_chain_and_tri() {
        let g = chain();
        let pts = centroids(&g).unwrap();
        let r = classic_astar(&g, &pts, &HeuristicTable::zero(3)).unwrap();
        assert_eq!(r.path, vec![0, 1, 2]);
        assert_eq!(r.cost, 3.0);
        assert_eq!(r.closed, vec![0, 1, 2]);
        assert_eq!(
            sinit_from_astar(&g, &HeuristicTable::zero(3)).unwrap(),
            [0, 1].into()
        );

        let g = tri();
        let h = h1_table(&g).unwrap();
        let r = classic_astar(&g, &centroids(&g).unwrap(), &h).unwrap();
        assert_eq!(r.path, vec![0, 1, 2]);
        assert!((r.cost - 2.0).abs() < 1e-12);
        assert_eq!(sinit_from_astar(&g, &h).unwrap(), [0, 1].into());
    }

    #[test]
    fn astar_breaks_ties_toward_lower_id() {
        // Symmetric diamond: s=(0,0), a=(1,1), b=(1,−1), d=(2,0).
        let sets = vec![
            ConvexSet::point([0.0, 0.0]),
            ConvexSet::point([1.0, 1.0]),
            ConvexSet::point([1.0, -1.0]),
            ConvexSet::point([2.0, 0.0]),
        ];
        let g = GcsGraph::new(2, sets, vec![(0, 2), (0, 1), (2, 3), (1, 3)], 0, 3).unwrap();
        let r = classic_astar(&g, &centroids(&g).unwrap(), &HeuristicTable::zero(4)).unwrap();
        assert_eq!(r.path, vec![0, 1, 3]);
    }

    #[test]
    fn astar_reopens_with_inconsistent_heuristic() {
        // s→a→c→d is optimal but h(a) is inflated relative to h(b) so c is
        // first closed through b and must be reopened.
        let sets = vec![
            ConvexSet::point([0.0]),  // s
            ConvexSet::point([1.0]),  // a
            ConvexSet::point([-1.0]), // b
            ConvexSet::point([2.0]),  // c
            ConvexSet::point([3.0]),  // d
        ];
        let edges = vec![(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)];
        let g = GcsGraph::new(1, sets, edges, 0, 4).unwrap();
        let h = HeuristicTable::new(vec![0.0, 2.0, 0.0, 0.0, 0.0], 4, meta()).unwrap();
        let r = classic_astar(&g, &centroids(&g).unwrap(), &h).unwrap();
        assert_eq!(r.path, vec![0, 1, 3, 4]);
        assert!((r.cost - 3.0).abs() < 1e-12);
    }

    #[test]
    fn astar_matches_dijkstra_with_consistent_h() {
        let g = tri();
        let pts = centroids(&g).unwrap();
        let a = classic_astar(&g, &pts, &h1_table(&g).unwrap()).unwrap();
        let b = classic_astar(&g, &pts, &HeuristicTable::zero(3)).unwrap();
        assert!((a.cost - b.cost).abs() < 1e-9);
    }
}
