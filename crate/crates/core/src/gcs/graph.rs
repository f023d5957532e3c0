use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::gcs::ConvexSet;

pub type VertexSet = BTreeSet<usize>;

/// Directed graph whose vertices carry convex sets. Vertex ids are the dense
/// indices `0..|V|`.
#[derive(Clone, Debug, PartialEq)]
pub struct GcsGraph {
    dim: usize,
    sets: Vec<ConvexSet>,
    edges: Vec<(usize, usize)>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    origin: usize,
    destination: usize,
}

impl GcsGraph {
    /// Builds and validates a graph: shared dimension, valid sets, known edge
    /// endpoints, no self-loops or duplicate edges, `origin ≠ destination`,
    /// and a directed path from origin to destination.
    pub fn new(
        dim: usize,
        sets: Vec<ConvexSet>,
        edges: Vec<(usize, usize)>,
        origin: usize,
        destination: usize,
    ) -> Result<Self> {
        for (id, set) in sets.iter().enumerate() {
            if set.dim() != dim {
                return Err(Error::invariant(format!(
                    "vertex {id} has dimension {} but graph has {dim}",
                    set.dim()
                )));
            }
            set.validate()
                .map_err(|e| Error::invariant(format!("vertex {id}: {e}")))?;
        }
        let g = Self::assemble(dim, sets, edges, origin, destination)?;
        if !g.reaches(origin, destination) {
            return Err(Error::NoPath {
                from: origin,
                to: destination,
            });
        }
        Ok(g)
    }

    fn assemble(
        dim: usize,
        sets: Vec<ConvexSet>,
        edges: Vec<(usize, usize)>,
        origin: usize,
        destination: usize,
    ) -> Result<Self> {
        let n = sets.len();
        for (what, id) in [("origin", origin), ("destination", destination)] {
            if id >= n {
                return Err(Error::input(format!("{what} {id} is not a vertex")));
            }
        }
        if origin == destination {
            return Err(Error::input("origin and destination must differ"));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (k, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge ({u}, {v}) references a missing vertex"
                )));
            }
            if u == v {
                return Err(Error::input(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u, v)) {
                return Err(Error::input(format!("duplicate edge ({u}, {v})")));
            }
            out_edges[u].push(k);
            in_edges[v].push(k);
        }
        Ok(Self {
            dim,
            sets,
            edges,
            out_edges,
            in_edges,
            origin,
            destination,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.sets.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn sets(&self) -> &[ConvexSet] {
        &self.sets
    }

    pub fn set(&self, v: usize) -> &ConvexSet {
        &self.sets[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    /// Indices of edges leaving `v`.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    /// Indices of edges entering `v`.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges[v].iter().map(move |&k| self.edges[k].1)
    }

    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_edges[v].iter().map(move |&k| self.edges[k].0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_vertices() && self.successors(u).any(|w| w == v)
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn destination(&self) -> usize {
        self.destination
    }

    /// Same vertices and edges with a different origin/destination pair.
    pub fn with_terminals(&self, origin: usize, destination: usize) -> Result<Self> {
        let g = Self::assemble(
            self.dim,
            self.sets.clone(),
            self.edges.clone(),
            origin,
            destination,
        )?;
        if !g.reaches(origin, destination) {
            return Err(Error::NoPath {
                from: origin,
                to: destination,
            });
        }
        Ok(g)
    }

    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.reachable_from(from)[to]
    }

    /// Marks every vertex reachable from `from` along directed edges.
    pub fn reachable_from(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.num_vertices()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            for v in self.successors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Marks every vertex with a directed path to `to`.
    pub fn reaching(&self, to: usize) -> Vec<bool> {
        let mut seen = vec![false; self.num_vertices()];
        let mut queue = VecDeque::from([to]);
        seen[to] = true;
        while let Some(v) = queue.pop_front() {
            for u in self.predecessors(v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    /// Every edge flipped; origin and destination trade places so the result
    /// is again a valid graph and `reverse` is an involution.
    pub fn reverse(&self) -> Self {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (v, u)).collect();
        Self {
            dim: self.dim,
            sets: self.sets.clone(),
            edges,
            out_edges: self.in_edges.clone(),
            in_edges: self.out_edges.clone(),
            origin: self.destination,
            destination: self.origin,
        }
    }

    pub(crate) fn check_ids<'a>(&self, ids: impl IntoIterator<Item = &'a usize>) -> Result<()> {
        for &v in ids {
            if v >= self.num_vertices() {
                return Err(Error::input(format!("unknown vertex id {v}")));
            }
        }
        Ok(())
    }

    /// `N_S = {v ∉ S : (u, v) ∈ E for some u ∈ S}`, ascending.
    pub fn neighborhood(&self, s: &VertexSet) -> Result<VertexSet> {
        self.check_ids(s)?;
        Ok(s.iter()
            .flat_map(|&u| self.successors(u))
            .filter(|v| !s.contains(v))
            .collect())
    }
}

/// A cut-set `S` (origin inside, destination outside) with its neighborhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutState {
    members: VertexSet,
    neighborhood: VertexSet,
}

impl CutState {
    pub fn new(graph: &GcsGraph, members: VertexSet) -> Result<Self> {
        graph.check_ids(&members)?;
        if !members.contains(&graph.origin()) {
            return Err(Error::input("cut-set must contain the origin"));
        }
        if members.contains(&graph.destination()) {
            return Err(Error::input("cut-set must not contain the destination"));
        }
        let neighborhood = graph.neighborhood(&members)?;
        Ok(Self {
            members,
            neighborhood,
        })
    }

    pub fn members(&self) -> &VertexSet {
        &self.members
    }

    pub fn neighborhood(&self) -> &VertexSet {
        &self.neighborhood
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn destination_adjacent(&self, graph: &GcsGraph) -> bool {
        self.neighborhood.contains(&graph.destination())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// s=0, a=1, b=2, d=3 with edges s→a, s→b, a→d.
    pub(crate) fn fork() -> GcsGraph {
        let sets = (0..4).map(|i| ConvexSet::point([i as f64, 0.0])).collect();
        GcsGraph::new(2, sets, vec![(0, 1), (0, 2), (1, 3)], 0, 3).unwrap()
    }

    fn set(ids: &[usize]) -> VertexSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn neighborhood_examples() {
        let g = fork();
        assert_eq!(g.neighborhood(&set(&[0])).unwrap(), set(&[1, 2]));
        assert_eq!(g.neighborhood(&set(&[0, 1])).unwrap(), set(&[2, 3]));
        assert_eq!(g.neighborhood(&set(&[0, 1, 2])).unwrap(), set(&[3]));
        assert!(matches!(g.neighborhood(&set(&[9])), Err(Error::Input(_))));
    }

    #[test]
    fn reverse_examples() {
        let sets = (0..3).map(|i| ConvexSet::point([i as f64])).collect();
        let g = GcsGraph::new(1, sets, vec![(0, 1), (1, 2)], 0, 2).unwrap();
        let r = g.reverse();
        assert_eq!(r.edges(), &[(1, 0), (2, 1)]);
        assert_eq!((r.origin(), r.destination()), (2, 0));
        assert_eq!(r.reverse(), g);
        assert!(r.has_edge(2, 1) && !r.has_edge(1, 2));
    }

    #[test]
    fn reverse_without_edges() {
        let sets = vec![ConvexSet::point([0.0]), ConvexSet::point([1.0])];
        let g = GcsGraph::assemble(1, sets, vec![], 0, 1).unwrap();
        assert!(g.reverse().edges().is_empty());
    }

    #[test]
    fn rejects_malformed_graphs() {
        let pts = || {
            (0..3)
                .map(|i| ConvexSet::point([i as f64]))
                .collect::<Vec<_>>()
        };
        assert!(GcsGraph::new(1, pts(), vec![(0, 1), (1, 2), (0, 1)], 0, 2).is_err());
        assert!(GcsGraph::new(1, pts(), vec![(0, 0), (0, 2)], 0, 2).is_err());
        assert!(GcsGraph::new(1, pts(), vec![(0, 5)], 0, 2).is_err());
        assert!(GcsGraph::new(1, pts(), vec![(0, 1)], 0, 0).is_err());
        assert!(matches!(
            GcsGraph::new(1, pts(), vec![(0, 1)], 0, 2),
            Err(Error::NoPath { .. })
        ));
        let mixed = vec![ConvexSet::point([0.0]), ConvexSet::point([1.0, 1.0])];
        assert!(GcsGraph::new(1, mixed, vec![(0, 1)], 0, 1).is_err());
    }

    #[test]
    fn cut_state_requires_cut_property() {
        let g = fork();
        assert!(CutState::new(&g, set(&[1])).is_err());
        assert!(CutState::new(&g, set(&[0, 3])).is_err());
        let cut = CutState::new(&g, set(&[0, 1])).unwrap();
        assert!(cut.destination_adjacent(&g));
    }
}
