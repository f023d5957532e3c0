//! Graphs of convex sets: the sets, the graph, cut-sets and heuristic tables.

mod graph;
mod set;
mod table;

pub use self::graph::{CutState, GcsGraph, VertexSet};
pub use self::set::{distance, set_distance, ConvexSet, HPolytope, SetKind, DEFAULT_TOL};
pub use self::table::{HeuristicMeta, HeuristicMethod, HeuristicTable};
