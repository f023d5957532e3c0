use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{both_ways, cell_center, Instance};
use crate::error::{Error, Result};
use crate::gcs::{ConvexSet, GcsGraph};

/// Carving algorithm tag written into the provenance block.
pub const MAZE_ALGORITHM: &str = "iterative-dfs/chacha8/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MazeParams {
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
    /// `(row, col)` of the origin cell; defaults to the bottom-left cell.
    pub origin: (usize, usize),
    /// Defaults to the top-right cell.
    pub destination: (usize, usize),
}

impl MazeParams {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Self {
        Self {
            rows,
            cols,
            seed,
            origin: (0, 0),
            destination: (rows.saturating_sub(1), cols.saturating_sub(1)),
        }
    }
}

/// Carves a perfect maze by depth-first search and returns the walls that
/// were removed as `(cell, neighbor)` pairs with `cell < neighbor`.
fn carve(rows: usize, cols: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visited = vec![false; rows * cols];
    let mut stack = vec![0usize];
    let mut open = Vec::with_capacity(rows * cols - 1);
    visited[0] = true;
    while let Some(&cell) = stack.last() {
        let (r, c) = (cell / cols, cell % cols);
        let mut next = Vec::with_capacity(4);
        if r + 1 < rows {
            next.push(cell + cols);
        }
        if r > 0 {
            next.push(cell - cols);
        }
        if c + 1 < cols {
            next.push(cell + 1);
        }
        if c > 0 {
            next.push(cell - 1);
        }
        next.retain(|&n| !visited[n]);
        if next.is_empty() {
            stack.pop();
            continue;
        }
        let n = next[rng.gen_range(0..next.len())];
        visited[n] = true;
        open.push((cell.min(n), cell.max(n)));
        stack.push(n);
    }
    open.sort_unstable();
    open
}

/// Maze on the unit grid `[0, cols] × [0, rows]`. Each open wall between two
/// cells is a segment vertex; two walls are joined (both ways) when they
/// bound the same cell. The origin and destination are singletons at their
/// cells' centers with ids `m` and `m + 1`, `m` being the number of walls.
pub fn gen_maze(params: MazeParams) -> Result<Instance> {
    let MazeParams {
        rows,
        cols,
        seed,
        origin,
        destination,
    } = params;
    if rows < 2 || cols < 2 {
        return Err(Error::input(format!(
            "maze needs at least 2x2 cells, got {rows}x{cols}"
        )));
    }
    for (r, c) in [origin, destination] {
        if r >= rows || c >= cols {
            return Err(Error::input(format!("cell ({r}, {c}) is outside the maze")));
        }
    }
    if origin == destination {
        return Err(Error::input("origin and destination cells must differ"));
    }
    let open = carve(rows, cols, seed);
    let mut sets = Vec::with_capacity(open.len() + 2);
    let mut walls_of_cell: Vec<Vec<usize>> = vec![Vec::new(); rows * cols];
    for (id, &(a, b)) in open.iter().enumerate() {
        let (r, c) = ((a / cols) as f64, (a % cols) as f64);
        sets.push(if b == a + 1 {
            ConvexSet::segment([c + 1.0, r], [c + 1.0, r + 1.0])
        } else {
            ConvexSet::segment([c, r + 1.0], [c + 1.0, r + 1.0])
        });
        walls_of_cell[a].push(id);
        walls_of_cell[b].push(id);
    }
    let mut edges = Vec::new();
    for walls in &walls_of_cell {
        for (i, &u) in walls.iter().enumerate() {
            for &v in &walls[i + 1..] {
                both_ways(&mut edges, u, v);
            }
        }
    }
    let m = open.len();
    for (id, (r, c)) in [(m, origin), (m + 1, destination)] {
        sets.push(cell_center(&[c as f64, r as f64]));
        for &w in &walls_of_cell[r * cols + c] {
            both_ways(&mut edges, id, w);
        }
    }
    let graph = GcsGraph::new(2, sets, edges, m, m + 1)?;
    let provenance = json!({
        "generator": "maze",
        "algorithm": MAZE_ALGORITHM,
        "rows": rows,
        "cols": cols,
        "seed": seed,
        "origin_cell": [origin.0, origin.1],
        "destination_cell": [destination.0, destination.1],
    });
    Ok(Instance::with_provenance(graph, provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcs::SetKind;
    use crate::instances::to_json_string;

    #[test]
    fn two_by_two() {
        let inst = gen_maze(MazeParams::new(2, 2, 7)).unwrap();
        let g = &inst.graph;
        assert_eq!(g.num_vertices(), 5);
        assert_eq!(
            g.sets()
                .iter()
                .filter(|s| s.kind() == SetKind::Segment)
                .count(),
            3
        );
        assert_eq!((g.origin(), g.destination()), (3, 4));
        assert_eq!(g.set(3), &ConvexSet::point([0.5, 0.5]));
        assert_eq!(g.set(4), &ConvexSet::point([1.5, 1.5]));
    }

    #[test]
    fn twenty_by_twenty_counts() {
        let g = gen_maze(MazeParams::new(20, 20, 1)).unwrap().graph;
        assert_eq!(
            g.sets()
                .iter()
                .filter(|s| s.kind() == SetKind::Segment)
                .count(),
            399
        );
        assert_eq!(g.num_vertices(), 401);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = to_json_string(&gen_maze(MazeParams::new(6, 5, 3)).unwrap());
        let b = to_json_string(&gen_maze(MazeParams::new(6, 5, 3)).unwrap());
        let c = to_json_string(&gen_maze(MazeParams::new(6, 5, 4)).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn walls_lie_on_cell_boundaries() {
        let g = gen_maze(MazeParams::new(4, 4, 9)).unwrap().graph;
        for (u, v) in g.edges() {
            // Adjacent walls share a cell, so their midpoints are within one cell diagonal.
            let (a, b) = (g.set(*u).centroid().unwrap(), g.set(*v).centroid().unwrap());
            assert!(crate::gcs::distance(&a, &b) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn input_errors() {
        assert!(gen_maze(MazeParams::new(1, 5, 0)).is_err());
        let mut p = MazeParams::new(3, 3, 0);
        p.destination = (0, 0);
        assert!(gen_maze(p).is_err());
        p.destination = (3, 0);
        assert!(gen_maze(p).is_err());
    }
}
