use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{both_ways, cell_center, Instance};
use crate::error::{Error, Result};
use crate::gcs::{ConvexSet, GcsGraph};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VillageParams {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub seed: u64,
    /// Probability that a voxel is free.
    pub free_fraction: f64,
}

impl VillageParams {
    pub fn new(nx: usize, ny: usize, nz: usize, seed: u64) -> Self {
        Self {
            nx,
            ny,
            nz,
            seed,
            free_fraction: 0.7,
        }
    }
}

const MAX_TRIES: u64 = 64;

fn voxel_index(dims: [usize; 3], [x, y, z]: [usize; 3]) -> usize {
    (z * dims[1] + y) * dims[0] + x
}

/// Face-adjacent neighbors with larger coordinates: `(axis, neighbor)`.
fn upper_neighbors(dims: [usize; 3], v: [usize; 3]) -> impl Iterator<Item = (usize, [usize; 3])> {
    (0..3).filter_map(move |axis| {
        let mut w = v;
        w[axis] += 1;
        (w[axis] < dims[axis]).then_some((axis, w))
    })
}

fn all_voxels(dims: [usize; 3]) -> impl Iterator<Item = [usize; 3]> {
    (0..dims[2])
        .flat_map(move |z| (0..dims[1]).flat_map(move |y| (0..dims[0]).map(move |x| [x, y, z])))
}

fn connected(dims: [usize; 3], free: &[bool], from: [usize; 3], to: [usize; 3]) -> bool {
    let mut seen = vec![false; free.len()];
    let mut queue = VecDeque::from([from]);
    seen[voxel_index(dims, from)] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            return true;
        }
        for axis in 0..3 {
            for step in [-1isize, 1] {
                let c = v[axis] as isize + step;
                if c < 0 || c as usize >= dims[axis] {
                    continue;
                }
                let mut w = v;
                w[axis] = c as usize;
                let k = voxel_index(dims, w);
                if free[k] && !seen[k] {
                    seen[k] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    false
}

/// Graph of shared faces between free voxels of the unit grid. A face is a
/// box with one degenerate axis; two faces are joined (both ways) when they
/// bound the same free voxel. Singletons at the origin and destination voxel
/// centers attach to the faces of their voxels.
pub fn village_from_voxels(
    dims: [usize; 3],
    free: &[bool],
    origin: [usize; 3],
    destination: [usize; 3],
) -> Result<GcsGraph> {
    if free.len() != dims.iter().product::<usize>() {
        return Err(Error::input("voxel mask does not match the grid size"));
    }
    for v in [origin, destination] {
        if (0..3).any(|a| v[a] >= dims[a]) || !free[voxel_index(dims, v)] {
            return Err(Error::input(format!(
                "voxel {v:?} is outside the grid or blocked"
            )));
        }
    }
    if origin == destination {
        return Err(Error::input("origin and destination voxels must differ"));
    }
    let mut sets = Vec::new();
    let mut faces_of: Vec<Vec<usize>> = vec![Vec::new(); free.len()];
    for v in all_voxels(dims).filter(|&v| free[voxel_index(dims, v)]) {
        for (axis, w) in upper_neighbors(dims, v) {
            if !free[voxel_index(dims, w)] {
                continue;
            }
            let lo: Vec<f64> = (0..3)
                .map(|a| if a == axis { w[a] } else { v[a] } as f64)
                .collect();
            let hi: Vec<f64> = (0..3)
                .map(|a| if a == axis { lo[a] } else { lo[a] + 1.0 })
                .collect();
            let id = sets.len();
            sets.push(ConvexSet::aabox(lo, hi));
            faces_of[voxel_index(dims, v)].push(id);
            faces_of[voxel_index(dims, w)].push(id);
        }
    }
    let mut edges = Vec::new();
    for faces in &faces_of {
        for (i, &u) in faces.iter().enumerate() {
            for &v in &faces[i + 1..] {
                both_ways(&mut edges, u, v);
            }
        }
    }
    let m = sets.len();
    for (id, v) in [(m, origin), (m + 1, destination)] {
        sets.push(cell_center(&v.map(|c| c as f64)));
        for &f in &faces_of[voxel_index(dims, v)] {
            both_ways(&mut edges, id, f);
        }
    }
    GcsGraph::new(3, sets, edges, m, m + 1)
}

/// Random free/blocked voxels, retried with derived seeds until the origin
/// corner `(0,0,0)` connects to the destination corner `(nx−1, ny−1, nz−1)`.
pub fn gen_village(params: VillageParams) -> Result<Instance> {
    let VillageParams {
        nx,
        ny,
        nz,
        seed,
        free_fraction,
    } = params;
    if nx * ny * nz < 8 {
        return Err(Error::input("village grid needs at least 8 voxels"));
    }
    if !(0.0..=1.0).contains(&free_fraction) {
        return Err(Error::input("free_fraction must lie in [0, 1]"));
    }
    let dims = [nx, ny, nz];
    let origin = [0, 0, 0];
    let destination = [nx - 1, ny - 1, nz - 1];
    for attempt in 0..MAX_TRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let mut free: Vec<bool> = (0..nx * ny * nz)
            .map(|_| rng.gen_bool(free_fraction))
            .collect();
        free[voxel_index(dims, origin)] = true;
        free[voxel_index(dims, destination)] = true;
        if !connected(dims, &free, origin, destination) {
            continue;
        }
        let graph = village_from_voxels(dims, &free, origin, destination)?;
        let provenance = json!({
            "generator": "village",
            "nx": nx,
            "ny": ny,
            "nz": nz,
            "seed": seed,
            "free_fraction": free_fraction,
            "attempt": attempt,
        });
        return Ok(Instance::with_provenance(graph, provenance));
    }
    Err(Error::Generation(format!(
        "no connected voxel layout after {MAX_TRIES} attempts"
    )))
}
