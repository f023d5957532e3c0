use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::Instance;
use crate::gcs::{ConvexSet, GcsGraph};

const MAX_VERTICES: usize = 9;
const MAX_EDGES: usize = 20;

fn random_point<R: Rng>(rng: &mut R) -> [f64; 2] {
    [rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)]
}

fn random_set<R: Rng>(rng: &mut R, singleton: bool) -> ConvexSet {
    let p = random_point(rng);
    if singleton {
        return ConvexSet::point(p);
    }
    match rng.gen_range(0..3) {
        0 => ConvexSet::point(p),
        1 => {
            let q = [
                p[0] + rng.gen_range(-2.0..2.0),
                p[1] + rng.gen_range(-2.0..2.0),
            ];
            ConvexSet::segment(p, q)
        }
        _ => {
            let hi = [
                p[0] + rng.gen_range(0.2..2.0),
                p[1] + rng.gen_range(0.2..2.0),
            ];
            ConvexSet::aabox(p, hi)
        }
    }
}

fn random_graph(seed: u64, singleton: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=MAX_VERTICES);
    let sets: Vec<ConvexSet> = (0..n).map(|_| random_set(&mut rng, singleton)).collect();
    let (s, d) = (0, n - 1);

    // A random chain s → … → d guarantees reachability.
    let mut middle: Vec<usize> = (1..n - 1).collect();
    middle.shuffle(&mut rng);
    middle.truncate(rng.gen_range(0..=middle.len()));
    let mut chain = vec![s];
    chain.extend(middle);
    chain.push(d);
    let mut edges: Vec<(usize, usize)> = chain.windows(2).map(|w| (w[0], w[1])).collect();

    let target = rng.gen_range(edges.len()..=MAX_EDGES.min(n * (n - 1)));
    let mut guard = 0;
    while edges.len() < target && guard < 1000 {
        guard += 1;
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && !edges.contains(&(u, v)) {
            edges.push((u, v));
        }
    }
    let graph =
        GcsGraph::new(2, sets, edges, s, d).expect("random instance is valid by construction");
    let provenance = json!({
        "generator": if singleton { "random-singleton" } else { "random-small" },
        "seed": seed,
    });
    Instance::with_provenance(graph, provenance)
}

/// At most 9 vertices and 20 edges in the plane, mixing points, segments and
/// boxes. Small enough for exhaustive path enumeration.
pub fn random_small_instance(seed: u64) -> Instance {
    random_graph(seed, false)
}

/// Same shape as `random_small_instance`, but every set is a point.
pub fn random_singleton_instance(seed: u64) -> Instance {
    random_graph(seed, true)
}
