use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{both_ways, cell_center, Instance};
use crate::error::{Error, Result};
use crate::gcs::{ConvexSet, GcsGraph};

/// A unit-thick bar of `len` cells starting at `(row, col)`, running along
/// increasing columns when `horizontal`, increasing rows otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bar {
    pub row: usize,
    pub col: usize,
    pub len: usize,
    pub horizontal: bool,
}

impl Bar {
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len).map(|k| {
            if self.horizontal {
                (self.row, self.col + k)
            } else {
                (self.row + k, self.col)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BarsParams {
    pub width: usize,
    pub height: usize,
    pub bar_count: usize,
    pub seed: u64,
    /// Longest bar, in cells.
    pub max_len: usize,
}

impl BarsParams {
    pub fn new(width: usize, height: usize, bar_count: usize, seed: u64) -> Self {
        Self {
            width,
            height,
            bar_count,
            seed,
            max_len: 6,
        }
    }
}

/// Builds the graph of a bar layout: one box vertex per covered unit cell,
/// edges both ways between any two cells of the same bar, and singletons at
/// the centers of `origin` and `destination`, attached to their cells.
pub fn bars_from(
    bars: &[Bar],
    origin: (usize, usize),
    destination: (usize, usize),
) -> Result<GcsGraph> {
    let cells: BTreeSet<(usize, usize)> = bars.iter().flat_map(|b| b.cells()).collect();
    let index: BTreeMap<(usize, usize), usize> =
        cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    for cell in [origin, destination] {
        if !index.contains_key(&cell) {
            return Err(Error::input(format!(
                "cell {cell:?} is not covered by any bar"
            )));
        }
    }
    if origin == destination {
        return Err(Error::input("origin and destination cells must differ"));
    }
    let mut sets: Vec<ConvexSet> = cells
        .iter()
        .map(|&(r, c)| ConvexSet::aabox([c as f64, r as f64], [c as f64 + 1.0, r as f64 + 1.0]))
        .collect();
    let mut pairs = BTreeSet::new();
    for bar in bars {
        let ids: Vec<usize> = bar.cells().map(|c| index[&c]).collect();
        for (i, &u) in ids.iter().enumerate() {
            for &v in &ids[i + 1..] {
                pairs.insert((u.min(v), u.max(v)));
            }
        }
    }
    let mut edges = Vec::with_capacity(2 * pairs.len() + 4);
    for (u, v) in pairs {
        both_ways(&mut edges, u, v);
    }
    let m = sets.len();
    for (id, (r, c)) in [(m, origin), (m + 1, destination)] {
        sets.push(cell_center(&[c as f64, r as f64]));
        both_ways(&mut edges, id, index[&(r, c)]);
    }
    GcsGraph::new(2, sets, edges, m, m + 1)
}

/// Random bars on a `width × height` grid. Every bar after the first is
/// placed through a cell already covered, so the union is connected. The
/// origin is the covered cell nearest the bottom-left corner, the destination
/// the one nearest the top-right.
pub fn gen_bars(params: BarsParams) -> Result<Instance> {
    let BarsParams {
        width,
        height,
        bar_count,
        seed,
        max_len,
    } = params;
    if bar_count < 2 {
        return Err(Error::input("bar_count must be at least 2"));
    }
    if width < 2 || height < 2 || max_len < 2 {
        return Err(Error::input("grid and bars must span at least 2 cells"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bars: Vec<Bar> = Vec::with_capacity(bar_count);
    let mut covered: Vec<(usize, usize)> = Vec::new();
    let mut attempts = 0;
    while bars.len() < bar_count {
        attempts += 1;
        if attempts > 100 * bar_count {
            return Err(Error::Generation(format!(
                "could not place {bar_count} bars on a {width}x{height} grid"
            )));
        }
        let horizontal = rng.gen_bool(0.5);
        let span = if horizontal { width } else { height };
        let len = rng.gen_range(2..=max_len.min(span));
        let (ar, ac) = if covered.is_empty() {
            (rng.gen_range(0..height), rng.gen_range(0..width))
        } else {
            covered[rng.gen_range(0..covered.len())]
        };
        // Slide the bar so it still covers the anchor and stays on the grid.
        let along = if horizontal { ac } else { ar };
        let lo = along.saturating_sub(len - 1);
        let hi = along.min(span - len);
        if lo > hi {
            continue;
        }
        let start = rng.gen_range(lo..=hi);
        let bar = if horizontal {
            Bar {
                row: ar,
                col: start,
                len,
                horizontal,
            }
        } else {
            Bar {
                row: start,
                col: ac,
                len,
                horizontal,
            }
        };
        covered.extend(bar.cells());
        bars.push(bar);
    }
    covered.sort_unstable();
    covered.dedup();
    let origin = *covered.iter().min_by_key(|&&(r, c)| (r + c, r)).unwrap();
    let destination = *covered.iter().max_by_key(|&&(r, c)| (r + c, r)).unwrap();
    if origin == destination {
        return Err(Error::Generation("bars cover a single cell".into()));
    }
    let graph = bars_from(&bars, origin, destination)?;
    let provenance = json!({
        "generator": "bars",
        "width": width,
        "height": height,
        "bar_count": bar_count,
        "max_len": max_len,
        "seed": seed,
    });
    Ok(Instance::with_provenance(graph, provenance))
}
