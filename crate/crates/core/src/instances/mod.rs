//! Instance generators and the JSON instance format.

mod bars;
mod maze;
mod random;
mod village;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::gcs::{ConvexSet, GcsGraph, HPolytope};

pub use self::bars::{bars_from, gen_bars, Bar, BarsParams};
pub use self::maze::{gen_maze, MazeParams};
pub use self::random::{random_singleton_instance, random_small_instance};
pub use self::village::{gen_village, village_from_voxels, VillageParams};

/// A graph plus the generator parameters that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub graph: GcsGraph,
    pub provenance: Option<Map<String, Value>>,
}

impl Instance {
    pub fn new(graph: GcsGraph) -> Self {
        Self {
            graph,
            provenance: None,
        }
    }

    pub fn with_provenance(graph: GcsGraph, provenance: Value) -> Self {
        let provenance = match provenance {
            Value::Object(m) => Some(m),
            _ => None,
        };
        Self { graph, provenance }
    }
}

#[derive(Serialize, Deserialize)]
struct RawBbox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawSet {
    Point {
        p: Vec<f64>,
    },
    Segment {
        a: Vec<f64>,
        b: Vec<f64>,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Hpolytope {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bbox: Option<RawBbox>,
    },
}

#[derive(Serialize, Deserialize)]
struct RawVertex {
    id: usize,
    set: RawSet,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    dimension: usize,
    vertices: Vec<RawVertex>,
    edges: Vec<(usize, usize)>,
    origin: usize,
    destination: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Map<String, Value>>,
}

fn to_raw(set: &ConvexSet) -> RawSet {
    match set {
        ConvexSet::Point { p } => RawSet::Point { p: p.clone() },
        ConvexSet::Segment { a, b } => RawSet::Segment {
            a: a.clone(),
            b: b.clone(),
        },
        ConvexSet::Box { lo, hi } => RawSet::Box {
            lo: lo.clone(),
            hi: hi.clone(),
        },
        ConvexSet::HPolytope(h) => {
            let (lo, hi) = h.bbox();
            RawSet::Hpolytope {
                a: h.rows().to_vec(),
                b: h.offsets().to_vec(),
                bbox: Some(RawBbox {
                    lo: lo.to_vec(),
                    hi: hi.to_vec(),
                }),
            }
        }
    }
}

fn from_raw(id: usize, raw: RawSet) -> Result<ConvexSet> {
    Ok(match raw {
        RawSet::Point { p } => ConvexSet::Point { p },
        RawSet::Segment { a, b } => ConvexSet::Segment { a, b },
        RawSet::Box { lo, hi } => ConvexSet::Box { lo, hi },
        RawSet::Hpolytope { a, b, bbox } => {
            let bbox = bbox.ok_or_else(|| {
                Error::invariant(format!("vertex {id}: hpolytope requires a \"bbox\""))
            })?;
            ConvexSet::HPolytope(HPolytope::new(a, b, bbox.lo, bbox.hi)?)
        }
    })
}

/// Canonical JSON text: pretty-printed, fields in schema order, trailing newline.
pub fn to_json_string(instance: &Instance) -> String {
    let g = &instance.graph;
    let raw = RawInstance {
        dimension: g.dim(),
        vertices: g
            .sets()
            .iter()
            .enumerate()
            .map(|(id, s)| RawVertex { id, set: to_raw(s) })
            .collect(),
        edges: g.edges().to_vec(),
        origin: g.origin(),
        destination: g.destination(),
        provenance: instance.provenance.clone(),
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("instance serializes");
    text.push('\n');
    text
}

/// Parses and validates an instance. Vertex ids must be exactly `0..|V|`.
pub fn from_json_str(text: &str) -> Result<Instance> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = raw.vertices.len();
    let mut sets: Vec<Option<ConvexSet>> = vec![None; n];
    for v in raw.vertices {
        if v.id >= n || sets[v.id].is_some() {
            return Err(Error::Parse(format!(
                "vertex ids must be 0..{n} without repeats; found {}",
                v.id
            )));
        }
        sets[v.id] = Some(from_raw(v.id, v.set)?);
    }
    let sets = sets
        .into_iter()
        .map(|s| s.expect("every id filled"))
        .collect();
    let graph = GcsGraph::new(raw.dimension, sets, raw.edges, raw.origin, raw.destination)?;
    Ok(Instance {
        graph,
        provenance: raw.provenance,
    })
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json_string(instance))?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    from_json_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Singleton vertex at the centroid of an axis-aligned cell.
pub(crate) fn cell_center(lo: &[f64]) -> ConvexSet {
    ConvexSet::point(lo.iter().map(|x| x + 0.5).collect::<Vec<_>>())
}

/// Pushes `(u, v)` and `(v, u)`.
pub(crate) fn both_ways(edges: &mut Vec<(usize, usize)>, u: usize, v: usize) {
    edges.push((u, v));
    edges.push((v, u));
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn tri() -> Instance {
        let sets = vec![
            ConvexSet::point([0.0, 0.0]),
            ConvexSet::segment([1.0, -1.0], [1.0, 1.0]),
            ConvexSet::HPolytope(
                HPolytope::new(
                    vec![vec![1.0, 1.0]],
                    vec![3.0],
                    vec![1.5, -0.5],
                    vec![2.5, 0.5],
                )
                .unwrap(),
            ),
            ConvexSet::point([2.0, 0.0]),
        ];
        let g = GcsGraph::new(2, sets, vec![(0, 1), (1, 3), (0, 2), (2, 3)], 0, 3).unwrap();
        Instance::with_provenance(g, json!({"generator": "hand"}))
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let text = to_json_string(&tri());
        let back = from_json_str(&text).unwrap();
        assert_eq!(back, tri());
        assert_eq!(to_json_string(&back), text);
    }

    #[test]
    fn missing_key_is_named() {
        let mut v: Value = serde_json::from_str(&to_json_string(&tri())).unwrap();
        v.as_object_mut().unwrap().remove("destination");
        let err = from_json_str(&v.to_string()).unwrap_err();
        assert!(
            matches!(&err, Error::Parse(m) if m.contains("destination")),
            "{err}"
        );
    }

    #[test]
    fn hpolytope_needs_bbox() {
        let mut v: Value = serde_json::from_str(&to_json_string(&tri())).unwrap();
        v["vertices"][2]["set"]
            .as_object_mut()
            .unwrap()
            .remove("bbox");
        assert!(matches!(
            from_json_str(&v.to_string()),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn rejects_sparse_ids_and_invalid_graphs() {
        let mut v: Value = serde_json::from_str(&to_json_string(&tri())).unwrap();
        v["vertices"][1]["id"] = json!(7);
        assert!(matches!(
            from_json_str(&v.to_string()),
            Err(Error::Parse(_))
        ));
        let mut v: Value = serde_json::from_str(&to_json_string(&tri())).unwrap();
        v["edges"] = json!([[0, 1]]);
        assert!(matches!(
            from_json_str(&v.to_string()),
            Err(Error::NoPath { .. })
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("astar-gcs-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tri.json");
        save_instance(&tri(), &path).unwrap();
        assert_eq!(load_instance(&path).unwrap(), tri());
        fs::remove_dir_all(&dir).unwrap();
    }
}
