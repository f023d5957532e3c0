use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeuristicMethod {
    Zero,
    H1,
    H2,
    Blend,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicMeta {
    pub method: HeuristicMethod,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_max: Option<usize>,
    pub build_millis: f64,
}

/// Per-vertex underestimate of the cost-to-go. `h(d) = 0`, all values
/// finite and nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct HeuristicTable {
    values: Vec<f64>,
    destination: Option<usize>,
    meta: HeuristicMeta,
}

impl HeuristicTable {
    pub fn new(values: Vec<f64>, destination: usize, meta: HeuristicMeta) -> Result<Self> {
        Self::from_parts(values, Some(destination), meta)
    }

    /// Like `new`, but a table built without a known destination (the zero
    /// table, or a blend of two such) skips the `h(d) = 0` check.
    pub(crate) fn from_parts(
        values: Vec<f64>,
        destination: Option<usize>,
        meta: HeuristicMeta,
    ) -> Result<Self> {
        if let Some((v, h)) = values
            .iter()
            .enumerate()
            .find(|(_, h)| !(h.is_finite() && **h >= 0.0))
        {
            return Err(Error::invariant(format!(
                "heuristic value {h} at vertex {v} is not finite and nonnegative"
            )));
        }
        if let Some(d) = destination {
            if d >= values.len() {
                return Err(Error::input(
                    "heuristic table does not cover the destination",
                ));
            }
            if values[d] != 0.0 {
                return Err(Error::invariant("heuristic must vanish at the destination"));
            }
        }
        Ok(Self {
            values,
            destination,
            meta,
        })
    }

    pub fn zero(num_vertices: usize) -> Self {
        Self {
            values: vec![0.0; num_vertices],
            destination: None,
            meta: HeuristicMeta {
                method: HeuristicMethod::Zero,
                weight: None,
                n_max: None,
                build_millis: 0.0,
            },
        }
    }

    pub fn get(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn destination(&self) -> Option<usize> {
        self.destination
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn meta(&self) -> &HeuristicMeta {
        &self.meta
    }

    pub fn with_meta(mut self, meta: HeuristicMeta) -> Self {
        self.meta = meta;
        self
    }
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    #[serde(flatten)]
    meta: HeuristicMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    destination: Option<usize>,
    values: BTreeMap<usize, f64>,
}

impl HeuristicTable {
    /// `{"method", "weight"?, "n_max"?, "build_millis", "destination"?, "values": {id: h}}`.
    pub fn to_json_string(&self) -> String {
        let file = TableFile {
            meta: self.meta.clone(),
            destination: self.destination,
            values: self.values.iter().copied().enumerate().collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("table serializes");
        text.push('\n');
        text
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: TableFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = file.values.len();
        if file.values.keys().copied().ne(0..n) {
            return Err(Error::Parse(format!(
                "heuristic ids must be exactly 0..{n}"
            )));
        }
        Self::from_parts(
            file.values.into_values().collect(),
            file.destination,
            file.meta,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> HeuristicMeta {
        HeuristicMeta {
            method: HeuristicMethod::Custom,
            weight: None,
            n_max: None,
            build_millis: 0.0,
        }
    }

    #[test]
    fn enforces_invariants() {
        assert!(HeuristicTable::new(vec![1.0, 0.0], 1, meta()).is_ok());
        assert!(HeuristicTable::new(vec![1.0, 0.5], 1, meta()).is_err());
        assert!(HeuristicTable::new(vec![-1.0, 0.0], 1, meta()).is_err());
        assert!(HeuristicTable::new(vec![f64::NAN, 0.0], 1, meta()).is_err());
        assert!(HeuristicTable::new(vec![0.0], 3, meta()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = HeuristicTable::new(vec![1.5, 0.0, 2.25], 1, meta()).unwrap();
        let text = t.to_json_string();
        assert!(text.contains("\"method\": \"custom\""));
        assert_eq!(HeuristicTable::from_json_str(&text).unwrap(), t);
        let z = HeuristicTable::zero(2);
        assert_eq!(
            HeuristicTable::from_json_str(&z.to_json_string()).unwrap(),
            z
        );
        assert!(HeuristicTable::from_json_str(
            r#"{"method":"h1","build_millis":0,"values":{"1":0.0}}"#
        )
        .is_err());
    }
}
