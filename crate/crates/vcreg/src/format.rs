//! JSON wire formats for relations and measures.
//!
//! ```json
//! {"k": 2, "part_sizes": [3, 3], "edges": [[0, 1], [2, 2]], "symmetric": false}
//! {"part": 0, "weights": ["1/2", "1/4", "1/4"]}
//! ```
//!
//! Input files may hold a bare relation, an object with `hypergraph` (and
//! optionally `measures`) keys as written by `vcreg gen`, or a run report
//! whose `outputs` carry those keys.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use vcreg_core::rational::{self, Rational};
use vcreg_core::{Hypergraph, Measure};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphJson {
    pub k: usize,
    pub part_sizes: Vec<usize>,
    pub edges: Vec<Vec<u32>>,
    #[serde(default)]
    pub symmetric: bool,
}

impl HypergraphJson {
    pub fn from_hypergraph(h: &Hypergraph) -> Self {
        HypergraphJson {
            k: h.k(),
            part_sizes: h.part_sizes().to_vec(),
            edges: h.edges().map(<[u32]>::to_vec).collect(),
            symmetric: h.is_symmetric(),
        }
    }

    pub fn to_hypergraph(&self) -> Result<Hypergraph, CliError> {
        if self.k != self.part_sizes.len() {
            return Err(CliError::Input(format!(
                "k = {} but {} part sizes given",
                self.k,
                self.part_sizes.len()
            )));
        }
        Ok(Hypergraph::new(
            self.part_sizes.clone(),
            &self.edges,
            self.symmetric,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    pub part: usize,
    #[serde(with = "rational::serde_str::vec")]
    pub weights: Vec<Rational>,
}

impl MeasureJson {
    pub fn from_measure(m: &Measure) -> Self {
        MeasureJson {
            part: m.part(),
            weights: m.weights().to_vec(),
        }
    }

    pub fn to_measure(&self) -> Result<Measure, CliError> {
        Ok(Measure::new(self.part, self.weights.clone())?)
    }
}

pub fn hypergraph_to_value(h: &Hypergraph) -> Value {
    serde_json::to_value(HypergraphJson::from_hypergraph(h)).expect("plain data serializes")
}

pub fn measures_to_value(ms: &[Measure]) -> Value {
    serde_json::to_value(ms.iter().map(MeasureJson::from_measure).collect::<Vec<_>>())
        .expect("plain data serializes")
}

pub fn hypergraph_to_string(h: &Hypergraph) -> String {
    serde_json::to_string(&HypergraphJson::from_hypergraph(h)).expect("plain data serializes")
}

/// Parses a relation, reporting line and column on malformed input.
pub fn hypergraph_from_str(text: &str) -> Result<Hypergraph, CliError> {
    let j: HypergraphJson =
        serde_json::from_str(text).map_err(|e| CliError::parse(None, &e))?;
    j.to_hypergraph()
}

pub fn read_value(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(Some(path), &e))
}

fn locate<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.get(key)
        .or_else(|| v.get("outputs").and_then(|o| o.get(key)))
}

fn decode<T: for<'de> Deserialize<'de>>(path: &Path, v: &Value) -> Result<T, CliError> {
    T::deserialize(v).map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))
}

/// A relation and its measures as read from disk.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub path: PathBuf,
    pub hypergraph: Hypergraph,
    pub measures: Vec<Measure>,
}

/// Reads a relation and, if given, a separate measure file. Measures found
/// in neither place default to uniform.
pub fn load(path: &Path, measure_path: Option<&Path>) -> Result<Loaded, CliError> {
    let v = read_value(path)?;
    let hj: HypergraphJson = if v.get("edges").is_some() {
        decode(path, &v)?
    } else {
        let inner = locate(&v, "hypergraph").ok_or_else(|| {
            CliError::Input(format!("{}: no hypergraph found", path.display()))
        })?;
        decode(path, inner)?
    };
    let h = hj.to_hypergraph()?;
    let mjs: Option<Vec<MeasureJson>> = match measure_path {
        Some(mp) => {
            let mv = read_value(mp)?;
            let list = locate(&mv, "measures").unwrap_or(&mv);
            Some(decode(mp, list)?)
        }
        None => match locate(&v, "measures") {
            Some(list) => Some(decode(path, list)?),
            None => None,
        },
    };
    let measures = match mjs {
        Some(list) => list
            .iter()
            .map(MeasureJson::to_measure)
            .collect::<Result<Vec<_>, _>>()?,
        None => Measure::uniform_for(&h),
    };
    Ok(Loaded {
        path: path.to_path_buf(),
        hypergraph: h,
        measures,
    })
}

/// Writes `text` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Input(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = match dir {
        Some(d) => d.join(&tmp_name),
        None => PathBuf::from(&tmp_name),
    };
    fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn malformed_json_reports_location() {
        let err = hypergraph_from_str("{\"k\": 2,\n \"part_sizes\": [2, 2],\n \"edges\": [[0, 1]\n")
            .unwrap_err();
        match err {
            CliError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let err = hypergraph_from_str(r#"{"k":3,"part_sizes":[2,2],"edges":[]}"#).unwrap_err();
        assert!(matches!(err, CliError::Input(_)));
    }

    #[test]
    fn measure_roundtrip() {
        let m = Measure::new(1, vec![rational::frac(1, 3), rational::frac(2, 3)]).unwrap();
        let text = serde_json::to_string(&MeasureJson::from_measure(&m)).unwrap();
        assert_eq!(text, r#"{"part":1,"weights":["1/3","2/3"]}"#);
        let back: MeasureJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_measure().unwrap(), m);
    }
}
