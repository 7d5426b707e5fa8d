//! JSON instance files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "objective": "weighted",
//!   "vertices": [{ "name": "a", "b": [0, 1, 2] }, { "name": "b", "b": [1] }],
//!   "edges": [{ "u": "a", "v": "b", "weight": 3 }],
//!   "initial": [0]
//! }
//! ```
//!
//! Edges refer to vertices by name and are numbered in file order; `initial`
//! lists edge ids. `objective` and `initial` are optional.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::{random_instance, rng_from_seed, InstanceParams};
use crate::graphfactor::{Edge, Factor, MultiGraph, Objective};
use crate::parityset::{BProfile, GapFreeSet};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

impl InstanceError {
    fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        InstanceError::Field {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub name: String,
    pub b: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub u: String,
    pub v: String,
    pub weight: i64,
}

/// The document as written on disk, before validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Objective>,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<usize>>,
}

/// A validated instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub names: Vec<String>,
    pub graph: MultiGraph,
    pub profile: BProfile,
    pub objective: Option<Objective>,
    /// Edge ids are checked at load; `d_F ∈ B` is not.
    pub initial: Option<Factor>,
}

impl Instance {
    /// Vertices are named `v0, v1, ...`.
    pub fn new(graph: MultiGraph, profile: BProfile) -> Self {
        Instance {
            names: (0..graph.vertex_count()).map(|i| format!("v{i}")).collect(),
            graph,
            profile,
            objective: None,
            initial: None,
        }
    }

    /// Random instance from [`random_instance`]; equal seeds give equal instances.
    pub fn random(params: &InstanceParams, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let (graph, profile) = random_instance(&mut rng, params);
        Instance::new(graph, profile)
    }

    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        Instance::from_file(file)
    }

    pub fn from_file(file: InstanceFile) -> Result<Self, InstanceError> {
        if file.version != FORMAT_VERSION {
            return Err(InstanceError::field(
                "version",
                format!(
                    "unsupported version {}, expected {FORMAT_VERSION}",
                    file.version
                ),
            ));
        }
        if file.vertices.is_empty() {
            return Err(InstanceError::field(
                "vertices",
                "at least one vertex is required",
            ));
        }
        let mut index = HashMap::new();
        let mut sets = Vec::with_capacity(file.vertices.len());
        for (i, vs) in file.vertices.iter().enumerate() {
            if index.insert(vs.name.as_str(), i).is_some() {
                return Err(InstanceError::field(
                    format!("vertices[{i}].name"),
                    format!("duplicate name {:?}", vs.name),
                ));
            }
            let set = GapFreeSet::new(vs.b.clone())
                .map_err(|e| InstanceError::field(format!("vertices[{i}].b"), e.to_string()))?;
            sets.push(set);
        }
        let lookup = |path: String, name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| InstanceError::field(path, format!("unknown vertex {name:?}")))
        };
        let mut edges = Vec::with_capacity(file.edges.len());
        for (i, es) in file.edges.iter().enumerate() {
            let u = lookup(format!("edges[{i}].u"), &es.u)?;
            let v = lookup(format!("edges[{i}].v"), &es.v)?;
            edges.push(Edge {
                u,
                v,
                weight: es.weight,
            });
        }
        let graph = MultiGraph::new(sets.len(), edges)
            .map_err(|e| InstanceError::field("edges", e.to_string()))?;
        let profile =
            BProfile::new(sets).map_err(|e| InstanceError::field("vertices", e.to_string()))?;
        let initial = match &file.initial {
            None => None,
            Some(ids) => {
                let mut seen = vec![false; graph.edge_count()];
                for (i, &id) in ids.iter().enumerate() {
                    if id >= graph.edge_count() {
                        return Err(InstanceError::field(
                            format!("initial[{i}]"),
                            format!(
                                "edge id {id} out of range (instance has {} edges)",
                                graph.edge_count()
                            ),
                        ));
                    }
                    if std::mem::replace(&mut seen[id], true) {
                        return Err(InstanceError::field(
                            format!("initial[{i}]"),
                            format!("duplicate edge id {id}"),
                        ));
                    }
                }
                Some(Factor::from_ids(graph.edge_count(), ids).expect("ids checked above"))
            }
        };
        Ok(Instance {
            names: file.vertices.into_iter().map(|v| v.name).collect(),
            graph,
            profile,
            objective: file.objective,
            initial,
        })
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            version: FORMAT_VERSION,
            objective: self.objective,
            vertices: self
                .names
                .iter()
                .zip(self.profile.sets())
                .map(|(name, s)| VertexSpec {
                    name: name.clone(),
                    b: s.elements().to_vec(),
                })
                .collect(),
            edges: self
                .graph
                .edges()
                .iter()
                .map(|e| EdgeSpec {
                    u: self.names[e.u].clone(),
                    v: self.names[e.v].clone(),
                    weight: e.weight,
                })
                .collect(),
            initial: self.initial.as_ref().map(Factor::ids),
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("instance serializes");
        s.push('\n');
        s
    }
}

/// Edge-id list from a standalone JSON file such as `[0, 3, 4]`.
pub fn parse_edge_ids(text: &str, m: usize) -> Result<Factor, InstanceError> {
    let ids: Vec<usize> = serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    let mut file_ids = Vec::with_capacity(ids.len());
    for (i, &id) in ids.iter().enumerate() {
        if id >= m || file_ids.contains(&id) {
            return Err(InstanceError::field(
                format!("[{i}]"),
                format!("invalid or repeated edge id {id}"),
            ));
        }
        file_ids.push(id);
    }
    Ok(Factor::from_ids(m, &file_ids).expect("ids checked above"))
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
  "version": 1,
  "objective": "cardinality",
  "vertices": [
    { "name": "a", "b": [0, 1, 2] },
    { "name": "b", "b": [1] }
  ],
  "edges": [
    { "u": "a", "v": "b", "weight": 3 },
    { "u": "a", "v": "a", "weight": -1 }
  ],
  "initial": [0]
}"#;

    #[test]
    fn parses_sample() {
        let inst = Instance::parse(SAMPLE).unwrap();
        assert_eq!(inst.names, vec!["a", "b"]);
        assert_eq!(inst.graph.edge_count(), 2);
        assert!(inst.graph.edge(1).is_loop());
        assert_eq!(inst.objective, Some(Objective::Cardinality));
        assert_eq!(inst.initial.as_ref().unwrap().ids(), vec![0]);
    }

    #[test]
    fn round_trip() {
        let inst = Instance::parse(SAMPLE).unwrap();
        let text = inst.emit();
        assert_eq!(Instance::parse(&text).unwrap(), inst);
        assert_eq!(Instance::parse(&text).unwrap().emit(), text);
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = Instance::parse("{\n  \"version\": 1,\n  \"vertices\": [,]\n}").unwrap_err();
        match err {
            InstanceError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let err =
            Instance::parse(r#"{"version":1,"vertices":[],"edges":[],"extra":0}"#).unwrap_err();
        assert!(matches!(err, InstanceError::Syntax { .. }), "{err}");
    }

    #[test]
    fn field_errors_have_paths() {
        let bad_set = SAMPLE.replace("[0, 1, 2]", "[0, 3]");
        assert_eq!(
            Instance::parse(&bad_set)
                .unwrap_err()
                .to_string()
                .split(':')
                .next(),
            Some("vertices[0].b")
        );
        let bad_name = SAMPLE.replace(r#""v": "b""#, r#""v": "z""#);
        assert!(Instance::parse(&bad_name)
            .unwrap_err()
            .to_string()
            .starts_with("edges[0].v"));
        let bad_initial = SAMPLE.replace("\"initial\": [0]", "\"initial\": [5]");
        assert!(Instance::parse(&bad_initial)
            .unwrap_err()
            .to_string()
            .starts_with("initial[0]"));
        let dup = SAMPLE.replace(r#""name": "b""#, r#""name": "a""#);
        assert!(Instance::parse(&dup)
            .unwrap_err()
            .to_string()
            .starts_with("vertices[1].name"));
        let version = SAMPLE.replace("\"version\": 1", "\"version\": 2");
        assert!(Instance::parse(&version)
            .unwrap_err()
            .to_string()
            .starts_with("version"));
    }

    #[test]
    fn random_instances_round_trip() {
        let p = InstanceParams {
            vertices: 1,
            edges: 0,
            ..Default::default()
        };
        let one = Instance::random(&p, 3);
        assert_eq!((one.graph.vertex_count(), one.graph.edge_count()), (1, 0));
        for seed in 0..50 {
            let inst = Instance::random(&InstanceParams::default(), seed);
            assert_eq!(
                inst.emit(),
                Instance::random(&InstanceParams::default(), seed).emit()
            );
            assert_eq!(Instance::parse(&inst.emit()).unwrap(), inst);
        }
    }

    #[test]
    fn edge_id_files() {
        assert_eq!(parse_edge_ids("[2, 0]", 3).unwrap().ids(), vec![0, 2]);
        assert!(parse_edge_ids("[3]", 3).is_err());
        assert!(parse_edge_ids("[1, 1]", 3).is_err());
    }
}
