//! The JSON document format (`format_version` 1), one file per model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Rect;
use crate::metamodel::{AttributeValueKind, EdgeKind, NodeKind};
use crate::model::{Edge, EdgeId, Model, Node, NodeId};
use crate::validation::{has_errors, rule_structural, Diagnostic};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    Version(String),
    #[error("invalid document at `{path}`: {message}")]
    Shape { path: String, message: String },
    #[error("unknown kind `{token}` at `{path}`")]
    UnknownKind { path: String, token: String },
    #[error("element number {0} is used twice")]
    DuplicateId(u64),
    #[error("geometry for {0}: {1}")]
    Geometry(NodeId, &'static str),
    #[error("document has {} structural error(s)", .0.len())]
    Structural(Vec<Diagnostic>),
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    format_version: u64,
    id: &'a str,
    name: &'a str,
    revision: u64,
    next_id: u64,
    nodes: Vec<NodeOut<'a>>,
    edges: Vec<EdgeOut<'a>>,
    geometry: &'a BTreeMap<NodeId, Rect>,
}

#[derive(Serialize)]
struct NodeOut<'a> {
    id: NodeId,
    kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    owner: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    attr_kind: Option<AttributeValueKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    attr_value: Option<&'a str>,
}

#[derive(Serialize)]
struct EdgeOut<'a> {
    id: EdgeId,
    kind: EdgeKind,
    from: NodeId,
    to: NodeId,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentIn {
    #[allow(dead_code)]
    format_version: u64,
    id: String,
    name: String,
    #[serde(default)]
    revision: u64,
    #[serde(default)]
    next_id: u64,
    #[serde(default)]
    nodes: Vec<NodeIn>,
    #[serde(default)]
    edges: Vec<EdgeIn>,
    #[serde(default)]
    geometry: BTreeMap<NodeId, Rect>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeIn {
    id: NodeId,
    kind: String,
    name: Option<String>,
    owner: Option<NodeId>,
    attr_kind: Option<String>,
    attr_value: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeIn {
    id: EdgeId,
    kind: String,
    from: NodeId,
    to: NodeId,
    label: Option<String>,
}

/// Serializes `model` with keys in schema order and arrays in id order.
pub fn to_json(model: &Model) -> String {
    let doc = DocumentOut {
        format_version: FORMAT_VERSION,
        id: &model.id().0,
        name: model.name(),
        revision: model.revision(),
        next_id: model.next_id(),
        nodes: model
            .nodes()
            .map(|n| NodeOut {
                id: n.id,
                kind: n.kind,
                name: n.name.as_deref(),
                owner: n.owner,
                attr_kind: n.attr_value_kind,
                attr_value: n.attr_value.as_deref(),
            })
            .collect(),
        edges: model
            .edges()
            .map(|e| EdgeOut {
                id: e.id,
                kind: e.kind,
                from: e.from,
                to: e.to,
                label: e.label.as_deref(),
            })
            .collect(),
        geometry: model.geometry(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("document is always serializable");
    text.push('\n');
    text
}

/// Reads a document and refuses it when it has structural errors.
pub fn from_json(text: &str) -> Result<Model, JsonError> {
    let model = decode_unchecked(text)?;
    let structural = rule_structural(&model);
    if has_errors(&structural) {
        return Err(JsonError::Structural(structural));
    }
    Ok(model)
}

/// Reads a document without the structural checks, so that validation can
/// report on broken files.
pub fn decode_unchecked(text: &str) -> Result<Model, JsonError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| JsonError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match value.get("format_version") {
        Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
        Some(v) => return Err(JsonError::Version(v.to_string())),
        None => return Err(JsonError::Version("missing".to_owned())),
    }
    let doc: DocumentIn =
        serde_path_to_error::deserialize(value).map_err(|e| JsonError::Shape {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;

    let mut model = Model::new(doc.id, doc.name);
    let mut numbers = std::collections::BTreeSet::new();
    let mut claim = |n: u64| {
        if numbers.insert(n) {
            Ok(())
        } else {
            Err(JsonError::DuplicateId(n))
        }
    };

    for (i, n) in doc.nodes.into_iter().enumerate() {
        claim(n.id.0)?;
        let kind: NodeKind = n.kind.parse().map_err(|_| JsonError::UnknownKind {
            path: format!("nodes[{i}].kind"),
            token: n.kind.clone(),
        })?;
        let attr_value_kind = n
            .attr_kind
            .map(|k| {
                k.parse::<AttributeValueKind>()
                    .map_err(|_| JsonError::UnknownKind {
                        path: format!("nodes[{i}].attr_kind"),
                        token: k.clone(),
                    })
            })
            .transpose()?;
        model.put_node(
            n.id,
            Some(Node {
                id: n.id,
                kind,
                name: n.name,
                owner: n.owner,
                attr_value_kind,
                attr_value: n.attr_value,
            }),
        );
    }
    for (i, e) in doc.edges.into_iter().enumerate() {
        claim(e.id.0)?;
        let kind: EdgeKind = e.kind.parse().map_err(|_| JsonError::UnknownKind {
            path: format!("edges[{i}].kind"),
            token: e.kind.clone(),
        })?;
        model.put_edge(
            e.id,
            Some(Edge {
                id: e.id,
                kind,
                from: e.from,
                to: e.to,
                label: e.label,
            }),
        );
    }
    for (id, rect) in doc.geometry {
        if model.node(id).is_none() {
            return Err(JsonError::Geometry(id, "no such node"));
        }
        if !rect.is_valid() {
            return Err(JsonError::Geometry(id, "box must have positive size"));
        }
        model.put_geometry(id, Some(rect));
    }
    let next_id = model.next_id().max(doc.next_id);
    model.set_next_id(next_id);
    model.set_revision(doc.revision);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edit::Editor;

    fn sample() -> Model {
        let mut ed = Editor::new(Model::new("m1", "Sample"));
        let g = ed
            .create_node(NodeKind::Goal, Some("G".into()), None)
            .created_node()
            .unwrap();
        let v = ed
            .create_node(NodeKind::BigDataCharacteristic, None, None)
            .created_node()
            .unwrap();
        let p = ed
            .create_node(NodeKind::Permutation, Some("P".into()), None)
            .created_node()
            .unwrap();
        ed.add_permutation_attribute(
            p,
            Some("a".into()),
            AttributeValueKind::Quantitative,
            Some("1".into()),
        );
        ed.create_edge(EdgeKind::AssociationLink, g, v);
        ed.into_model()
    }

    #[test]
    fn keys_in_schema_order() {
        let text = to_json(&sample());
        let order = [
            "format_version",
            "\"id\"",
            "\"name\"",
            "revision",
            "next_id",
            "nodes",
            "edges",
            "geometry",
        ];
        let positions: Vec<usize> = order.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
        assert!(text.contains("\"attr_kind\": \"Quantitative\""));
        assert!(!text.contains("\"label\""));
    }

    #[test]
    fn round_trip() {
        let m = sample();
        let back = from_json(&to_json(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn version_is_checked() {
        let err = from_json(r#"{"format_version":2,"id":"m","name":"m"}"#).unwrap_err();
        assert!(matches!(err, JsonError::Version(v) if v == "2"));
        assert!(matches!(
            from_json(r#"{"id":"m"}"#),
            Err(JsonError::Version(_))
        ));
    }

    #[test]
    fn errors_carry_paths() {
        let err = from_json(
            r#"{"format_version":1,"id":"m","name":"m","nodes":[{"id":"n1","kind":"Goal"},{"id":"bad","kind":"Goal"}]}"#,
        )
        .unwrap_err();
        match err {
            JsonError::Shape { path, .. } => assert_eq!(path, "nodes[1].id"),
            other => panic!("{other:?}"),
        }
        let err = from_json(
            r#"{"format_version":1,"id":"m","name":"m","nodes":[{"id":"n1","kind":"Softgoal"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, JsonError::UnknownKind { token, .. } if token == "Softgoal"));
        assert!(matches!(
            from_json("{not json"),
            Err(JsonError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn dangling_edges_are_refused() {
        let text = r#"{"format_version":1,"id":"m","name":"m","nodes":[{"id":"n1","kind":"Goal"}],
            "edges":[{"id":"e2","kind":"AssociationLink","from":"n1","to":"n9"}]}"#;
        assert!(matches!(from_json(text), Err(JsonError::Structural(_))));
        let model = decode_unchecked(text).unwrap();
        assert_eq!(model.edge_count(), 1);
        assert_eq!(model.next_id(), 3);
    }

    #[test]
    fn reused_numbers_are_refused() {
        let text = r#"{"format_version":1,"id":"m","name":"m","nodes":[{"id":"n1","kind":"Goal"},{"id":"n2","kind":"Goal"}],
            "edges":[{"id":"e1","kind":"DecompositionLink","from":"n1","to":"n2"}]}"#;
        assert!(matches!(
            decode_unchecked(text),
            Err(JsonError::DuplicateId(1))
        ));
    }
}
