use std::collections::HashMap;
use std::fmt::Write;

use super::{edge_keyword, ident_prefix, node_keyword, value_kind_keyword};
use crate::model::{Model, Node, NodeId};
use crate::validation::{has_errors, rule_structural, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("model has {} structural error(s)", .0.len())]
    Structural(Vec<Diagnostic>),
}

pub(crate) fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text of `model`: declarations by kind then id, links by kind
/// then endpoint declaration order, two-space indentation. Geometry is
/// dropped. Formatting the parse of the output reproduces it byte for byte.
pub fn format(model: &Model) -> Result<String, FormatError> {
    let structural = rule_structural(model);
    if has_errors(&structural) {
        return Err(FormatError::Structural(structural));
    }

    let mut declared: Vec<&Node> = model.top_level_nodes().collect();
    declared.sort_by_key(|n| (n.kind.declaration_rank(), n.id));

    let mut idents: HashMap<NodeId, String> = HashMap::new();
    let mut position: HashMap<NodeId, usize> = HashMap::new();
    let mut per_kind: HashMap<&str, usize> = HashMap::new();
    for (i, node) in declared.iter().enumerate() {
        let prefix = ident_prefix(node.kind);
        let ordinal = per_kind.entry(prefix).or_default();
        *ordinal += 1;
        idents.insert(node.id, format!("{prefix}{ordinal}"));
        position.insert(node.id, i);
    }

    let mut out = String::new();
    let _ = writeln!(out, "model {} {{", quote(model.name()));
    for node in &declared {
        let keyword = node_keyword(node.kind).expect("attributes are never top-level");
        let _ = write!(out, "  {keyword} {}", idents[&node.id]);
        if let Some(name) = &node.name {
            let _ = write!(out, " {}", quote(name));
        }
        let attributes: Vec<&Node> = model.attributes_of(node.id).collect();
        if attributes.is_empty() {
            out.push('\n');
            continue;
        }
        out.push_str(" {\n");
        for attr in attributes {
            let value_kind = attr.attr_value_kind.expect("checked by rule_structural");
            let _ = write!(out, "    attribute {}", value_kind_keyword(value_kind));
            if let Some(name) = &attr.name {
                let _ = write!(out, " {}", quote(name));
            }
            if let Some(value) = &attr.attr_value {
                let _ = write!(out, " = {}", quote(value));
            }
            out.push('\n');
        }
        out.push_str("  }\n");
    }

    let mut links: Vec<_> = model.edges().collect();
    links.sort_by_key(|e| (e.kind, position[&e.from], position[&e.to]));
    if !declared.is_empty() && !links.is_empty() {
        out.push('\n');
    }
    for link in links {
        let _ = write!(
            out,
            "  {} {} -> {}",
            edge_keyword(link.kind),
            idents[&link.from],
            idents[&link.to]
        );
        if let Some(label) = &link.label {
            let _ = write!(out, " label {}", quote(label));
        }
        out.push('\n');
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::edit::Editor;
    use crate::metamodel::NodeKind;

    #[test]
    fn empty_model_text() {
        assert_eq!(format(&Model::new("m", "m")).unwrap(), "model \"m\" {\n}\n");
    }

    #[test]
    fn canonical_layout() {
        let text = "model \"m\" {\n  claim X \"why\"\n  goal Z \"g\"\n  opgoal Y \"o\"\n  argue X -> Y\n  contribute Y -> Z label \"help\"\n  permutation Q\n}\n";
        let formatted = format(&parse(text).unwrap()).unwrap();
        assert_eq!(
            formatted,
            "model \"m\" {\n  goal G1 \"g\"\n  permutation P1\n  opgoal O1 \"o\"\n  claim K1 \"why\"\n\n  contribute O1 -> G1 label \"help\"\n  argue K1 -> O1\n}\n"
        );
        assert_eq!(format(&parse(&formatted).unwrap()).unwrap(), formatted);
    }

    #[test]
    fn quoting_round_trips_through_the_lexer() {
        let name = "tab\there \"quoted\" back\\slash\nnew \u{1} é";
        let mut ed = Editor::new(Model::new("m", name));
        ed.create_node(NodeKind::Goal, Some(name.into()), None);
        let text = format(ed.model()).unwrap();
        let back = parse(&text).unwrap();
        assert_eq!(back.name(), name);
        assert_eq!(back.nodes().next().unwrap().name.as_deref(), Some(name));
    }

    #[test]
    fn structurally_broken_models_are_refused() {
        let doc = r#"{"format_version":1,"id":"m","name":"m","revision":0,"next_id":4,
            "nodes":[{"id":"n1","kind":"Goal"},{"id":"n2","kind":"Goal"}],
            "edges":[{"id":"e3","kind":"ContributionLink","from":"n1","to":"n2"}],"geometry":{}}"#;
        let model = crate::export::json::decode_unchecked(doc).unwrap();
        assert!(matches!(format(&model), Err(FormatError::Structural(_))));
    }
}
