//! Graphviz DOT emission.

use std::fmt::Write;

use super::layout::container;
use crate::metamodel::{style_for, LineStyle, Shape};
use crate::model::{Model, Node};

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out
}

fn attribute_line(attr: &Node) -> String {
    let kind = attr
        .attr_value_kind
        .map(|k| k.as_str().to_lowercase())
        .unwrap_or_default();
    let mut line = format!("[{kind}] {}", attr.name.as_deref().unwrap_or(""));
    if let Some(value) = &attr.attr_value {
        let _ = write!(line, " = {value}");
    }
    line
}

fn node_attributes(model: &Model, node: &Node) -> String {
    let style = style_for(node.kind);
    let (shape, mut styles) = match style.shape {
        Some(Shape::RoundedBox) => ("box", vec!["rounded", "filled"]),
        Some(Shape::Cloud) => ("ellipse", vec!["filled"]),
        Some(Shape::Diamond) => ("diamond", vec!["filled"]),
        Some(Shape::Note) => ("note", vec!["filled"]),
        Some(Shape::Box) | None => ("box", vec!["filled"]),
    };
    if style.line == LineStyle::Dashed {
        styles.push("dashed");
    }
    let mut label = node.name.clone().unwrap_or_default();
    let attributes = model
        .attributes_of(node.id)
        .filter(|_| node.kind == crate::metamodel::NodeKind::Permutation);
    for attr in attributes {
        label.push('\n');
        label.push_str(&attribute_line(attr));
    }
    format!(
        "label=\"{}\", shape={shape}, style=\"{}\", fillcolor=\"{}\", tooltip=\"{}\"",
        escape(&label),
        styles.join(","),
        style.fill,
        node.kind
    )
}

/// Renders the model as a DOT digraph. Attributes appear inside their
/// permutation's label; nodes are emitted in id order and links by
/// (kind, from, to). Links with a missing endpoint are left out.
pub fn to_dot(model: &Model) -> String {
    let mut out = format!("digraph \"{}\" {{\n", escape(model.name()));
    for node in model.nodes().filter(|n| container(model, n).is_none()) {
        let _ = writeln!(out, "  \"{}\" [{}];", node.id, node_attributes(model, node));
    }
    let mut edges: Vec<_> = model
        .edges()
        .filter(|e| model.node(e.from).is_some() && model.node(e.to).is_some())
        .collect();
    edges.sort_by_key(|e| (e.kind, e.from, e.to, e.id));
    for edge in edges {
        let style = style_for(edge.kind);
        let line = match style.line {
            LineStyle::Solid => "solid",
            LineStyle::Dashed => "dashed",
        };
        let _ = write!(
            out,
            "  \"{}\" -> \"{}\" [style={line}, color=\"{}\", tooltip=\"{}\"",
            edge.from, edge.to, style.fill, edge.kind
        );
        if let Some(label) = &edge.label {
            let _ = write!(out, ", label=\"{}\"", escape(label));
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}
