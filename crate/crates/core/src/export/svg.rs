//! Standalone SVG 1.1 rendering over a computed layout.

use std::fmt::Write;

use super::layout::{container, LayoutResult};
use crate::geometry::Rect;
use crate::metamodel::{style_for, LabelPlacement, LineStyle, NodeKind, Shape};
use crate::model::{Edge, Model, Node, NodeId};

const MARGIN: f64 = 40.0;
const FONT: &str = "font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\"";
const STROKE: &str = "#333333";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SvgError {
    #[error("layout has no box for {0}")]
    MissingLayout(NodeId),
}

/// Fixed two-decimal rendering with trailing zeros trimmed.
fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            // Characters XML 1.0 cannot carry at all.
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => out.push('\u{fffd}'),
            '\u{fffe}' | '\u{ffff}' => out.push('\u{fffd}'),
            c => out.push(c),
        }
    }
    out
}

/// Outline of a cloud: eight arcs bulging outward around an inscribed ellipse.
fn cloud_path(r: &Rect) -> String {
    let (cx, cy) = r.center();
    let (rx, ry) = (r.w * 0.40, r.h * 0.32);
    let points: Vec<(f64, f64)> = (0..8)
        .map(|k| {
            let angle = std::f64::consts::FRAC_PI_4 * k as f64;
            (cx + rx * angle.cos(), cy + ry * angle.sin())
        })
        .collect();
    let mut d = format!("M {} {}", num(points[0].0), num(points[0].1));
    for i in 0..8 {
        let (ax, ay) = points[i];
        let (bx, by) = points[(i + 1) % 8];
        let radius = ((bx - ax).hypot(by - ay) * 0.6).max(1.0);
        let _ = write!(
            d,
            " A {} {} 0 0 1 {} {}",
            num(radius),
            num(radius),
            num(bx),
            num(by)
        );
    }
    d.push_str(" Z");
    d
}

fn shape_element(shape: Shape, r: &Rect, fill: &str, dashed: bool) -> String {
    let stroke = format!(
        "fill=\"{fill}\" stroke=\"{STROKE}\" stroke-width=\"1.5\"{}",
        if dashed {
            " stroke-dasharray=\"5 3\""
        } else {
            ""
        }
    );
    let (x, y, w, h) = (num(r.x), num(r.y), num(r.w), num(r.h));
    match shape {
        Shape::Box => format!("<rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{h}\" {stroke}/>"),
        Shape::RoundedBox => format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{h}\" rx=\"12\" ry=\"12\" {stroke}/>"
        ),
        Shape::Cloud => format!("<path d=\"{}\" {stroke}/>", cloud_path(r)),
        Shape::Diamond => {
            let (cx, cy) = r.center();
            format!(
                "<polygon points=\"{},{} {},{} {},{} {},{}\" {stroke}/>",
                num(cx),
                num(r.y),
                num(r.right()),
                num(cy),
                num(cx),
                num(r.bottom()),
                num(r.x),
                num(cy)
            )
        }
        Shape::Note => {
            let fold = 12.0_f64.min(r.w / 3.0).min(r.h / 3.0);
            format!(
                "<path d=\"M {} {} L {} {} L {} {} L {} {} L {} {} Z M {} {} L {} {} L {} {}\" {stroke}/>",
                num(r.x),
                num(r.y),
                num(r.right() - fold),
                num(r.y),
                num(r.right()),
                num(r.y + fold),
                num(r.right()),
                num(r.bottom()),
                num(r.x),
                num(r.bottom()),
                num(r.right() - fold),
                num(r.y),
                num(r.right() - fold),
                num(r.y + fold),
                num(r.right()),
                num(r.y + fold)
            )
        }
    }
}

fn text_element(x: f64, y: f64, text: &str, class: &str) -> String {
    format!(
        "<text class=\"{class}\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" dominant-baseline=\"middle\" {FONT}>{}</text>",
        num(x),
        num(y),
        xml_escape(text)
    )
}

fn attribute_text(attr: &Node) -> String {
    let mut text = attr.name.clone().unwrap_or_default();
    if let Some(value) = &attr.attr_value {
        let _ = write!(text, " = {value}");
    }
    text
}

fn render_node(
    out: &mut String,
    model: &Model,
    layout: &LayoutResult,
    node: &Node,
) -> Result<(), SvgError> {
    let r = layout
        .get(node.id)
        .ok_or(SvgError::MissingLayout(node.id))?;
    let style = style_for(node.kind);
    let shape = style.shape.unwrap_or(Shape::Box);
    let _ = writeln!(out, "  <g id=\"{}\" class=\"node {}\">", node.id, node.kind);
    let _ = writeln!(
        out,
        "    {}",
        shape_element(shape, &r, style.fill, style.line == LineStyle::Dashed)
    );
    let attributes: Vec<&Node> = if node.kind == NodeKind::Permutation {
        model.attributes_of(node.id).collect()
    } else {
        Vec::new()
    };
    let label = node.name.as_deref().unwrap_or("");
    let (cx, cy) = r.center();
    let (lx, ly) = match style.label_placement {
        LabelPlacement::Below => (cx, r.bottom() + 14.0),
        LabelPlacement::Inside if attributes.is_empty() => (cx, cy),
        LabelPlacement::Inside => (cx, r.y + 14.0),
    };
    let _ = writeln!(out, "    {}", text_element(lx, ly, label, "label"));
    for attr in attributes {
        let a = layout
            .get(attr.id)
            .ok_or(SvgError::MissingLayout(attr.id))?;
        let attr_style = style_for(attr.kind);
        let (ax, ay) = a.center();
        let _ = writeln!(
            out,
            "    <g id=\"{}\" class=\"node {}\">",
            attr.id, attr.kind
        );
        let _ = writeln!(
            out,
            "      {}",
            shape_element(Shape::Box, &a, attr_style.fill, false)
        );
        let _ = writeln!(
            out,
            "      {}",
            text_element(ax, ay, &attribute_text(attr), "label")
        );
        out.push_str("    </g>\n");
    }
    out.push_str("  </g>\n");
    Ok(())
}

/// Border midpoints joining two boxes: top/bottom when the boxes are
/// stacked more than side by side, left/right otherwise.
pub fn connection_points(from: &Rect, to: &Rect) -> ((f64, f64), (f64, f64)) {
    let (fx, fy) = from.center();
    let (tx, ty) = to.center();
    let (dx, dy) = (tx - fx, ty - fy);
    let vertical = dy.abs() / (from.h + to.h) >= dx.abs() / (from.w + to.w);
    if vertical {
        if dy >= 0.0 {
            ((fx, from.bottom()), (tx, to.y))
        } else {
            ((fx, from.y), (tx, to.bottom()))
        }
    } else if dx >= 0.0 {
        ((from.right(), fy), (to.x, ty))
    } else {
        ((from.x, fy), (to.right(), ty))
    }
}

fn render_edge(out: &mut String, layout: &LayoutResult, edge: &Edge) -> Result<(), SvgError> {
    let from = layout
        .get(edge.from)
        .ok_or(SvgError::MissingLayout(edge.from))?;
    let to = layout
        .get(edge.to)
        .ok_or(SvgError::MissingLayout(edge.to))?;
    let ((x1, y1), (x2, y2)) = connection_points(&from, &to);
    let style = style_for(edge.kind);
    let dash = if style.line == LineStyle::Dashed {
        " stroke-dasharray=\"6 4\""
    } else {
        ""
    };
    let _ = writeln!(out, "  <g id=\"{}\" class=\"edge {}\">", edge.id, edge.kind);
    let _ = writeln!(
        out,
        "    <path d=\"M {} {} L {} {}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash} marker-end=\"url(#arrow)\"/>",
        num(x1),
        num(y1),
        num(x2),
        num(y2),
        style.fill
    );
    if let Some(label) = &edge.label {
        let _ = writeln!(
            out,
            "    {}",
            text_element((x1 + x2) / 2.0, (y1 + y2) / 2.0 - 8.0, label, "edge-label")
        );
    }
    out.push_str("  </g>\n");
    Ok(())
}

/// Renders the model over `layout`, which must cover every node.
pub fn to_svg(model: &Model, layout: &LayoutResult) -> Result<String, SvgError> {
    let (right, bottom) = layout.extent();
    let (width, height) = (right + MARGIN, bottom + MARGIN);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        num(width),
        num(height),
        num(width),
        num(height)
    );
    let _ = writeln!(out, "  <title>{}</title>", xml_escape(model.name()));
    let _ = writeln!(
        out,
        "  <defs>\n    <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"8\" markerHeight=\"8\" orient=\"auto\">\n      <path d=\"M 0 0 L 10 5 L 0 10 Z\" fill=\"{STROKE}\"/>\n    </marker>\n  </defs>"
    );
    for node in model.nodes().filter(|n| container(model, n).is_none()) {
        render_node(&mut out, model, layout, node)?;
    }
    // Dangling links have nothing to attach to.
    let drawable = model
        .edges()
        .filter(|e| model.node(e.from).is_some() && model.node(e.to).is_some());
    for edge in drawable {
        render_edge(&mut out, layout, edge)?;
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::export::layout::layout;

    #[test]
    fn numbers_are_compact() {
        assert_eq!(num(40.0), "40");
        assert_eq!(num(12.5), "12.5");
        assert_eq!(num(1.0 / 3.0), "0.33");
        assert_eq!(num(-0.001), "0");
    }

    #[test]
    fn goal_is_a_rounded_rect_with_centred_label() {
        let m = parse("model \"m\" { goal G \"Ingest & <store>\" }").unwrap();
        let svg = to_svg(&m, &layout(&m)).unwrap();
        assert!(
            svg.contains("<rect x=\"40\" y=\"40\" width=\"150\" height=\"60\" rx=\"12\" ry=\"12\"")
        );
        assert!(svg.contains("x=\"115\" y=\"70\""));
        assert!(svg.contains("Ingest &amp; &lt;store&gt;"));
    }

    #[test]
    fn softgoal_cloud_is_closed_path() {
        let m = parse("model \"m\" { softgoal S \"Latency\" }").unwrap();
        let svg = to_svg(&m, &layout(&m)).unwrap();
        let line = svg
            .lines()
            .find(|l| l.contains("<path d=\"M") && l.contains(" A "))
            .unwrap();
        assert!(line.contains(" Z\""));
    }

    #[test]
    fn missing_layout_is_an_error() {
        let m = parse("model \"m\" { goal G \"g\" }").unwrap();
        assert_eq!(
            to_svg(&m, &LayoutResult::default()),
            Err(SvgError::MissingLayout(NodeId(1)))
        );
    }

    #[test]
    fn dangling_links_are_skipped() {
        let doc = r#"{"format_version":1,"id":"m","name":"m","nodes":[{"id":"n1","kind":"Goal"}],
            "edges":[{"id":"e2","kind":"AssociationLink","from":"n1","to":"n9"}]}"#;
        let m = crate::export::json::decode_unchecked(doc).unwrap();
        let svg = to_svg(&m, &layout(&m)).unwrap();
        assert!(!svg.contains("e2"));
    }

    #[test]
    fn connection_points_follow_direction() {
        let a = Rect::new(0.0, 0.0, 100.0, 50.0);
        let below = Rect::new(0.0, 200.0, 100.0, 50.0);
        let right = Rect::new(300.0, 0.0, 100.0, 50.0);
        assert_eq!(connection_points(&a, &below), ((50.0, 50.0), (50.0, 200.0)));
        assert_eq!(connection_points(&below, &a), ((50.0, 200.0), (50.0, 50.0)));
        assert_eq!(
            connection_points(&a, &right),
            ((100.0, 25.0), (300.0, 25.0))
        );
    }
}
