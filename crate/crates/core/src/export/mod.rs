//! Serialization and rendering: the JSON document format, a computed layout,
//! DOT and SVG.

pub mod dot;
pub mod json;
pub mod layout;
pub mod svg;

pub use dot::to_dot;
pub use json::{decode_unchecked, from_json, to_json, JsonError};
pub use layout::{layout, LayoutResult};
pub use svg::{to_svg, SvgError};

/// Lays the model out and renders it to SVG in one step.
pub fn render_svg(model: &crate::model::Model) -> String {
    to_svg(model, &layout(model)).expect("layout covers every node")
}
