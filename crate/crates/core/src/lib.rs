//! Core of the QualiBD goal-oriented modelling workbench for Big Data
//! quality requirements.
//!
//! - [`metamodel`]: element and link kinds, legal endpoints, styles.
//! - [`model`] and [`edit`]: the model document and its edit engine.
//! - [`validation`]: audit rules producing diagnostics.
//! - [`dsl`]: the `.qbd` text format.
//! - [`export`]: JSON persistence, auto-layout, DOT and SVG.

pub mod dsl;
pub mod edit;
pub mod export;
pub mod geometry;
pub mod metamodel;
pub mod model;
pub mod validation;

pub use edit::{CancelReason, EdgeEnd, EditCommand, EditError, EditOutcome, Editor};
pub use geometry::Rect;
pub use metamodel::{
    endpoint_allowed, style_for, AttributeValueKind, EdgeKind, NodeKind, StyleSpec,
};
pub use model::{Edge, EdgeId, ElementRef, Model, ModelId, Node, NodeId};
pub use validation::{validate, Diagnostic, RuleId, Severity};
