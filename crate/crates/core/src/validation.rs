//! Audit rules over a model snapshot.
//!
//! Each rule is a native predicate evaluated per element; an element that
//! fails it yields one [`Diagnostic`]. [`validate`] runs every rule and sorts
//! the findings by severity (highest first), rule id and target.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::metamodel::{endpoint_allowed, EdgeKind, NodeKind};
use crate::model::{ElementRef, Model, ModelId, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Message,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Message => "message",
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleId {
    EmptyLabel,
    EmptyConnections,
    DuplicateEdge,
    IncompatibleEndpoints,
    SelfLoop,
    DanglingReference,
    InvalidContainment,
    UnsupportedLabel,
    IncompletePermutation,
}

impl RuleId {
    pub const fn as_str(self) -> &'static str {
        match self {
            RuleId::EmptyLabel => "empty-label",
            RuleId::EmptyConnections => "empty-connections",
            RuleId::DuplicateEdge => "duplicate-edge",
            RuleId::IncompatibleEndpoints => "incompatible-endpoints",
            RuleId::SelfLoop => "self-loop",
            RuleId::DanglingReference => "dangling-reference",
            RuleId::InvalidContainment => "invalid-containment",
            RuleId::UnsupportedLabel => "unsupported-label",
            RuleId::IncompletePermutation => "incomplete-permutation",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a diagnostic points at. Serialized as the plain id string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Element(ElementRef),
    Model(ModelId),
}

impl Target {
    fn sort_key(&self) -> (u8, u64, &str) {
        match self {
            Target::Model(id) => (0, 0, id.0.as_str()),
            Target::Element(e) => (1, e.number(), ""),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Element(e) => e.fmt(f),
            Target::Model(m) => m.fmt(f),
        }
    }
}

impl From<NodeId> for Target {
    fn from(id: NodeId) -> Self {
        Target::Element(id.into())
    }
}

impl From<ElementRef> for Target {
    fn from(e: ElementRef) -> Self {
        Target::Element(e)
    }
}

/// One finding. Wire shape: `{rule, severity, target, message}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    #[serde(rename = "rule")]
    pub rule_id: RuleId,
    pub severity: Severity,
    pub target: Target,
    pub message: String,
}

impl Diagnostic {
    fn new(
        rule_id: RuleId,
        severity: Severity,
        target: impl Into<Target>,
        message: String,
    ) -> Self {
        Diagnostic {
            rule_id,
            severity,
            target: target.into(),
            message,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}: {}",
            self.severity, self.rule_id, self.target, self.message
        )
    }
}

fn describe(model: &Model, id: NodeId) -> String {
    match model.node(id) {
        Some(n) => match n.name.as_deref().filter(|s| !s.trim().is_empty()) {
            Some(name) => format!("{} {id} \"{name}\"", n.kind),
            None => format!("{} {id}", n.kind),
        },
        None => id.to_string(),
    }
}

/// Warns about every node whose name is absent or whitespace-only.
pub fn rule_empty_label(model: &Model) -> Vec<Diagnostic> {
    model
        .nodes()
        .filter(|n| n.has_empty_label())
        .map(|n| {
            Diagnostic::new(
                RuleId::EmptyLabel,
                Severity::Warning,
                n.id,
                format!("{} {} has an empty label", n.kind, n.id),
            )
        })
        .collect()
}

/// Warns about every node without a single incident link. Permutation
/// attributes are connected through their container and are exempt.
pub fn rule_empty_connections(model: &Model) -> Vec<Diagnostic> {
    let connected: BTreeSet<NodeId> = model.edges().flat_map(|e| [e.from, e.to]).collect();
    model
        .nodes()
        .filter(|n| n.kind != NodeKind::PermutationAttribute && !connected.contains(&n.id))
        .map(|n| {
            Diagnostic::new(
                RuleId::EmptyConnections,
                Severity::Warning,
                n.id,
                format!(
                    "{} is not connected to any other element",
                    describe(model, n.id)
                ),
            )
        })
        .collect()
}

/// Re-checks the invariants the edit engine maintains, for documents that
/// were loaded from files rather than edited.
pub fn rule_structural(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    for node in model.nodes() {
        match (node.kind, node.owner) {
            (NodeKind::PermutationAttribute, None) => out.push(Diagnostic::new(
                RuleId::InvalidContainment,
                Severity::Error,
                node.id,
                format!("attribute {} has no owning permutation", node.id),
            )),
            (NodeKind::PermutationAttribute, Some(owner)) => match model.node(owner) {
                None => out.push(Diagnostic::new(
                    RuleId::DanglingReference,
                    Severity::Error,
                    node.id,
                    format!("attribute {} is owned by missing node {owner}", node.id),
                )),
                Some(o) if o.kind != NodeKind::Permutation => out.push(Diagnostic::new(
                    RuleId::InvalidContainment,
                    Severity::Error,
                    node.id,
                    format!(
                        "attribute {} is owned by {}, not a permutation",
                        node.id,
                        describe(model, owner)
                    ),
                )),
                Some(_) if node.attr_value_kind.is_none() => out.push(Diagnostic::new(
                    RuleId::InvalidContainment,
                    Severity::Error,
                    node.id,
                    format!("attribute {} has no value kind", node.id),
                )),
                Some(_) => {}
            },
            (kind, owner) => {
                if owner.is_some() || node.attr_value_kind.is_some() || node.attr_value.is_some() {
                    out.push(Diagnostic::new(
                        RuleId::InvalidContainment,
                        Severity::Error,
                        node.id,
                        format!("{kind} {} carries attribute-only fields", node.id),
                    ));
                }
            }
        }
    }

    let mut seen_pairs: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for edge in model.edges() {
        let ends = (model.node(edge.from), model.node(edge.to));
        let (Some(from), Some(to)) = ends else {
            let missing = if ends.0.is_none() { edge.from } else { edge.to };
            out.push(Diagnostic::new(
                RuleId::DanglingReference,
                Severity::Error,
                ElementRef::Edge(edge.id),
                format!(
                    "{} {} references missing node {missing}",
                    edge.kind, edge.id
                ),
            ));
            continue;
        };
        if !seen_pairs.insert((edge.from, edge.to)) {
            out.push(Diagnostic::new(
                RuleId::DuplicateEdge,
                Severity::Error,
                ElementRef::Edge(edge.id),
                format!(
                    "{} {} -> {} already has a relationship",
                    edge.id, edge.from, edge.to
                ),
            ));
        }
        if !endpoint_allowed(edge.kind, from.kind, to.kind) {
            out.push(Diagnostic::new(
                RuleId::IncompatibleEndpoints,
                Severity::Error,
                ElementRef::Edge(edge.id),
                format!(
                    "{} {} cannot connect {} to {}",
                    edge.kind, edge.id, from.kind, to.kind
                ),
            ));
        }
        if edge.from == edge.to {
            out.push(Diagnostic::new(
                RuleId::SelfLoop,
                Severity::Error,
                ElementRef::Edge(edge.id),
                format!("{} {} connects {} to itself", edge.kind, edge.id, edge.from),
            ));
        }
        if edge.label.is_some() && !edge.kind.supports_label() {
            out.push(Diagnostic::new(
                RuleId::UnsupportedLabel,
                Severity::Error,
                ElementRef::Edge(edge.id),
                format!("{} {} carries a label", edge.kind, edge.id),
            ));
        }
    }
    out
}

/// Warns about permutations missing either a characteristic or a quality
/// attribute feeding them through permutation links.
pub fn rule_permutation_completeness(model: &Model) -> Vec<Diagnostic> {
    let mut sources: BTreeMap<NodeId, (bool, bool)> = BTreeMap::new();
    for edge in model
        .edges()
        .filter(|e| e.kind == EdgeKind::PermutationLink)
    {
        let entry = sources.entry(edge.to).or_default();
        match model.node(edge.from).map(|n| n.kind) {
            Some(NodeKind::BigDataCharacteristic) => entry.0 = true,
            Some(NodeKind::NfrSoftgoal) => entry.1 = true,
            _ => {}
        }
    }
    model
        .nodes()
        .filter(|n| n.kind == NodeKind::Permutation)
        .filter_map(|n| {
            let (characteristic, softgoal) = sources.get(&n.id).copied().unwrap_or_default();
            let missing = match (characteristic, softgoal) {
                (true, true) => return None,
                (false, true) => "a Big Data characteristic",
                (true, false) => "an NFR soft-goal",
                (false, false) => "a Big Data characteristic and an NFR soft-goal",
            };
            Some(Diagnostic::new(
                RuleId::IncompletePermutation,
                Severity::Warning,
                n.id,
                format!(
                    "{} has no permutation link from {missing}",
                    describe(model, n.id)
                ),
            ))
        })
        .collect()
}

fn order(a: &Diagnostic, b: &Diagnostic) -> Ordering {
    b.severity
        .cmp(&a.severity)
        .then_with(|| a.rule_id.as_str().cmp(b.rule_id.as_str()))
        .then_with(|| a.target.sort_key().cmp(&b.target.sort_key()))
        .then_with(|| a.message.cmp(&b.message))
}

/// All rules, deterministically ordered.
pub fn validate(model: &Model) -> Vec<Diagnostic> {
    let mut all: Vec<Diagnostic> = [
        rule_empty_label(model),
        rule_empty_connections(model),
        rule_structural(model),
        rule_permutation_completeness(model),
    ]
    .into_iter()
    .flatten()
    .collect();
    all.sort_by(order);
    all
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(|d| d.severity == Severity::Error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edit::Editor;
    use crate::metamodel::AttributeValueKind;

    fn editor() -> Editor {
        Editor::new(Model::new("m", "m"))
    }

    #[test]
    fn severities_are_ordered() {
        assert!(Severity::Message < Severity::Warning);
        assert!(Severity::Warning < Severity::Error);
    }

    #[test]
    fn empty_label_examples() {
        let mut ed = editor();
        let unnamed = ed
            .create_node(NodeKind::Goal, None, None)
            .created_node()
            .unwrap();
        ed.create_node(
            NodeKind::BigDataCharacteristic,
            Some("Velocity".into()),
            None,
        );
        let blank = ed
            .create_node(NodeKind::NfrSoftgoal, Some("   ".into()), None)
            .created_node()
            .unwrap();
        let found: Vec<Target> = rule_empty_label(ed.model())
            .into_iter()
            .map(|d| d.target)
            .collect();
        assert_eq!(found, vec![unnamed.into(), blank.into()]);
    }

    #[test]
    fn empty_connections_examples() {
        let mut ed = editor();
        let g = ed
            .create_node(NodeKind::Goal, Some("G".into()), None)
            .created_node()
            .unwrap();
        let diags = rule_empty_connections(ed.model());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Warning);

        let v = ed
            .create_node(NodeKind::BigDataCharacteristic, Some("V".into()), None)
            .created_node()
            .unwrap();
        ed.create_edge(EdgeKind::AssociationLink, g, v);
        assert!(rule_empty_connections(ed.model()).is_empty());

        let p = ed
            .create_node(NodeKind::Permutation, Some("P".into()), None)
            .created_node()
            .unwrap();
        ed.add_permutation_attribute(p, Some("a".into()), AttributeValueKind::Quantitative, None);
        let diags = rule_empty_connections(ed.model());
        assert_eq!(diags.len(), 1, "only the permutation warns");
        assert_eq!(diags[0].target, p.into());
    }

    #[test]
    fn permutation_completeness_examples() {
        assert!(rule_permutation_completeness(&Model::new("m", "m")).is_empty());
        let mut ed = editor();
        let v = ed
            .create_node(
                NodeKind::BigDataCharacteristic,
                Some("Velocity".into()),
                None,
            )
            .created_node()
            .unwrap();
        let l = ed
            .create_node(NodeKind::NfrSoftgoal, Some("Latency".into()), None)
            .created_node()
            .unwrap();
        let p = ed
            .create_node(
                NodeKind::Permutation,
                Some("Velocity x Latency".into()),
                None,
            )
            .created_node()
            .unwrap();
        ed.create_edge(EdgeKind::PermutationLink, v, p);
        let diags = rule_permutation_completeness(ed.model());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule_id, RuleId::IncompletePermutation);
        ed.create_edge(EdgeKind::PermutationLink, l, p);
        assert!(rule_permutation_completeness(ed.model()).is_empty());
    }

    #[test]
    fn validate_orders_findings() {
        let mut ed = editor();
        let g = ed
            .create_node(NodeKind::Goal, None, None)
            .created_node()
            .unwrap();
        let diags = validate(ed.model());
        let rules: Vec<RuleId> = diags.iter().map(|d| d.rule_id).collect();
        assert_eq!(rules, vec![RuleId::EmptyConnections, RuleId::EmptyLabel]);
        assert!(diags.iter().all(|d| d.target == g.into()));
        assert_eq!(validate(ed.model()), diags);
    }

    #[test]
    fn wire_shape() {
        let d = Diagnostic::new(RuleId::EmptyLabel, Severity::Warning, NodeId(3), "x".into());
        assert_eq!(
            serde_json::to_value(&d).unwrap(),
            serde_json::json!({"rule":"empty-label","severity":"warning","target":"n3","message":"x"})
        );
        let back: Diagnostic = serde_json::from_value(serde_json::to_value(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
