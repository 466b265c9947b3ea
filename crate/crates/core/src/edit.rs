//! Edit engine: element creation and edition tools with an undo journal.
//!
//! Every command either applies completely (recorded on the undo
//! journal and bumping the revision) or leaves the model untouched. Creating
//! a relationship between two nodes that are already connected, in the same
//! direction and by any link kind, is cancelled rather than applied.

use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::geometry::{attribute_slots, grid_slot, permutation_height, Rect};
use crate::metamodel::{endpoint_allowed, AttributeValueKind, EdgeKind, NodeKind};
use crate::model::{Edge, EdgeId, ElementRef, Model, Node, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeEnd {
    Source,
    Target,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum EditCommand {
    CreateNode {
        kind: NodeKind,
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        owner: Option<NodeId>,
        #[serde(default)]
        attr_kind: Option<AttributeValueKind>,
        #[serde(default)]
        attr_value: Option<String>,
    },
    CreateEdge {
        kind: EdgeKind,
        from: NodeId,
        to: NodeId,
        #[serde(default)]
        label: Option<String>,
    },
    SetLabel {
        target: ElementRef,
        name: String,
    },
    ReconnectEdge {
        edge: EdgeId,
        end: EdgeEnd,
        node: NodeId,
    },
    Delete {
        target: ElementRef,
    },
    AddPermutationAttribute {
        permutation: NodeId,
        #[serde(default)]
        name: Option<String>,
        value_kind: AttributeValueKind,
        #[serde(default)]
        value: Option<String>,
    },
    MoveNode {
        node: NodeId,
        rect: Rect,
    },
    Undo,
    Redo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CancelReason {
    /// The source already has a relationship to the same target.
    DuplicateEdge,
    NoChange,
}

impl CancelReason {
    pub const fn token(self) -> &'static str {
        match self {
            CancelReason::DuplicateEdge => "duplicate-edge",
            CancelReason::NoChange => "no-change",
        }
    }
}

impl fmt::Display for CancelReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EditError {
    #[error("no node {0}")]
    UnknownNode(NodeId),
    #[error("no element {0}")]
    UnknownElement(ElementRef),
    #[error("a permutation attribute needs an owning permutation")]
    OwnerRequired,
    #[error("owner {0} is not a permutation")]
    OwnerNotPermutation(NodeId),
    #[error("only permutation attributes can have an owner")]
    OwnerNotAllowed,
    #[error("attribute fields given for a {0}")]
    NotAnAttribute(NodeKind),
    #[error("{kind} cannot connect {from_kind} to {to_kind}")]
    IncompatibleEndpoints {
        kind: EdgeKind,
        from_kind: NodeKind,
        to_kind: NodeKind,
    },
    #[error("a link cannot connect a node to itself")]
    SelfLoop,
    #[error("{0} does not carry a label")]
    LabelNotSupported(EdgeKind),
    #[error("geometry must be finite with positive size")]
    InvalidGeometry,
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("nothing to redo")]
    NothingToRedo,
}

impl EditError {
    pub const fn token(&self) -> &'static str {
        match self {
            EditError::UnknownNode(_) => "unknown-node",
            EditError::UnknownElement(_) => "unknown-element",
            EditError::OwnerRequired => "owner-required",
            EditError::OwnerNotPermutation(_) => "owner-not-permutation",
            EditError::OwnerNotAllowed => "owner-not-allowed",
            EditError::NotAnAttribute(_) => "not-an-attribute",
            EditError::IncompatibleEndpoints { .. } => "incompatible-endpoints",
            EditError::SelfLoop => "self-loop",
            EditError::LabelNotSupported(_) => "label-not-supported",
            EditError::InvalidGeometry => "invalid-geometry",
            EditError::NothingToUndo => "nothing-to-undo",
            EditError::NothingToRedo => "nothing-to-redo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditOutcome {
    Applied {
        created: Vec<ElementRef>,
        revision: u64,
    },
    Cancelled(CancelReason),
    Rejected(EditError),
}

impl EditOutcome {
    pub fn is_applied(&self) -> bool {
        matches!(self, EditOutcome::Applied { .. })
    }

    /// The single element created by a creation command, if any.
    pub fn created(&self) -> Option<ElementRef> {
        match self {
            EditOutcome::Applied { created, .. } => created.first().copied(),
            _ => None,
        }
    }

    pub fn created_node(&self) -> Option<NodeId> {
        match self.created()? {
            ElementRef::Node(n) => Some(n),
            ElementRef::Edge(_) => None,
        }
    }

    pub fn created_edge(&self) -> Option<EdgeId> {
        match self.created()? {
            ElementRef::Edge(e) => Some(e),
            ElementRef::Node(_) => None,
        }
    }
}

impl Serialize for EditOutcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            EditOutcome::Applied { created, revision } => {
                let mut map = serializer.serialize_map(Some(3))?;
                map.serialize_entry("outcome", "applied")?;
                map.serialize_entry("created", created)?;
                map.serialize_entry("revision", revision)?;
                map.end()
            }
            EditOutcome::Cancelled(reason) => {
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("outcome", "cancelled")?;
                map.serialize_entry("reason", reason.token())?;
                map.end()
            }
            EditOutcome::Rejected(error) => {
                let mut map = serializer.serialize_map(Some(3))?;
                map.serialize_entry("outcome", "rejected")?;
                map.serialize_entry("error", error.token())?;
                map.serialize_entry("message", &error.to_string())?;
                map.end()
            }
        }
    }
}

/// Why a relationship may not be stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Refusal {
    Cancel(CancelReason),
    Reject(EditError),
}

impl From<Refusal> for EditOutcome {
    fn from(r: Refusal) -> Self {
        match r {
            Refusal::Cancel(c) => EditOutcome::Cancelled(c),
            Refusal::Reject(e) => EditOutcome::Rejected(e),
        }
    }
}

/// Checks a prospective `from -> to` relationship against the model.
/// `ignoring` names an existing edge that is being moved and must not count
/// as its own duplicate.
pub(crate) fn admit_edge(
    model: &Model,
    kind: EdgeKind,
    from: NodeId,
    to: NodeId,
    ignoring: Option<EdgeId>,
) -> Result<(), Refusal> {
    let from_kind = model
        .node(from)
        .ok_or(Refusal::Reject(EditError::UnknownNode(from)))?
        .kind;
    let to_kind = model
        .node(to)
        .ok_or(Refusal::Reject(EditError::UnknownNode(to)))?
        .kind;
    if model.connects(from, to, ignoring) {
        return Err(Refusal::Cancel(CancelReason::DuplicateEdge));
    }
    if !endpoint_allowed(kind, from_kind, to_kind) {
        return Err(Refusal::Reject(EditError::IncompatibleEndpoints {
            kind,
            from_kind,
            to_kind,
        }));
    }
    if from == to {
        return Err(Refusal::Reject(EditError::SelfLoop));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
struct Slot<K, V> {
    key: K,
    before: Option<V>,
    after: Option<V>,
}

impl<K, V> Slot<K, V> {
    fn image(&self, forward: bool) -> &Option<V> {
        if forward {
            &self.after
        } else {
            &self.before
        }
    }
}

/// The before/after images of every element one command touched.
#[derive(Debug, Clone, Default, PartialEq)]
struct Delta {
    nodes: Vec<Slot<NodeId, Node>>,
    edges: Vec<Slot<EdgeId, Edge>>,
    geometry: Vec<Slot<NodeId, Rect>>,
}

impl Delta {
    fn node(&mut self, model: &Model, id: NodeId, after: Option<Node>) {
        let before = model.node(id).cloned();
        self.nodes.push(Slot {
            key: id,
            before,
            after,
        });
    }

    fn edge(&mut self, model: &Model, id: EdgeId, after: Option<Edge>) {
        let before = model.edge(id).cloned();
        self.edges.push(Slot {
            key: id,
            before,
            after,
        });
    }

    fn geometry(&mut self, model: &Model, id: NodeId, after: Option<Rect>) {
        let before = model.bounds(id);
        if before != after {
            self.geometry.push(Slot {
                key: id,
                before,
                after,
            });
        }
    }

    fn write(&self, model: &mut Model, forward: bool) {
        for s in &self.nodes {
            model.put_node(s.key, s.image(forward).clone());
        }
        for s in &self.edges {
            model.put_edge(s.key, s.image(forward).clone());
        }
        for s in &self.geometry {
            model.put_geometry(s.key, *s.image(forward));
        }
    }
}

/// Single-writer mutation interface over one model, with undo and redo.
#[derive(Debug, Clone)]
pub struct Editor {
    model: Model,
    undo: Vec<Delta>,
    redo: Vec<Delta>,
}

impl Editor {
    pub fn new(model: Model) -> Self {
        Editor {
            model,
            undo: Vec::new(),
            redo: Vec::new(),
        }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn into_model(self) -> Model {
        self.model
    }

    pub fn can_undo(&self) -> bool {
        !self.undo.is_empty()
    }

    pub fn can_redo(&self) -> bool {
        !self.redo.is_empty()
    }

    pub fn apply(&mut self, command: EditCommand) -> EditOutcome {
        match command {
            EditCommand::CreateNode {
                kind,
                name,
                owner,
                attr_kind,
                attr_value,
            } => {
                if kind == NodeKind::PermutationAttribute {
                    let Some(owner) = owner else {
                        return EditOutcome::Rejected(EditError::OwnerRequired);
                    };
                    self.add_permutation_attribute(
                        owner,
                        name,
                        attr_kind.unwrap_or(AttributeValueKind::Qualitative),
                        attr_value,
                    )
                } else if attr_kind.is_some() || attr_value.is_some() {
                    EditOutcome::Rejected(EditError::NotAnAttribute(kind))
                } else {
                    self.create_node(kind, name, owner)
                }
            }
            EditCommand::CreateEdge {
                kind,
                from,
                to,
                label,
            } => self.create_labeled_edge(kind, from, to, label),
            EditCommand::SetLabel { target, name } => self.set_label(target, name),
            EditCommand::ReconnectEdge { edge, end, node } => self.reconnect_edge(edge, end, node),
            EditCommand::Delete { target } => self.delete_element(target),
            EditCommand::AddPermutationAttribute {
                permutation,
                name,
                value_kind,
                value,
            } => self.add_permutation_attribute(permutation, name, value_kind, value),
            EditCommand::MoveNode { node, rect } => self.move_node(node, rect),
            EditCommand::Undo => self.undo(),
            EditCommand::Redo => self.redo(),
        }
    }

    /// Creates a node. Permutation attributes need `owner`, a permutation;
    /// every other kind must not have one.
    pub fn create_node(
        &mut self,
        kind: NodeKind,
        name: Option<String>,
        owner: Option<NodeId>,
    ) -> EditOutcome {
        if kind == NodeKind::PermutationAttribute {
            return match owner {
                Some(owner) => self.add_permutation_attribute(
                    owner,
                    name,
                    AttributeValueKind::Qualitative,
                    None,
                ),
                None => EditOutcome::Rejected(EditError::OwnerRequired),
            };
        }
        if owner.is_some() {
            return EditOutcome::Rejected(EditError::OwnerNotAllowed);
        }
        let id = NodeId(self.model.allocate_id());
        let mut delta = Delta::default();
        delta.node(&self.model, id, Some(Node::new(id, kind, name)));
        delta.geometry(&self.model, id, Some(self.free_grid_slot()));
        self.commit(delta, vec![id.into()])
    }

    pub fn add_permutation_attribute(
        &mut self,
        permutation: NodeId,
        name: Option<String>,
        value_kind: AttributeValueKind,
        value: Option<String>,
    ) -> EditOutcome {
        match self.model.node(permutation) {
            None => return EditOutcome::Rejected(EditError::UnknownNode(permutation)),
            Some(n) if n.kind != NodeKind::Permutation => {
                return EditOutcome::Rejected(EditError::OwnerNotPermutation(permutation))
            }
            Some(_) => {}
        }
        let id = NodeId(self.model.allocate_id());
        let mut delta = Delta::default();
        delta.node(
            &self.model,
            id,
            Some(Node::attribute(id, permutation, name, value_kind, value)),
        );
        if let Some(owner_box) = self.model.bounds(permutation) {
            let siblings: Vec<NodeId> = self
                .model
                .attributes_of(permutation)
                .map(|n| n.id)
                .chain(std::iter::once(id))
                .collect();
            let grown = Rect {
                h: owner_box.h.max(permutation_height(siblings.len())),
                ..owner_box
            };
            delta.geometry(&self.model, permutation, Some(grown));
            for (attr, slot) in siblings.iter().zip(attribute_slots(&grown, siblings.len())) {
                delta.geometry(&self.model, *attr, Some(slot));
            }
        }
        self.commit(delta, vec![id.into()])
    }

    pub fn create_edge(&mut self, kind: EdgeKind, from: NodeId, to: NodeId) -> EditOutcome {
        self.create_labeled_edge(kind, from, to, None)
    }

    pub fn create_labeled_edge(
        &mut self,
        kind: EdgeKind,
        from: NodeId,
        to: NodeId,
        label: Option<String>,
    ) -> EditOutcome {
        if let Err(refusal) = admit_edge(&self.model, kind, from, to, None) {
            return refusal.into();
        }
        if label.is_some() && !kind.supports_label() {
            return EditOutcome::Rejected(EditError::LabelNotSupported(kind));
        }
        let id = EdgeId(self.model.allocate_id());
        let mut delta = Delta::default();
        delta.edge(
            &self.model,
            id,
            Some(Edge {
                id,
                kind,
                from,
                to,
                label,
            }),
        );
        self.commit(delta, vec![id.into()])
    }

    /// Replaces a node name or a contribution label verbatim. Empty text is
    /// accepted here; validation reports it.
    pub fn set_label(&mut self, target: ElementRef, name: impl Into<String>) -> EditOutcome {
        let name = name.into();
        let mut delta = Delta::default();
        match target {
            ElementRef::Node(id) => {
                let Some(node) = self.model.node(id) else {
                    return EditOutcome::Rejected(EditError::UnknownElement(target));
                };
                let renamed = Node {
                    name: Some(name),
                    ..node.clone()
                };
                delta.node(&self.model, id, Some(renamed));
            }
            ElementRef::Edge(id) => {
                let Some(edge) = self.model.edge(id) else {
                    return EditOutcome::Rejected(EditError::UnknownElement(target));
                };
                if !edge.kind.supports_label() {
                    return EditOutcome::Rejected(EditError::LabelNotSupported(edge.kind));
                }
                let relabeled = Edge {
                    label: Some(name),
                    ..edge.clone()
                };
                delta.edge(&self.model, id, Some(relabeled));
            }
        }
        self.commit(delta, Vec::new())
    }

    pub fn reconnect_edge(&mut self, edge: EdgeId, end: EdgeEnd, node: NodeId) -> EditOutcome {
        let Some(current) = self.model.edge(edge) else {
            return EditOutcome::Rejected(EditError::UnknownElement(edge.into()));
        };
        if self.model.node(node).is_none() {
            return EditOutcome::Rejected(EditError::UnknownElement(node.into()));
        }
        let mut moved = current.clone();
        match end {
            EdgeEnd::Source => moved.from = node,
            EdgeEnd::Target => moved.to = node,
        }
        if moved == *current {
            return EditOutcome::Cancelled(CancelReason::NoChange);
        }
        if let Err(refusal) = admit_edge(&self.model, moved.kind, moved.from, moved.to, Some(edge))
        {
            return refusal.into();
        }
        let mut delta = Delta::default();
        delta.edge(&self.model, edge, Some(moved));
        self.commit(delta, Vec::new())
    }

    /// Deletes an edge, or a node together with its incident edges and, for
    /// a permutation, its contained attributes.
    pub fn delete_element(&mut self, target: ElementRef) -> EditOutcome {
        if !self.model.contains(target) {
            return EditOutcome::Rejected(EditError::UnknownElement(target));
        }
        let mut delta = Delta::default();
        match target {
            ElementRef::Edge(id) => delta.edge(&self.model, id, None),
            ElementRef::Node(id) => {
                let doomed: Vec<NodeId> = std::iter::once(id)
                    .chain(self.model.attributes_of(id).map(|n| n.id))
                    .collect();
                let edges: Vec<EdgeId> = self
                    .model
                    .edges()
                    .filter(|e| doomed.contains(&e.from) || doomed.contains(&e.to))
                    .map(|e| e.id)
                    .collect();
                for e in edges {
                    delta.edge(&self.model, e, None);
                }
                for n in doomed {
                    delta.node(&self.model, n, None);
                    delta.geometry(&self.model, n, None);
                }
            }
        }
        self.commit(delta, Vec::new())
    }

    /// Places a node's box. Contained attributes travel with a moved
    /// permutation.
    pub fn move_node(&mut self, node: NodeId, rect: Rect) -> EditOutcome {
        if self.model.node(node).is_none() {
            return EditOutcome::Rejected(EditError::UnknownElement(node.into()));
        }
        if !rect.is_valid() {
            return EditOutcome::Rejected(EditError::InvalidGeometry);
        }
        let previous = self.model.bounds(node);
        if previous == Some(rect) {
            return EditOutcome::Cancelled(CancelReason::NoChange);
        }
        let mut delta = Delta::default();
        delta.geometry(&self.model, node, Some(rect));
        if let Some(prev) = previous {
            let (dx, dy) = (rect.x - prev.x, rect.y - prev.y);
            for attr in self.model.attributes_of(node) {
                if let Some(b) = self.model.bounds(attr.id) {
                    delta.geometry(&self.model, attr.id, Some(b.translated(dx, dy)));
                }
            }
        }
        self.commit(delta, Vec::new())
    }

    pub fn undo(&mut self) -> EditOutcome {
        let Some(delta) = self.undo.pop() else {
            return EditOutcome::Rejected(EditError::NothingToUndo);
        };
        delta.write(&mut self.model, false);
        self.redo.push(delta);
        EditOutcome::Applied {
            created: Vec::new(),
            revision: self.model.bump_revision(),
        }
    }

    pub fn redo(&mut self) -> EditOutcome {
        let Some(delta) = self.redo.pop() else {
            return EditOutcome::Rejected(EditError::NothingToRedo);
        };
        delta.write(&mut self.model, true);
        self.undo.push(delta);
        EditOutcome::Applied {
            created: Vec::new(),
            revision: self.model.bump_revision(),
        }
    }

    fn commit(&mut self, delta: Delta, created: Vec<ElementRef>) -> EditOutcome {
        delta.write(&mut self.model, true);
        self.undo.push(delta);
        self.redo.clear();
        EditOutcome::Applied {
            created,
            revision: self.model.bump_revision(),
        }
    }

    /// First grid slot not overlapping any placed top-level node.
    fn free_grid_slot(&self) -> Rect {
        let placed: Vec<Rect> = self
            .model
            .top_level_nodes()
            .filter_map(|n| self.model.bounds(n.id))
            .collect();
        (0..)
            .map(grid_slot)
            .find(|slot| placed.iter().all(|p| !p.overlaps(slot)))
            .expect("grid is unbounded")
    }
}
