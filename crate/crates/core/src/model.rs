//! The model document: nodes, element-based edges, containment and diagram
//! geometry.
//!
//! A [`Model`] is only mutated through [`crate::edit::Editor`] (which keeps
//! every invariant) or by the decoders, which may load structurally broken
//! documents so that validation can report on them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::Rect;
use crate::metamodel::{AttributeValueKind, EdgeKind, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed element id `{0}`")]
pub struct BadId(pub String);

macro_rules! numbered_id {
    ($name:ident, $prefix:literal) => {
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl FromStr for $name {
            type Err = BadId;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.strip_prefix($prefix)
                    .filter(|digits| {
                        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
                    })
                    .and_then(|digits| digits.parse().ok())
                    .map($name)
                    .ok_or_else(|| BadId(s.to_owned()))
            }
        }

        impl TryFrom<String> for $name {
            type Error = BadId;

            fn try_from(s: String) -> Result<Self, Self::Error> {
                s.parse()
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.to_string()
            }
        }
    };
}

numbered_id!(NodeId, "n");
numbered_id!(EdgeId, "e");

/// Reference to either a node or an edge. Both draw from one counter, so the
/// numeric part alone is already unique within a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ElementRef {
    Node(NodeId),
    Edge(EdgeId),
}

impl ElementRef {
    pub fn number(&self) -> u64 {
        match self {
            ElementRef::Node(n) => n.0,
            ElementRef::Edge(e) => e.0,
        }
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementRef::Node(n) => n.fmt(f),
            ElementRef::Edge(e) => e.fmt(f),
        }
    }
}

impl FromStr for ElementRef {
    type Err = BadId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.starts_with('n') {
            s.parse().map(ElementRef::Node)
        } else {
            s.parse().map(ElementRef::Edge)
        }
    }
}

impl TryFrom<String> for ElementRef {
    type Error = BadId;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ElementRef> for String {
    fn from(r: ElementRef) -> String {
        r.to_string()
    }
}

impl From<NodeId> for ElementRef {
    fn from(id: NodeId) -> Self {
        ElementRef::Node(id)
    }
}

impl From<EdgeId> for ElementRef {
    fn from(id: EdgeId) -> Self {
        ElementRef::Edge(id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModelId(pub String);

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub name: Option<String>,
    /// Containing permutation; set only for permutation attributes.
    pub owner: Option<NodeId>,
    pub attr_value_kind: Option<AttributeValueKind>,
    pub attr_value: Option<String>,
}

impl Node {
    pub fn new(id: NodeId, kind: NodeKind, name: Option<String>) -> Self {
        Node {
            id,
            kind,
            name,
            owner: None,
            attr_value_kind: None,
            attr_value: None,
        }
    }

    pub fn attribute(
        id: NodeId,
        owner: NodeId,
        name: Option<String>,
        value_kind: AttributeValueKind,
        value: Option<String>,
    ) -> Self {
        Node {
            id,
            kind: NodeKind::PermutationAttribute,
            name,
            owner: Some(owner),
            attr_value_kind: Some(value_kind),
            attr_value: value,
        }
    }

    /// True when the name is absent or only whitespace.
    pub fn has_empty_label(&self) -> bool {
        self.name.as_deref().is_none_or(|n| n.trim().is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub kind: EdgeKind,
    pub from: NodeId,
    pub to: NodeId,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    id: ModelId,
    name: String,
    nodes: BTreeMap<NodeId, Node>,
    edges: BTreeMap<EdgeId, Edge>,
    geometry: BTreeMap<NodeId, Rect>,
    revision: u64,
    next_id: u64,
}

impl Model {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        Model {
            id: ModelId(id.into()),
            name: name.into(),
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
            geometry: BTreeMap::new(),
            revision: 0,
            next_id: 1,
        }
    }

    pub fn id(&self) -> &ModelId {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    /// The next number the id counter will hand out.
    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.values()
    }

    /// Edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.values()
    }

    pub fn geometry(&self) -> &BTreeMap<NodeId, Rect> {
        &self.geometry
    }

    pub fn bounds(&self, id: NodeId) -> Option<Rect> {
        self.geometry.get(&id).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn contains(&self, element: ElementRef) -> bool {
        match element {
            ElementRef::Node(n) => self.nodes.contains_key(&n),
            ElementRef::Edge(e) => self.edges.contains_key(&e),
        }
    }

    /// Nodes not contained in a permutation, in id order.
    pub fn top_level_nodes(&self) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.values().filter(|n| n.owner.is_none())
    }

    /// Attributes contained in `permutation`, in id order.
    pub fn attributes_of(&self, permutation: NodeId) -> impl Iterator<Item = &Node> + '_ {
        self.nodes
            .values()
            .filter(move |n| n.owner == Some(permutation))
    }

    pub fn incident_edges(&self, node: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.edges
            .values()
            .filter(move |e| e.from == node || e.to == node)
    }

    /// Outgoing relationships of `from` whose target is `to`, optionally
    /// ignoring one edge (the one being reconnected).
    pub fn connects(&self, from: NodeId, to: NodeId, ignoring: Option<EdgeId>) -> bool {
        self.edges
            .values()
            .any(|e| e.from == from && e.to == to && Some(e.id) != ignoring)
    }

    /// Equality of everything a user can see: id, name, elements and
    /// geometry. Bookkeeping counters (revision, id counter) are ignored.
    pub fn same_content(&self, other: &Model) -> bool {
        self.id == other.id
            && self.name == other.name
            && self.nodes == other.nodes
            && self.edges == other.edges
            && self.geometry == other.geometry
    }

    /// Shifts every element number up by `offset`, keeping relative order.
    pub fn rebase_ids(&mut self, offset: u64) {
        let shift_node = |id: NodeId| NodeId(id.0 + offset);
        self.nodes = std::mem::take(&mut self.nodes)
            .into_values()
            .map(|mut n| {
                n.id = shift_node(n.id);
                n.owner = n.owner.map(shift_node);
                (n.id, n)
            })
            .collect();
        self.edges = std::mem::take(&mut self.edges)
            .into_values()
            .map(|mut e| {
                e.id = EdgeId(e.id.0 + offset);
                e.from = shift_node(e.from);
                e.to = shift_node(e.to);
                (e.id, e)
            })
            .collect();
        self.geometry = std::mem::take(&mut self.geometry)
            .into_iter()
            .map(|(id, r)| (shift_node(id), r))
            .collect();
        self.next_id += offset;
    }

    pub fn set_id(&mut self, id: ModelId) {
        self.id = id;
    }

    pub fn set_revision(&mut self, revision: u64) {
        self.revision = revision;
    }

    pub(crate) fn allocate_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub(crate) fn bump_revision(&mut self) -> u64 {
        self.revision += 1;
        self.revision
    }

    pub(crate) fn set_next_id(&mut self, next_id: u64) {
        self.next_id = next_id;
    }

    /// Raw slot writes. They keep the id counter ahead of every stored id
    /// but check nothing else.
    pub(crate) fn put_node(&mut self, id: NodeId, node: Option<Node>) {
        self.next_id = self.next_id.max(id.0 + 1);
        match node {
            Some(n) => self.nodes.insert(id, n),
            None => self.nodes.remove(&id),
        };
    }

    pub(crate) fn put_edge(&mut self, id: EdgeId, edge: Option<Edge>) {
        self.next_id = self.next_id.max(id.0 + 1);
        match edge {
            Some(e) => self.edges.insert(id, e),
            None => self.edges.remove(&id),
        };
    }

    pub(crate) fn put_geometry(&mut self, id: NodeId, rect: Option<Rect>) {
        match rect {
            Some(r) => self.geometry.insert(id, r),
            None => self.geometry.remove(&id),
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_print_and_parse() {
        assert_eq!(NodeId(12).to_string(), "n12");
        assert_eq!("e7".parse::<EdgeId>().unwrap(), EdgeId(7));
        assert_eq!(
            "n3".parse::<ElementRef>().unwrap(),
            ElementRef::Node(NodeId(3))
        );
        assert_eq!(
            "e3".parse::<ElementRef>().unwrap(),
            ElementRef::Edge(EdgeId(3))
        );
        for bad in ["", "n", "x1", "n-1", "n1a", "e+2", "n１"] {
            assert!(bad.parse::<ElementRef>().is_err(), "{bad}");
        }
    }

    #[test]
    fn empty_label_covers_absent_and_whitespace() {
        let mut node = Node::new(NodeId(1), NodeKind::Goal, None);
        assert!(node.has_empty_label());
        node.name = Some(" \t ".into());
        assert!(node.has_empty_label());
        node.name = Some("Velocity".into());
        assert!(!node.has_empty_label());
    }

    #[test]
    fn rebase_shifts_every_reference() {
        let mut m = Model::new("m", "m");
        m.put_node(
            NodeId(1),
            Some(Node::new(NodeId(1), NodeKind::Permutation, None)),
        );
        m.put_node(
            NodeId(2),
            Some(Node::attribute(
                NodeId(2),
                NodeId(1),
                None,
                AttributeValueKind::Qualitative,
                None,
            )),
        );
        m.put_geometry(NodeId(1), Some(Rect::new(0.0, 0.0, 1.0, 1.0)));
        m.rebase_ids(10);
        assert_eq!(m.next_id(), 13);
        assert_eq!(m.node(NodeId(12)).unwrap().owner, Some(NodeId(11)));
        assert!(m.bounds(NodeId(11)).is_some());
        assert!(m.node(NodeId(1)).is_none());
    }
}
