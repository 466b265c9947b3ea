//! The closed type system of the QualiBD language.
//!
//! Seven element kinds, five refinement (link) kinds, the table of legal
//! link endpoints and the visual style of every kind. All tables are static
//! and immutable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A kind token that names no member of the enumeration it was parsed into.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown kind `{0}`")]
pub struct UnknownKind(pub String);

/// Kind of a model element (a diagram node).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Goal,
    NfrSoftgoal,
    BigDataCharacteristic,
    Permutation,
    PermutationAttribute,
    OperationalizingSoftgoal,
    ClaimSoftgoal,
}

impl NodeKind {
    pub const ALL: [NodeKind; 7] = [
        NodeKind::Goal,
        NodeKind::NfrSoftgoal,
        NodeKind::BigDataCharacteristic,
        NodeKind::Permutation,
        NodeKind::PermutationAttribute,
        NodeKind::OperationalizingSoftgoal,
        NodeKind::ClaimSoftgoal,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            NodeKind::Goal => "Goal",
            NodeKind::NfrSoftgoal => "NfrSoftgoal",
            NodeKind::BigDataCharacteristic => "BigDataCharacteristic",
            NodeKind::Permutation => "Permutation",
            NodeKind::PermutationAttribute => "PermutationAttribute",
            NodeKind::OperationalizingSoftgoal => "OperationalizingSoftgoal",
            NodeKind::ClaimSoftgoal => "ClaimSoftgoal",
        }
    }

    /// Position in the canonical declaration order used by the text format.
    /// Attributes are nested in their permutation and never declared at top level.
    pub const fn declaration_rank(self) -> u8 {
        match self {
            NodeKind::Goal => 0,
            NodeKind::BigDataCharacteristic => 1,
            NodeKind::NfrSoftgoal => 2,
            NodeKind::Permutation => 3,
            NodeKind::PermutationAttribute => 4,
            NodeKind::OperationalizingSoftgoal => 5,
            NodeKind::ClaimSoftgoal => 6,
        }
    }

    /// Layout tier, following the goal → characteristic/softgoal →
    /// permutation → operationalization → claim flow.
    pub const fn tier(self) -> u32 {
        match self {
            NodeKind::Goal => 0,
            NodeKind::BigDataCharacteristic | NodeKind::NfrSoftgoal => 1,
            NodeKind::Permutation | NodeKind::PermutationAttribute => 2,
            NodeKind::OperationalizingSoftgoal => 3,
            NodeKind::ClaimSoftgoal => 4,
        }
    }

    pub const fn is_attribute(self) -> bool {
        matches!(self, NodeKind::PermutationAttribute)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownKind(s.to_owned()))
    }
}

/// Kind of a refinement link. Links are semantic elements of their own,
/// carrying `from` and `to` references.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    AssociationLink,
    PermutationLink,
    DecompositionLink,
    ContributionLink,
    ArgumentationLink,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 5] = [
        EdgeKind::AssociationLink,
        EdgeKind::PermutationLink,
        EdgeKind::DecompositionLink,
        EdgeKind::ContributionLink,
        EdgeKind::ArgumentationLink,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            EdgeKind::AssociationLink => "AssociationLink",
            EdgeKind::PermutationLink => "PermutationLink",
            EdgeKind::DecompositionLink => "DecompositionLink",
            EdgeKind::ContributionLink => "ContributionLink",
            EdgeKind::ArgumentationLink => "ArgumentationLink",
        }
    }

    /// Only contribution links carry a free-text label ("help", "hurt", ...).
    pub const fn supports_label(self) -> bool {
        matches!(self, EdgeKind::ContributionLink)
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EdgeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownKind(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AttributeValueKind {
    Quantitative,
    Qualitative,
}

impl AttributeValueKind {
    pub const ALL: [AttributeValueKind; 2] = [
        AttributeValueKind::Quantitative,
        AttributeValueKind::Qualitative,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            AttributeValueKind::Quantitative => "Quantitative",
            AttributeValueKind::Qualitative => "Qualitative",
        }
    }
}

impl fmt::Display for AttributeValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttributeValueKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttributeValueKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownKind(s.to_owned()))
    }
}

/// One legal `(link kind, source kind, target kind)` combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EndpointRule {
    pub edge_kind: EdgeKind,
    pub from_kind: NodeKind,
    pub to_kind: NodeKind,
}

const fn rule(edge_kind: EdgeKind, from_kind: NodeKind, to_kind: NodeKind) -> EndpointRule {
    EndpointRule {
        edge_kind,
        from_kind,
        to_kind,
    }
}

/// The normative endpoint table. Permutation attributes never appear here:
/// they attach to permutations by containment.
pub const ENDPOINT_RULES: [EndpointRule; 12] = {
    use EdgeKind::*;
    use NodeKind::*;
    [
        rule(AssociationLink, Goal, BigDataCharacteristic),
        rule(AssociationLink, Goal, NfrSoftgoal),
        rule(PermutationLink, BigDataCharacteristic, Permutation),
        rule(PermutationLink, NfrSoftgoal, Permutation),
        rule(DecompositionLink, Goal, Goal),
        rule(DecompositionLink, NfrSoftgoal, NfrSoftgoal),
        rule(
            DecompositionLink,
            OperationalizingSoftgoal,
            OperationalizingSoftgoal,
        ),
        rule(DecompositionLink, Permutation, Permutation),
        rule(ContributionLink, OperationalizingSoftgoal, Permutation),
        rule(ContributionLink, OperationalizingSoftgoal, NfrSoftgoal),
        rule(ContributionLink, OperationalizingSoftgoal, Goal),
        rule(ArgumentationLink, ClaimSoftgoal, OperationalizingSoftgoal),
    ]
};

pub fn endpoint_allowed(edge_kind: EdgeKind, from_kind: NodeKind, to_kind: NodeKind) -> bool {
    ENDPOINT_RULES
        .iter()
        .any(|r| r.edge_kind == edge_kind && r.from_kind == from_kind && r.to_kind == to_kind)
}

/// Either kind of language element, for lookups that span both enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum ElementKind {
    Node(NodeKind),
    Edge(EdgeKind),
}

impl From<NodeKind> for ElementKind {
    fn from(kind: NodeKind) -> Self {
        ElementKind::Node(kind)
    }
}

impl From<EdgeKind> for ElementKind {
    fn from(kind: EdgeKind) -> Self {
        ElementKind::Edge(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Cloud,
    RoundedBox,
    Box,
    Diamond,
    Note,
}

impl Shape {
    pub const fn as_str(self) -> &'static str {
        match self {
            Shape::Cloud => "cloud",
            Shape::RoundedBox => "rounded-box",
            Shape::Box => "box",
            Shape::Diamond => "diamond",
            Shape::Note => "note",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineStyle {
    Solid,
    Dashed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelPlacement {
    Inside,
    Below,
}

/// Visual mapping of one kind. For links `shape` is `None` and `fill` is the
/// stroke colour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StyleSpec {
    pub kind: ElementKind,
    pub shape: Option<Shape>,
    pub fill: &'static str,
    pub line: LineStyle,
    pub label_placement: LabelPlacement,
}

pub fn style_for(kind: impl Into<ElementKind>) -> StyleSpec {
    let kind = kind.into();
    let (shape, fill, line, label_placement) = match kind {
        ElementKind::Node(node) => match node {
            NodeKind::Goal => (
                Shape::RoundedBox,
                "#dae8fc",
                LineStyle::Solid,
                LabelPlacement::Inside,
            ),
            NodeKind::NfrSoftgoal => (
                Shape::Cloud,
                "#fff2cc",
                LineStyle::Solid,
                LabelPlacement::Inside,
            ),
            NodeKind::BigDataCharacteristic => (
                Shape::Diamond,
                "#f8cecc",
                LineStyle::Solid,
                LabelPlacement::Below,
            ),
            NodeKind::Permutation => (
                Shape::Box,
                "#e1d5e7",
                LineStyle::Solid,
                LabelPlacement::Inside,
            ),
            NodeKind::PermutationAttribute => (
                Shape::Box,
                "#ffffff",
                LineStyle::Solid,
                LabelPlacement::Inside,
            ),
            NodeKind::OperationalizingSoftgoal => (
                Shape::Cloud,
                "#d5e8d4",
                LineStyle::Solid,
                LabelPlacement::Inside,
            ),
            NodeKind::ClaimSoftgoal => (
                Shape::Note,
                "#f5f5f5",
                LineStyle::Dashed,
                LabelPlacement::Inside,
            ),
        },
        ElementKind::Edge(edge) => {
            let line = match edge {
                EdgeKind::ContributionLink | EdgeKind::ArgumentationLink => LineStyle::Dashed,
                _ => LineStyle::Solid,
            };
            return StyleSpec {
                kind,
                shape: None,
                fill: "#333333",
                line,
                label_placement: LabelPlacement::Inside,
            };
        }
    };
    StyleSpec {
        kind,
        shape: Some(shape),
        fill,
        line,
        label_placement,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_examples() {
        use EdgeKind::*;
        use NodeKind::*;
        assert!(endpoint_allowed(
            PermutationLink,
            BigDataCharacteristic,
            Permutation
        ));
        assert!(endpoint_allowed(AssociationLink, Goal, NfrSoftgoal));
        assert!(!endpoint_allowed(PermutationLink, ClaimSoftgoal, Goal));
        assert!(endpoint_allowed(DecompositionLink, Goal, Goal));
        assert!(!endpoint_allowed(ArgumentationLink, Goal, Goal));
    }

    #[test]
    fn endpoint_table_is_exactly_the_rule_list() {
        let mut allowed = 0;
        for e in EdgeKind::ALL {
            for f in NodeKind::ALL {
                for t in NodeKind::ALL {
                    if endpoint_allowed(e, f, t) {
                        allowed += 1;
                        assert!(!f.is_attribute() && !t.is_attribute());
                    }
                }
            }
        }
        assert_eq!(allowed, ENDPOINT_RULES.len());
    }

    #[test]
    fn style_examples() {
        assert_eq!(style_for(NodeKind::Goal).shape, Some(Shape::RoundedBox));
        assert_eq!(style_for(NodeKind::NfrSoftgoal).shape, Some(Shape::Cloud));
        assert_eq!(style_for(NodeKind::ClaimSoftgoal).shape, Some(Shape::Note));
        assert_eq!(
            style_for(EdgeKind::ContributionLink).line,
            LineStyle::Dashed
        );
        assert_eq!(style_for(EdgeKind::PermutationLink).line, LineStyle::Solid);
    }

    #[test]
    fn styles_are_total_and_self_describing() {
        for k in NodeKind::ALL {
            let s = style_for(k);
            assert_eq!(s.kind, ElementKind::Node(k));
            assert!(s.shape.is_some());
        }
        for k in EdgeKind::ALL {
            assert_eq!(style_for(k).kind, ElementKind::Edge(k));
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in NodeKind::ALL {
            assert_eq!(k.as_str().parse::<NodeKind>().unwrap(), k);
        }
        for k in EdgeKind::ALL {
            assert_eq!(k.as_str().parse::<EdgeKind>().unwrap(), k);
        }
        for k in AttributeValueKind::ALL {
            assert_eq!(k.as_str().parse::<AttributeValueKind>().unwrap(), k);
        }
        assert!("Softgoal".parse::<NodeKind>().is_err());
    }
}
