//! The `.qbd` text format: a small declarative language that is the
//! diff-friendly twin of the JSON document.
//!
//! ```text
//! model "Tweet analytics" {
//!   goal G1 "Ingest tweets in real time"
//!   characteristic C1 "Velocity"
//!   softgoal S1 "Latency"
//!   permutation P1 "Velocity x Latency" {
//!     attribute quantitative "max_latency" = "200 ms"
//!   }
//!
//!   associate G1 -> C1
//!   permute C1 -> P1
//!   permute S1 -> P1
//! }
//! ```
//!
//! Geometry is not part of the text form.

mod format;
mod lexer;
mod parser;

use std::fmt;

use crate::metamodel::{AttributeValueKind, EdgeKind, NodeKind};

pub use format::{format, FormatError};
pub use parser::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    /// 1-based.
    pub line: u32,
    /// 1-based, in characters.
    pub column: u32,
    pub length: u32,
}

impl SourceSpan {
    pub const fn new(line: u32, column: u32, length: u32) -> Self {
        SourceSpan {
            line,
            column,
            length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    DuplicateIdentifier,
    DuplicateEdge,
    IncompatibleEndpoints {
        kind: EdgeKind,
        from_kind: NodeKind,
        to_kind: NodeKind,
    },
    SelfLoop,
    LabelNotSupported(EdgeKind),
    BlockNotAllowed(NodeKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn syntax(span: SourceSpan, expected: Vec<String>, found: String) -> Self {
        ParseError {
            span,
            expected,
            found,
            kind: ParseErrorKind::Syntax,
        }
    }

    pub(crate) fn semantic(
        span: SourceSpan,
        kind: ParseErrorKind,
        expected: &str,
        found: &str,
    ) -> Self {
        ParseError {
            span,
            expected: vec![expected.to_owned()],
            found: found.to_owned(),
            kind,
        }
    }

    /// The message without the position prefix.
    pub fn message(&self) -> String {
        match &self.kind {
            ParseErrorKind::Syntax => {
                format!(
                    "expected {}, found {}",
                    join_alternatives(&self.expected),
                    self.found
                )
            }
            ParseErrorKind::UnknownIdentifier => format!("unknown identifier {}", self.found),
            ParseErrorKind::DuplicateIdentifier => format!("duplicate identifier {}", self.found),
            ParseErrorKind::DuplicateEdge => {
                format!("duplicate-edge: {} are already connected", self.found)
            }
            ParseErrorKind::IncompatibleEndpoints {
                kind,
                from_kind,
                to_kind,
            } => format!("incompatible-endpoints: {kind} cannot connect {from_kind} to {to_kind}"),
            ParseErrorKind::SelfLoop => format!("self-loop: {} links a node to itself", self.found),
            ParseErrorKind::LabelNotSupported(kind) => format!("{kind} does not carry a label"),
            ParseErrorKind::BlockNotAllowed(kind) => {
                format!("only permutations take an attribute block, not {kind}")
            }
        }
    }
}

fn join_alternatives(items: &[String]) -> String {
    match items {
        [] => "something else".to_owned(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} or {last}", init.join(", ")),
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}",
            self.span.line,
            self.span.column,
            self.message()
        )
    }
}

impl std::error::Error for ParseError {}

impl serde::Serialize for ParseError {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ParseError", 6)?;
        s.serialize_field("line", &self.span.line)?;
        s.serialize_field("column", &self.span.column)?;
        s.serialize_field("length", &self.span.length)?;
        s.serialize_field("message", &self.message())?;
        s.serialize_field("expected", &self.expected)?;
        s.serialize_field("found", &self.found)?;
        s.end()
    }
}

pub(crate) fn node_keyword(kind: NodeKind) -> Option<&'static str> {
    Some(match kind {
        NodeKind::Goal => "goal",
        NodeKind::NfrSoftgoal => "softgoal",
        NodeKind::BigDataCharacteristic => "characteristic",
        NodeKind::Permutation => "permutation",
        NodeKind::OperationalizingSoftgoal => "opgoal",
        NodeKind::ClaimSoftgoal => "claim",
        NodeKind::PermutationAttribute => return None,
    })
}

pub(crate) fn node_kind_for_keyword(word: &str) -> Option<NodeKind> {
    NodeKind::ALL
        .into_iter()
        .find(|k| node_keyword(*k) == Some(word))
}

pub(crate) fn edge_keyword(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::AssociationLink => "associate",
        EdgeKind::PermutationLink => "permute",
        EdgeKind::DecompositionLink => "decompose",
        EdgeKind::ContributionLink => "contribute",
        EdgeKind::ArgumentationLink => "argue",
    }
}

pub(crate) fn edge_kind_for_keyword(word: &str) -> Option<EdgeKind> {
    EdgeKind::ALL.into_iter().find(|k| edge_keyword(*k) == word)
}

pub(crate) fn value_kind_keyword(kind: AttributeValueKind) -> &'static str {
    match kind {
        AttributeValueKind::Quantitative => "quantitative",
        AttributeValueKind::Qualitative => "qualitative",
    }
}

/// Identifier prefix used by the formatter for each declarable kind.
pub(crate) fn ident_prefix(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Goal => "G",
        NodeKind::BigDataCharacteristic => "C",
        NodeKind::NfrSoftgoal => "S",
        NodeKind::Permutation => "P",
        NodeKind::OperationalizingSoftgoal => "O",
        NodeKind::ClaimSoftgoal => "K",
        NodeKind::PermutationAttribute => "A",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keywords_are_one_to_one() {
        for k in NodeKind::ALL {
            if let Some(word) = node_keyword(k) {
                assert_eq!(node_kind_for_keyword(word), Some(k));
            }
        }
        for k in EdgeKind::ALL {
            assert_eq!(edge_kind_for_keyword(edge_keyword(k)), Some(k));
        }
    }

    #[test]
    fn syntax_message_shape() {
        let e = ParseError::syntax(
            SourceSpan::new(3, 7, 1),
            vec!["identifier".into(), "`}`".into()],
            "\"x\"".into(),
        );
        assert_eq!(
            e.to_string(),
            "3:7: expected identifier or `}`, found \"x\""
        );
    }
}
