use std::collections::hash_map::Entry;
use std::collections::HashMap;

use super::lexer::{tokenize, Tok, Token};
use super::{edge_kind_for_keyword, node_kind_for_keyword, ParseError, ParseErrorKind, SourceSpan};
use crate::edit::{admit_edge, CancelReason, EditError, Refusal};
use crate::metamodel::{AttributeValueKind, EdgeKind, NodeKind};
use crate::model::{Edge, EdgeId, Model, Node, NodeId};

/// Parses a `.qbd` document. All independent errors are reported, with
/// recovery at statement boundaries (`;` or the next line).
pub fn parse(text: &str) -> Result<Model, Vec<ParseError>> {
    let (tokens, mut errors) = tokenize(text);
    let mut parser = Parser {
        tokens,
        pos: 0,
        errors: Vec::new(),
        idents: HashMap::new(),
        model: None,
    };
    parser.document();
    errors.append(&mut parser.errors);
    if errors.is_empty() {
        Ok(parser.model.unwrap_or_else(|| Model::new("model", "")))
    } else {
        errors.sort_by_key(|e| e.span);
        Err(errors)
    }
}

/// Signals that the current statement was abandoned; the error is already recorded.
struct Abandon;

type Step<T> = Result<T, Abandon>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
    idents: HashMap<String, NodeId>,
    model: Option<Model>,
}

fn model_id_for(name: &str) -> String {
    let slug: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '-'
            }
        })
        .collect();
    let slug = slug.trim_matches('-');
    if slug.is_empty() {
        "model".to_owned()
    } else {
        slug.to_owned()
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if !matches!(token.tok, Tok::Eof) {
            self.pos += 1;
        }
        token
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(w) if w == word)
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek().tok == *tok
    }

    fn fail<T>(&mut self, expected: &[&str]) -> Step<T> {
        let token = self.peek();
        self.errors.push(ParseError::syntax(
            token.span,
            expected.iter().map(|s| (*s).to_owned()).collect(),
            token.describe(),
        ));
        Err(Abandon)
    }

    fn expect(&mut self, tok: Tok, description: &str) -> Step<Token> {
        if self.at(&tok) {
            Ok(self.advance())
        } else {
            self.fail(&[description])
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Step<Token> {
        if self.at_keyword(word) {
            Ok(self.advance())
        } else {
            self.fail(&[&format!("`{word}`")])
        }
    }

    fn ident(&mut self) -> Step<(String, SourceSpan)> {
        match &self.peek().tok {
            Tok::Ident(name) => {
                let name = name.clone();
                let span = self.advance().span;
                Ok((name, span))
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn string(&mut self) -> Step<String> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.fail(&["string"]),
        }
    }

    fn optional_string(&mut self) -> Option<String> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.advance();
                Some(s)
            }
            _ => None,
        }
    }

    /// Skips the rest of a broken statement that began on `start_line`.
    fn recover(&mut self, start: usize, start_line: u32) {
        if self.pos == start {
            self.advance();
        }
        loop {
            let token = self.peek();
            match token.tok {
                Tok::Eof | Tok::RBrace => return,
                Tok::Semi => {
                    self.advance();
                    return;
                }
                _ if token.span.line > start_line => return,
                _ => {
                    self.advance();
                }
            }
        }
    }

    fn model_mut(&mut self) -> &mut Model {
        self.model.get_or_insert_with(|| Model::new("model", ""))
    }

    fn document(&mut self) {
        let header = (|| -> Step<String> {
            self.expect_keyword("model")?;
            let name = self.string()?;
            self.expect(Tok::LBrace, "`{`")?;
            Ok(name)
        })();
        let Ok(name) = header else {
            return;
        };
        self.model = Some(Model::new(model_id_for(&name), name));

        loop {
            match self.peek().tok {
                Tok::RBrace => {
                    self.advance();
                    break;
                }
                Tok::Eof => {
                    let _ = self.fail::<()>(&["statement", "`}`"]);
                    return;
                }
                Tok::Semi => {
                    self.advance();
                }
                _ => {
                    let start = self.pos;
                    let line = self.peek().span.line;
                    if self.statement().is_err() {
                        self.recover(start, line);
                    }
                }
            }
        }
        if !self.at(&Tok::Eof) {
            let _ = self.fail::<()>(&["end of input"]);
        }
    }

    fn statement(&mut self) -> Step<()> {
        let word = match &self.peek().tok {
            Tok::Ident(w) => w.clone(),
            _ => return self.fail(&["declaration", "link statement"]),
        };
        if let Some(kind) = node_kind_for_keyword(&word) {
            self.advance();
            self.declaration(kind)
        } else if let Some(kind) = edge_kind_for_keyword(&word) {
            self.advance();
            self.link(kind)
        } else {
            self.fail(&["declaration", "link statement"])
        }
    }

    fn declaration(&mut self, kind: NodeKind) -> Step<()> {
        let (ident, span) = self.ident()?;
        let name = self.optional_string();

        let model = self.model_mut();
        let id = NodeId(model.allocate_id());
        model.put_node(id, Some(Node::new(id, kind, name)));
        match self.idents.entry(ident) {
            Entry::Occupied(taken) => self.errors.push(ParseError::semantic(
                span,
                ParseErrorKind::DuplicateIdentifier,
                "new identifier",
                taken.key(),
            )),
            Entry::Vacant(free) => {
                free.insert(id);
            }
        }

        if self.at(&Tok::LBrace) {
            let brace = self.advance();
            if kind != NodeKind::Permutation {
                self.errors.push(ParseError::semantic(
                    brace.span,
                    ParseErrorKind::BlockNotAllowed(kind),
                    "end of declaration",
                    "{",
                ));
            }
            self.attribute_block(id, kind == NodeKind::Permutation)?;
        }
        Ok(())
    }

    fn attribute_block(&mut self, owner: NodeId, keep: bool) -> Step<()> {
        loop {
            match self.peek().tok {
                Tok::RBrace => {
                    self.advance();
                    return Ok(());
                }
                Tok::Eof => return self.fail(&["`attribute`", "`}`"]),
                Tok::Semi => {
                    self.advance();
                }
                _ => {
                    let start = self.pos;
                    let line = self.peek().span.line;
                    match self.attribute() {
                        Ok((name, value_kind, value)) if keep => {
                            let model = self.model_mut();
                            let id = NodeId(model.allocate_id());
                            model.put_node(
                                id,
                                Some(Node::attribute(id, owner, name, value_kind, value)),
                            );
                        }
                        Ok(_) => {}
                        Err(Abandon) => self.recover(start, line),
                    }
                }
            }
        }
    }

    fn attribute(&mut self) -> Step<(Option<String>, AttributeValueKind, Option<String>)> {
        self.expect_keyword("attribute")?;
        let value_kind = if self.at_keyword("quantitative") {
            AttributeValueKind::Quantitative
        } else if self.at_keyword("qualitative") {
            AttributeValueKind::Qualitative
        } else {
            return self.fail(&["`quantitative`", "`qualitative`"]);
        };
        self.advance();
        let name = self.optional_string();
        let value = if self.at(&Tok::Eq) {
            self.advance();
            Some(self.string()?)
        } else {
            None
        };
        Ok((name, value_kind, value))
    }

    fn resolve(&mut self, ident: &str, span: SourceSpan) -> Option<NodeId> {
        let found = self.idents.get(ident).copied();
        if found.is_none() {
            self.errors.push(ParseError::semantic(
                span,
                ParseErrorKind::UnknownIdentifier,
                "declared identifier",
                ident,
            ));
        }
        found
    }

    fn link(&mut self, kind: EdgeKind) -> Step<()> {
        let statement_span = self.tokens[self.pos - 1].span;
        let (from_ident, from_span) = self.ident()?;
        self.expect(Tok::Arrow, "`->`")?;
        let (to_ident, to_span) = self.ident()?;
        let label = if self.at_keyword("label") {
            let label_span = self.advance().span;
            let text = self.string()?;
            if !kind.supports_label() {
                self.errors.push(ParseError::semantic(
                    label_span,
                    ParseErrorKind::LabelNotSupported(kind),
                    "end of link statement",
                    "label",
                ));
                return Ok(());
            }
            Some(text)
        } else {
            None
        };

        let from = self.resolve(&from_ident, from_span);
        let to = self.resolve(&to_ident, to_span);
        let (Some(from), Some(to)) = (from, to) else {
            return Ok(());
        };
        let span = SourceSpan::new(
            statement_span.line,
            statement_span.column,
            if to_span.line == statement_span.line {
                to_span.column + to_span.length - statement_span.column
            } else {
                statement_span.length
            },
        );
        let pair = format!("{from_ident} -> {to_ident}");
        let model = self.model.as_mut().expect("header parsed");
        match admit_edge(model, kind, from, to, None) {
            Ok(()) => {
                let id = EdgeId(model.allocate_id());
                model.put_edge(
                    id,
                    Some(Edge {
                        id,
                        kind,
                        from,
                        to,
                        label,
                    }),
                );
            }
            Err(refusal) => {
                let (kind, expected) = match refusal {
                    Refusal::Cancel(CancelReason::DuplicateEdge | CancelReason::NoChange) => {
                        (ParseErrorKind::DuplicateEdge, "unconnected pair")
                    }
                    Refusal::Reject(EditError::IncompatibleEndpoints {
                        kind,
                        from_kind,
                        to_kind,
                    }) => (
                        ParseErrorKind::IncompatibleEndpoints {
                            kind,
                            from_kind,
                            to_kind,
                        },
                        "compatible endpoints",
                    ),
                    Refusal::Reject(_) => (ParseErrorKind::SelfLoop, "distinct endpoints"),
                };
                self.errors
                    .push(ParseError::semantic(span, kind, expected, &pair));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<ParseError> {
        parse(text).expect_err("should fail")
    }

    #[test]
    fn empty_model() {
        let m = parse("model \"m\" {}").unwrap();
        assert_eq!(m.name(), "m");
        assert!(m.is_empty());
        assert!(m.geometry().is_empty());
        assert_eq!(m.revision(), 0);
    }

    #[test]
    fn running_example() {
        let m = parse(
            r#"model "Velocity example" {
                 characteristic V "Velocity"
                 softgoal L "Latency"
                 permutation P1 "Velocity x Latency"
                 permute V -> P1
                 permute L -> P1
               }"#,
        )
        .unwrap();
        assert_eq!((m.node_count(), m.edge_count()), (3, 2));
        assert_eq!(m.id().0, "velocity-example");
        assert!(crate::validation::rule_permutation_completeness(&m).is_empty());
    }

    #[test]
    fn attributes_and_labels() {
        let m = parse(
            r#"model "m" {
                 permutation P "p" {
                   attribute quantitative "max_latency" = "200 ms";
                   attribute qualitative
                 }
                 opgoal O "o"
                 contribute O -> P label "help"
               }"#,
        )
        .unwrap();
        let attrs: Vec<&Node> = m.attributes_of(NodeId(1)).collect();
        assert_eq!(attrs.len(), 2);
        assert_eq!(attrs[0].attr_value.as_deref(), Some("200 ms"));
        assert_eq!(attrs[1].name, None);
        assert_eq!(m.edges().next().unwrap().label.as_deref(), Some("help"));
    }

    #[test]
    fn unknown_identifier_points_at_use() {
        let errs = errors("model \"m\" {\n  permutation P1 \"p\"\n  permute V -> P1\n}\n");
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ParseErrorKind::UnknownIdentifier);
        assert_eq!(errs[0].span, SourceSpan::new(3, 11, 1));
        assert_eq!(errs[0].to_string(), "3:11: unknown identifier V");
    }

    #[test]
    fn duplicate_edge_reported_at_second_statement() {
        let errs = errors(
            "model \"m\" {\n characteristic V \"v\"\n permutation P1 \"p\"\n permute V -> P1\n permute V -> P1\n}",
        );
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ParseErrorKind::DuplicateEdge);
        assert_eq!(errs[0].span, SourceSpan::new(5, 2, 15));
    }

    #[test]
    fn semantic_errors() {
        let errs = errors(
            "model \"m\" {\n goal G \"g\"\n goal G \"h\"\n argue G -> G\n decompose G -> G\n associate G -> G label \"x\"\n goal H \"h\" { }\n}",
        );
        let kinds: Vec<&ParseErrorKind> = errs.iter().map(|e| &e.kind).collect();
        assert!(matches!(kinds[0], ParseErrorKind::DuplicateIdentifier));
        assert!(matches!(
            kinds[1],
            ParseErrorKind::IncompatibleEndpoints { .. }
        ));
        assert!(matches!(kinds[2], ParseErrorKind::SelfLoop));
        assert!(matches!(
            kinds[3],
            ParseErrorKind::LabelNotSupported(EdgeKind::AssociationLink)
        ));
        assert!(matches!(
            kinds[4],
            ParseErrorKind::BlockNotAllowed(NodeKind::Goal)
        ));
    }

    #[test]
    fn recovers_at_line_boundaries() {
        let errs =
            errors("model \"m\" {\n goal \"no ident\"\n bogus X\n goal G \"ok\"\n permute G ->\n}");
        assert_eq!(errs.len(), 3, "{errs:?}");
        assert_eq!(errs[0].span.line, 2);
        assert_eq!(errs[1].span.line, 3);
        assert_eq!(errs[2].span.line, 6);
        assert!(errs.iter().all(|e| !e.expected.is_empty()));
    }

    #[test]
    fn missing_header_and_trailing_garbage() {
        assert_eq!(
            errors("goal G \"x\"")[0].expected,
            vec!["`model`".to_owned()]
        );
        let errs = errors("model \"m\" {} extra");
        assert_eq!(errs[0].found, "extra");
        let errs = errors("model \"m\" {\n goal G");
        assert_eq!(errs[0].found, "end of input");
    }

    #[test]
    fn comments_are_ignored() {
        let m = parse("# header\nmodel \"m\" { # open\n goal G \"g\" # decl\n}\n").unwrap();
        assert_eq!(m.node_count(), 1);
    }
}
