//! A checker for the subset of the DOT grammar the exporter may emit:
//! one `digraph`, node statements and `->` edge statements with optional
//! attribute lists.

use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Comma,
    Semi,
    Arrow,
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            c if c.is_whitespace() => {}
            '{' => out.push(Tok::LBrace),
            '}' => out.push(Tok::RBrace),
            '[' => out.push(Tok::LBracket),
            ']' => out.push(Tok::RBracket),
            '=' => out.push(Tok::Eq),
            ',' => out.push(Tok::Comma),
            ';' => out.push(Tok::Semi),
            '-' if chars.peek() == Some(&'>') => {
                chars.next();
                out.push(Tok::Arrow);
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => return Err("unterminated string".into()),
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(e) => {
                                s.push('\\');
                                s.push(e);
                            }
                            None => return Err("dangling escape".into()),
                        },
                        Some(c) => s.push(c),
                    }
                }
                out.push(Tok::Id(s));
            }
            c if c.is_alphanumeric() || matches!(c, '_' | '.' | '#' | '-') => {
                let mut s = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_alphanumeric() || matches!(n, '_' | '.' | '#') {
                        s.push(n);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Id(s));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct DotSummary {
    pub nodes: usize,
    pub edges: usize,
}

struct Cursor {
    toks: Vec<Tok>,
    at: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), String> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            other => Err(format!("expected {tok:?}, found {other:?}")),
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Id(s)) => Ok(s),
            other => Err(format!("expected identifier, found {other:?}")),
        }
    }

    fn attributes(&mut self) -> Result<(), String> {
        if self.peek() != Some(&Tok::LBracket) {
            return Ok(());
        }
        self.next();
        loop {
            match self.peek() {
                Some(Tok::RBracket) => {
                    self.next();
                    return Ok(());
                }
                Some(Tok::Id(_)) => {
                    self.id()?;
                    self.expect(Tok::Eq)?;
                    self.id()?;
                    if matches!(self.peek(), Some(Tok::Comma | Tok::Semi)) {
                        self.next();
                    }
                }
                other => return Err(format!("bad attribute list at {other:?}")),
            }
        }
    }
}

/// Checks `text` is one well-formed digraph whose edges only join declared
/// nodes.
pub fn check_dot(text: &str) -> Result<DotSummary, String> {
    let mut c = Cursor {
        toks: tokenize(text)?,
        at: 0,
    };
    match c.id()?.as_str() {
        "digraph" => {}
        other => return Err(format!("expected digraph, found {other}")),
    }
    if matches!(c.peek(), Some(Tok::Id(_))) {
        c.next();
    }
    c.expect(Tok::LBrace)?;
    let mut declared = BTreeSet::new();
    let mut summary = DotSummary::default();
    loop {
        match c.peek() {
            Some(Tok::RBrace) => {
                c.next();
                break;
            }
            Some(Tok::Id(_)) => {
                let first = c.id()?;
                if c.peek() == Some(&Tok::Arrow) {
                    c.next();
                    let second = c.id()?;
                    for end in [&first, &second] {
                        if !declared.contains(end) {
                            return Err(format!("edge endpoint {end} is not declared"));
                        }
                    }
                    summary.edges += 1;
                } else {
                    if !declared.insert(first.clone()) {
                        return Err(format!("node {first} declared twice"));
                    }
                    summary.nodes += 1;
                }
                c.attributes()?;
                if c.peek() == Some(&Tok::Semi) {
                    c.next();
                }
            }
            other => return Err(format!("unexpected {other:?}")),
        }
    }
    if c.peek().is_some() {
        return Err("content after the closing brace".into());
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_small_graph() {
        let text = "digraph \"g \\\"x\\\"\" {\n  \"n1\" [label=\"a\\nb\", shape=box];\n  \"n2\";\n  \"n1\" -> \"n2\" [style=dashed];\n}\n";
        assert_eq!(check_dot(text), Ok(DotSummary { nodes: 2, edges: 1 }));
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(check_dot("digraph { \"a\" -> \"b\"; }").is_err());
        assert!(check_dot("digraph { \"a\" [label=\"x]; }").is_err());
        assert!(check_dot("digraph { \"a\";").is_err());
        assert!(check_dot("graph { }").is_err());
        assert!(check_dot("digraph { } }").is_err());
    }
}
