use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Str(String),
    LBrace,
    RBrace,
    Semi,
    Eq,
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
    /// Source text of the token, for error messages.
    pub text: String,
}

impl Token {
    pub fn describe(&self) -> String {
        match self.tok {
            Tok::Eof => "end of input".to_owned(),
            _ => self.text.clone(),
        }
    }
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `text` into tokens. Lexical errors are collected and the offending
/// characters skipped, so parsing can still report later problems.
pub(super) fn tokenize(text: &str) -> (Vec<Token>, Vec<ParseError>) {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let single = |tok, text: &str| Token {
            tok,
            span: SourceSpan::new(line, column, 1),
            text: text.to_owned(),
        };
        match c {
            '#' => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            }
            c if c.is_whitespace() => {
                cur.bump();
            }
            '{' => {
                cur.bump();
                tokens.push(single(Tok::LBrace, "{"));
            }
            '}' => {
                cur.bump();
                tokens.push(single(Tok::RBrace, "}"));
            }
            ';' => {
                cur.bump();
                tokens.push(single(Tok::Semi, ";"));
            }
            '=' => {
                cur.bump();
                tokens.push(single(Tok::Eq, "="));
            }
            '-' => {
                cur.bump();
                if cur.peek() == Some('>') {
                    cur.bump();
                    tokens.push(Token {
                        tok: Tok::Arrow,
                        span: SourceSpan::new(line, column, 2),
                        text: "->".to_owned(),
                    });
                } else {
                    errors.push(ParseError::syntax(
                        SourceSpan::new(line, column, 1),
                        vec!["`->`".to_owned()],
                        "-".to_owned(),
                    ));
                }
            }
            '"' => match lex_string(&mut cur) {
                Ok((value, raw)) => tokens.push(Token {
                    tok: Tok::Str(value),
                    span: SourceSpan::new(line, column, raw.chars().count() as u32),
                    text: raw,
                }),
                Err(e) => errors.push(e),
            },
            c if is_ident_start(c) => {
                let mut ident = String::new();
                while let Some(c) = cur.peek().filter(|c| is_ident_continue(*c)) {
                    ident.push(c);
                    cur.bump();
                }
                tokens.push(Token {
                    tok: Tok::Ident(ident.clone()),
                    span: SourceSpan::new(line, column, ident.chars().count() as u32),
                    text: ident,
                });
            }
            other => {
                cur.bump();
                errors.push(ParseError::syntax(
                    SourceSpan::new(line, column, 1),
                    vec![
                        "identifier".to_owned(),
                        "string".to_owned(),
                        "punctuation".to_owned(),
                    ],
                    other.to_string(),
                ));
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: SourceSpan::new(cur.line, cur.column, 0),
        text: String::new(),
    });
    (tokens, errors)
}

/// Lexes a double-quoted string starting at the cursor. Strings end at the
/// closing quote and may not contain raw newlines.
fn lex_string(cur: &mut Cursor<'_>) -> Result<(String, String), ParseError> {
    let (line, column) = (cur.line, cur.column);
    let mut raw = String::from('"');
    let mut value = String::new();
    cur.bump();
    loop {
        let here = (cur.line, cur.column);
        match cur.peek() {
            None | Some('\n') => {
                let found = if cur.peek().is_none() {
                    "end of input"
                } else {
                    "end of line"
                };
                return Err(ParseError::syntax(
                    SourceSpan::new(line, column, raw.chars().count() as u32),
                    vec!["closing `\"`".to_owned()],
                    found.to_owned(),
                ));
            }
            Some('"') => {
                cur.bump();
                raw.push('"');
                return Ok((value, raw));
            }
            Some('\\') => {
                cur.bump();
                raw.push('\\');
                let escaped = match cur.peek() {
                    Some('"') => Some('"'),
                    Some('\\') => Some('\\'),
                    Some('n') => Some('\n'),
                    Some('t') => Some('\t'),
                    Some('r') => Some('\r'),
                    Some('u') => {
                        cur.bump();
                        raw.push('u');
                        match lex_unicode_escape(cur, &mut raw) {
                            Some(c) => {
                                value.push(c);
                                continue;
                            }
                            None => None,
                        }
                    }
                    _ => None,
                };
                match escaped {
                    Some(c) => {
                        raw.push(cur.bump().unwrap_or_default());
                        value.push(c);
                    }
                    None => {
                        // Skip the rest of the string so one bad escape yields one error.
                        let found =
                            format!("\\{}", cur.peek().map(String::from).unwrap_or_default());
                        while cur.peek().is_some_and(|c| c != '"' && c != '\n') {
                            cur.bump();
                        }
                        if cur.peek() == Some('"') {
                            cur.bump();
                        }
                        return Err(ParseError::syntax(
                            SourceSpan::new(here.0, here.1, 2),
                            vec!["escape sequence".to_owned()],
                            found,
                        ));
                    }
                }
            }
            Some(c) => {
                cur.bump();
                raw.push(c);
                value.push(c);
            }
        }
    }
}

/// `\u{XXXX}` with one to six hex digits; the `\u` is already consumed.
fn lex_unicode_escape(cur: &mut Cursor<'_>, raw: &mut String) -> Option<char> {
    if cur.peek() != Some('{') {
        return None;
    }
    cur.bump();
    raw.push('{');
    let mut digits = String::new();
    while let Some(c) = cur.peek().filter(|c| c.is_ascii_hexdigit()) {
        if digits.len() == 6 {
            return None;
        }
        digits.push(c);
        raw.push(c);
        cur.bump();
    }
    if cur.peek() != Some('}') || digits.is_empty() {
        return None;
    }
    cur.bump();
    raw.push('}');
    u32::from_str_radix(&digits, 16)
        .ok()
        .and_then(char::from_u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<Tok> {
        let (tokens, errors) = tokenize(text);
        assert!(errors.is_empty(), "{errors:?}");
        tokens.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn punctuation_and_comments() {
        assert_eq!(
            toks("a -> b ; { } = # trailing\n"),
            vec![
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::Semi,
                Tok::LBrace,
                Tok::RBrace,
                Tok::Eq,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn string_escapes() {
        assert_eq!(
            toks(r#""a\"b\\c\n\u{e9}""#),
            vec![Tok::Str("a\"b\\c\n\u{e9}".into()), Tok::Eof]
        );
    }

    #[test]
    fn spans_count_characters() {
        let (tokens, _) = tokenize("é \"ab\"\n  x");
        // `é` is not an identifier start; the string is at column 3.
        assert_eq!(tokens[0].span, SourceSpan::new(1, 3, 4));
        assert_eq!(tokens[1].span, SourceSpan::new(2, 3, 1));
    }

    #[test]
    fn unterminated_string_is_reported() {
        let (_, errors) = tokenize("goal G \"open\nnext");
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].span.line, 1);
        assert_eq!(errors[0].span.column, 8);
    }

    #[test]
    fn bad_escape_consumes_string() {
        let (tokens, errors) = tokenize(r#""a\qb" x"#);
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].found, "\\q");
        assert_eq!(tokens[0].tok, Tok::Ident("x".into()));
    }
}
