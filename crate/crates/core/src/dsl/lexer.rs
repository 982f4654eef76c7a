use super::diagnostic::{Diagnostic, DiagnosticCode, Span};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    Ident(String),
    Number(f64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Equals,
    Semicolon,
    Comma,
    Eof,
}

impl TokenKind {
    pub(crate) fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Number(_) => "number".into(),
            TokenKind::Str(_) => "string".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::Equals => "`=`".into(),
            TokenKind::Semicolon => "`;`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, f: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&f) {
            self.bump();
        }
    }

    fn span_from(&self, start: (usize, usize, usize)) -> Span {
        Span {
            offset: start.0,
            len: self.pos - start.0,
            line: start.1,
            column: start.2,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `src` into tokens. Lexical errors are reported and the offending
/// characters skipped, so the token stream always ends with `Eof`.
pub(crate) fn tokenize(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    loop {
        cur.eat_while(char::is_whitespace);
        let start = (cur.pos, cur.line, cur.column);
        let Some(c) = cur.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                span: cur.span_from(start),
            });
            break;
        };
        let kind = match c {
            '#' => {
                cur.eat_while(|c| c != '\n');
                continue;
            }
            '{' | '}' | '(' | ')' | '[' | ']' | '=' | ';' | ',' => {
                cur.bump();
                match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    '=' => TokenKind::Equals,
                    ';' => TokenKind::Semicolon,
                    _ => TokenKind::Comma,
                }
            }
            '"' => {
                cur.bump();
                cur.eat_while(|c| c != '"' && c != '\n');
                if cur.peek() == Some('"') {
                    cur.bump();
                    let span = cur.span_from(start);
                    TokenKind::Str(src[span.offset + 1..span.offset + span.len - 1].to_string())
                } else {
                    diags.push(Diagnostic::at(
                        DiagnosticCode::LexUnterminatedString,
                        cur.span_from(start),
                        src,
                        "string literal is not closed on this line",
                        "add a closing `\"`; strings cannot span lines",
                    ));
                    continue;
                }
            }
            c if is_ident_start(c) => {
                cur.eat_while(is_ident_continue);
                TokenKind::Ident(src[start.0..cur.pos].to_string())
            }
            c if c.is_ascii_digit()
                || c == '.'
                || ((c == '-' || c == '+')
                    && cur
                        .peek_second()
                        .is_some_and(|d| d.is_ascii_digit() || d == '.')) =>
            {
                cur.bump();
                cur.eat_while(|c| c.is_ascii_digit() || c == '.');
                if matches!(cur.peek(), Some('e' | 'E')) {
                    cur.bump();
                    if matches!(cur.peek(), Some('+' | '-')) {
                        cur.bump();
                    }
                }
                // Swallow trailing identifier characters so `1.0x` is one bad token.
                cur.eat_while(|c| c.is_ascii_digit() || is_ident_continue(c) || c == '.');
                let text = &src[start.0..cur.pos];
                match text.parse::<f64>() {
                    Ok(v) => TokenKind::Number(v),
                    Err(_) => {
                        diags.push(Diagnostic::at(
                            DiagnosticCode::LexInvalidNumber,
                            cur.span_from(start),
                            src,
                            format!("`{text}` is not a number"),
                            "write decimals like `1.5`, `-2`, or `3e-4`",
                        ));
                        continue;
                    }
                }
            }
            other => {
                cur.bump();
                diags.push(Diagnostic::at(
                    DiagnosticCode::LexInvalidChar,
                    cur.span_from(start),
                    src,
                    format!("unexpected character {other:?}"),
                    "remove it; comments start with `#`",
                ));
                continue;
            }
        };
        tokens.push(Token {
            kind,
            span: cur.span_from(start),
        });
    }
    (tokens, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        let (t, d) = tokenize(src);
        assert!(d.is_empty(), "{d:?}");
        t.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn basic_tokens() {
        use TokenKind::*;
        assert_eq!(
            kinds("particle { k = -1.5e3; } # hi\n"),
            vec![
                Ident("particle".into()),
                LBrace,
                Ident("k".into()),
                Equals,
                Number(-1500.0),
                Semicolon,
                RBrace,
                Eof
            ]
        );
        assert_eq!(kinds("[1e-7, .5]")[1], Number(1e-7));
        assert_eq!(kinds("\"rb 87\"")[0], Str("rb 87".into()));
    }

    #[test]
    fn positions_are_one_based() {
        let (t, _) = tokenize("a\n  bb");
        assert_eq!((t[1].span.line, t[1].span.column, t[1].span.offset), (2, 3, 4));
    }

    #[test]
    fn lexical_errors() {
        let (_, d) = tokenize("k = 1.2.3;");
        assert_eq!(d[0].code, DiagnosticCode::LexInvalidNumber);
        assert_eq!(d[0].token, "1.2.3");
        let (_, d) = tokenize("k = @;");
        assert_eq!(d[0].code, DiagnosticCode::LexInvalidChar);
        assert_eq!(d[0].offset, 4);
        let (_, d) = tokenize("label = \"open\n");
        assert_eq!(d[0].code, DiagnosticCode::LexUnterminatedString);
    }
}
