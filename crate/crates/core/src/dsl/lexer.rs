use super::{ParseError, Span};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Eq,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits source into tokens. Newlines inside brackets are dropped so a call
/// may span several lines; `#` comments run to end of line.
pub(crate) fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    let mut depth = 0usize;

    while let Some(&ch) = chars.peek() {
        let span = Span { line, column };
        match ch {
            '\n' => {
                chars.next();
                if depth == 0 {
                    out.push(Token { tok: Tok::Newline, span });
                }
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            '"' | '\'' => {
                let quote = ch;
                chars.next();
                column += 1;
                let mut value = String::new();
                loop {
                    match chars.next() {
                        Some(c) if c == quote => {
                            column += 1;
                            break;
                        }
                        Some('\\') => {
                            column += 1;
                            match chars.next() {
                                Some('\n') | None => {
                                    return Err(ParseError::syntax(span, "unterminated string literal"))
                                }
                                Some(c) => {
                                    value.push(c);
                                    column += 1;
                                }
                            }
                        }
                        Some('\n') | None => {
                            return Err(ParseError::syntax(span, "unterminated string literal"))
                        }
                        Some(c) => {
                            value.push(c);
                            column += 1;
                        }
                    }
                }
                out.push(Token { tok: Tok::Str(value), span });
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                out.push(Token { tok: Tok::Ident(ident), span });
            }
            _ => {
                let tok = match ch {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '=' => Tok::Eq,
                    other => {
                        return Err(ParseError::syntax(span, format!("unexpected character `{other}`")))
                    }
                };
                match tok {
                    Tok::LParen | Tok::LBracket => depth += 1,
                    Tok::RParen | Tok::RBracket => depth = depth.saturating_sub(1),
                    _ => {}
                }
                chars.next();
                column += 1;
                out.push(Token { tok, span });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, column } });
    Ok(out)
}

/// Cursor over a token vector shared by the plan and QA parsers.
pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(tokens: Vec<Token>) -> Self {
        Self { tokens, pos: 0 }
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    pub(crate) fn peek_at(&self, offset: usize) -> &Tok {
        &self.tokens[(self.pos + offset).min(self.tokens.len() - 1)].tok
    }

    pub(crate) fn next(&mut self) -> Token {
        let tok = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    pub(crate) fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.next();
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub(crate) fn expect(&mut self, want: Tok) -> Result<Span, ParseError> {
        let tok = self.next();
        if tok.tok == want {
            Ok(tok.span)
        } else {
            Err(ParseError::syntax(
                tok.span,
                format!("expected {}, found {}", want.describe(), tok.tok.describe()),
            ))
        }
    }

    pub(crate) fn expect_ident(&mut self) -> Result<(String, Span), ParseError> {
        let tok = self.next();
        match tok.tok {
            Tok::Ident(name) => Ok((name, tok.span)),
            other => Err(ParseError::syntax(
                tok.span,
                format!("expected identifier, found {}", other.describe()),
            )),
        }
    }

    pub(crate) fn expect_str(&mut self) -> Result<(String, Span), ParseError> {
        let tok = self.next();
        match tok.tok {
            Tok::Str(value) => Ok((value, tok.span)),
            other => Err(ParseError::syntax(
                tok.span,
                format!("expected string literal, found {}", other.describe()),
            )),
        }
    }

    /// A statement must end at a newline or end of input.
    pub(crate) fn end_statement(&mut self) -> Result<(), ParseError> {
        let tok = self.next();
        match tok.tok {
            Tok::Newline | Tok::Eof => Ok(()),
            other => Err(ParseError::syntax(
                tok.span,
                format!("expected end of line, found {}", other.describe()),
            )),
        }
    }
}
