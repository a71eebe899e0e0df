use num_bigint::BigUint;

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Nat(BigUint),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Slash,
    Star,
    Arrow,
    Eq,
    /// `#` directly after the `kind` keyword.
    Hash,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Star => "`*`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Hash => "`#`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Splits `text` into tokens. `#` opens a comment running to the end of the
/// line, except right after `kind` where it names the radix-multiplicity kind.
pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out: Vec<Token> = Vec::new();
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut line = 1;
    let mut line_start = 0;

    while pos < bytes.len() {
        let c = bytes[pos];
        let start = pos;
        let span_to = |end: usize| SourceSpan {
            line,
            column: text[line_start..start].chars().count() + 1,
            start,
            end,
        };
        match c {
            b'\n' => {
                pos += 1;
                line += 1;
                line_start = pos;
            }
            b' ' | b'\t' | b'\r' => pos += 1,
            b'#' => {
                let after_kind =
                    matches!(out.last(), Some(Token { tok: Tok::Ident(k), .. }) if k == "kind");
                if after_kind {
                    out.push(Token {
                        tok: Tok::Hash,
                        span: span_to(pos + 1),
                    });
                    pos += 1;
                } else {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
            }
            b'-' => {
                if bytes.get(pos + 1) == Some(&b'>') {
                    out.push(Token {
                        tok: Tok::Arrow,
                        span: span_to(pos + 2),
                    });
                    pos += 2;
                } else {
                    return Err(
                        ParseError::new(span_to(pos + 1), "unexpected `-`").expecting("`->`")
                    );
                }
            }
            b'0'..=b'9' => {
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos < bytes.len() && (bytes[pos].is_ascii_alphabetic() || bytes[pos] == b'_') {
                    return Err(ParseError::new(
                        span_to(pos + 1),
                        "identifiers must not start with a digit",
                    ));
                }
                let n = text[start..pos].parse().expect("ascii digits");
                out.push(Token {
                    tok: Tok::Nat(n),
                    span: span_to(pos),
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(text[start..pos].to_owned()),
                    span: span_to(pos),
                });
            }
            _ => {
                let tok = match c {
                    b'{' => Tok::LBrace,
                    b'}' => Tok::RBrace,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b':' => Tok::Colon,
                    b';' => Tok::Semi,
                    b',' => Tok::Comma,
                    b'/' => Tok::Slash,
                    b'*' => Tok::Star,
                    b'=' => Tok::Eq,
                    _ => {
                        let ch = text[pos..].chars().next().expect("in bounds");
                        return Err(ParseError::new(
                            span_to(pos + ch.len_utf8()),
                            format!("unexpected character `{ch}`"),
                        ));
                    }
                };
                out.push(Token {
                    tok,
                    span: span_to(pos + 1),
                });
                pos += 1;
            }
        }
    }
    let column = text[line_start..].chars().count() + 1;
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan {
            line,
            column,
            start: text.len(),
            end: text.len(),
        },
    });
    Ok(out)
}
