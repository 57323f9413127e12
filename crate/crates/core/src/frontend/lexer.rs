use crate::diag::Span;

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Char(String),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Char(s) | Tok::Str(s) => s.clone(),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const PUNCTS: &[&str] = &[
    "...", "+=", "-=", "*=", "/=", "++", "--", "&&", "||", "<=", ">=", "==", "!=", "(", ")",
    "{", "}", "[", "]", ";", ",", ".", "*", "&", "+", "-", "/", "%", "!", "<", ">", "=", "?",
    ":", "^",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut line_start = 0usize;

    macro_rules! span {
        ($start:expr, $end:expr, $l:expr, $c:expr) => {
            Span::new($start, $end, $l, $c)
        };
    }

    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let (l0, c0) = (line, (i - line_start) as u32 + 1);
            let start = i;
            i += 2;
            loop {
                if i >= bytes.len() {
                    return Err(ParseError::new(
                        span!(start, i, l0, c0),
                        "`*/`",
                        "end of input",
                    ));
                }
                if src[i..].starts_with("*/") {
                    i += 2;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                    line_start = i + 1;
                }
                i += 1;
            }
            continue;
        }

        let start = i;
        let col = (i - line_start) as u32 + 1;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                span: span!(start, i, line, col),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let value = src[start..i].parse::<i64>().map_err(|_| {
                ParseError::new(span!(start, i, line, col), "integer literal", &src[start..i])
            })?;
            out.push(Token {
                tok: Tok::Int(value),
                span: span!(start, i, line, col),
            });
            continue;
        }
        if c == b'\'' || c == b'"' {
            i += 1;
            loop {
                if i >= bytes.len() || bytes[i] == b'\n' {
                    let what = if c == b'"' { "closing `\"`" } else { "closing `'`" };
                    return Err(ParseError::new(span!(start, i, line, col), what, "end of line"));
                }
                if bytes[i] == b'\\' {
                    i += 2;
                    continue;
                }
                if bytes[i] == c {
                    i += 1;
                    break;
                }
                i += 1;
            }
            let raw = src[start..i].to_string();
            let tok = if c == b'"' { Tok::Str(raw) } else { Tok::Char(raw) };
            out.push(Token {
                tok,
                span: span!(start, i, line, col),
            });
            continue;
        }
        match PUNCTS.iter().find(|p| src[i..].starts_with(**p)) {
            Some(p) => {
                i += p.len();
                out.push(Token {
                    tok: Tok::Punct(p),
                    span: span!(start, i, line, col),
                });
            }
            None => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::new(
                    span!(start, start + ch.len_utf8(), line, col),
                    "a token",
                    &format!("`{ch}`"),
                ));
            }
        }
    }
    let col = (i - line_start) as u32 + 1;
    out.push(Token {
        tok: Tok::Eof,
        span: span!(i, i, line, col),
    });
    Ok(out)
}
