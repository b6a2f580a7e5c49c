use crate::ast::{DslError, ErrorKind, Pos};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(f64),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Equals,
    Newline,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn lex(src: &str) -> Result<Vec<Token>, DslError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut column: u32 = 1;
    let mut chars = src.chars().peekable();

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        match c {
            ' ' | '\t' | '\r' => {
                chars.next();
                column += 1;
            }
            '\n' => {
                chars.next();
                out.push(Token {
                    tok: Tok::Newline,
                    pos,
                });
                line += 1;
                column = 1;
            }
            '+' | '-' | '*' | '/' | '(' | ')' | '[' | ']' | ',' | '.' | '=' => {
                chars.next();
                column += 1;
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    _ => Tok::Equals,
                };
                out.push(Token { tok, pos });
            }
            '0'..='9' => {
                let mut text = String::new();
                while matches!(chars.peek(), Some('0'..='9')) {
                    text.push(chars.next().unwrap());
                }
                // fractional part only when the dot is followed by a digit,
                // so `head.pos` style member access still lexes as Dot
                let mut probe = chars.clone();
                if probe.next() == Some('.') && matches!(probe.peek(), Some('0'..='9')) {
                    text.push(chars.next().unwrap());
                    while matches!(chars.peek(), Some('0'..='9')) {
                        text.push(chars.next().unwrap());
                    }
                }
                if matches!(chars.peek(), Some('e') | Some('E')) {
                    let mut probe = chars.clone();
                    probe.next();
                    let ok = match probe.peek() {
                        Some('0'..='9') => true,
                        Some('+') | Some('-') => {
                            probe.next();
                            matches!(probe.peek(), Some('0'..='9'))
                        }
                        _ => false,
                    };
                    if ok {
                        text.push(chars.next().unwrap());
                        if matches!(chars.peek(), Some('+') | Some('-')) {
                            text.push(chars.next().unwrap());
                        }
                        while matches!(chars.peek(), Some('0'..='9')) {
                            text.push(chars.next().unwrap());
                        }
                    }
                }
                column += text.chars().count() as u32;
                let value: f64 = text.parse().map_err(|_| {
                    DslError::new(pos, ErrorKind::Syntax, format!("bad number literal `{text}`"))
                })?;
                if !value.is_finite() {
                    return Err(DslError::new(
                        pos,
                        ErrorKind::NonFiniteLiteral,
                        format!("literal `{text}` overflows to a non-finite value"),
                    ));
                }
                out.push(Token {
                    tok: Tok::Number(value),
                    pos,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        text.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                column += text.chars().count() as u32;
                out.push(Token {
                    tok: Tok::Ident(text),
                    pos,
                });
            }
            other => {
                return Err(DslError::new(
                    pos,
                    ErrorKind::Syntax,
                    format!("unexpected character `{}`", other.escape_default()),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, column },
    });
    Ok(out)
}
