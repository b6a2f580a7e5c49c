use crate::ast::{Axis, BinOp, Channel, DslError, ErrorKind, Expr, ExprKind, Func, Pos, RewardProgram};
use crate::lexer::{lex, Tok, Token};

/// Names that cannot be bound: statement and call keywords plus `action`.
pub const RESERVED: [&str; 9] = [
    "return", "exp", "abs", "norm", "dot", "min", "max", "clamp", "action",
];

const MAX_DEPTH: u32 = 256;

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

pub fn parse(source: &str) -> Result<RewardProgram, DslError> {
    let tokens = lex(source)?;
    let mut p = Parser { tokens, at: 0 };
    p.program()
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> DslError {
        DslError::new(self.pos(), ErrorKind::Syntax, message)
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek(), Tok::Newline) {
            self.bump();
        }
    }

    fn program(&mut self) -> Result<RewardProgram, DslError> {
        let mut bindings = Vec::new();
        loop {
            self.skip_newlines();
            match self.peek().clone() {
                Tok::Ident(name) if name == "return" => {
                    self.bump();
                    let total = self.expr(0)?;
                    self.skip_newlines();
                    if !matches!(self.peek(), Tok::Eof) {
                        return Err(self.err("trailing input after return expression"));
                    }
                    return Ok(RewardProgram { bindings, total });
                }
                Tok::Ident(name) => {
                    let pos = self.pos();
                    self.bump();
                    if RESERVED.contains(&name.as_str()) {
                        return Err(DslError::new(
                            pos,
                            ErrorKind::Syntax,
                            format!("`{name}` is reserved and cannot be bound"),
                        ));
                    }
                    if !matches!(self.peek(), Tok::Equals) {
                        return Err(self.err(format!("expected `=` after binding name `{name}`")));
                    }
                    self.bump();
                    let value = self.expr(0)?;
                    match self.peek() {
                        Tok::Newline => {
                            self.bump();
                        }
                        Tok::Eof => {
                            return Err(self.err("program must end with a return statement"));
                        }
                        _ => return Err(self.err("expected end of line after binding")),
                    }
                    bindings.push((name, value));
                }
                Tok::Eof => return Err(self.err("program must end with a return statement")),
                _ => return Err(self.err("expected a binding or `return`")),
            }
        }
    }

    fn expr(&mut self, depth: u32) -> Result<Expr, DslError> {
        if depth > MAX_DEPTH {
            return Err(self.err("expression nesting exceeds the depth limit"));
        }
        let mut lhs = self.term(depth + 1)?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            let pos = self.pos();
            self.bump();
            let rhs = self.term(depth + 1)?;
            lhs = Expr {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self, depth: u32) -> Result<Expr, DslError> {
        if depth > MAX_DEPTH {
            return Err(self.err("expression nesting exceeds the depth limit"));
        }
        let mut lhs = self.factor(depth + 1)?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            let pos = self.pos();
            self.bump();
            let rhs = self.factor(depth + 1)?;
            lhs = Expr {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self, depth: u32) -> Result<Expr, DslError> {
        if depth > MAX_DEPTH {
            return Err(self.err("expression nesting exceeds the depth limit"));
        }
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Number(value) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Lit(value),
                    pos,
                })
            }
            Tok::Minus => {
                self.bump();
                let inner = self.factor(depth + 1)?;
                Ok(Expr {
                    kind: ExprKind::Neg(Box::new(inner)),
                    pos,
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr(depth + 1)?;
                if !matches!(self.peek(), Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "action" {
                    return self.action_ref(pos);
                }
                if let Some(func) = Func::from_name(&name) {
                    if matches!(self.peek(), Tok::LParen) {
                        return self.call(func, pos, depth);
                    }
                    return Err(DslError::new(
                        pos,
                        ErrorKind::Syntax,
                        format!("`{name}` is a function and must be called"),
                    ));
                }
                if name == "return" {
                    return Err(DslError::new(pos, ErrorKind::Syntax, "unexpected `return`"));
                }
                if matches!(self.peek(), Tok::Dot) {
                    return self.joint_ref(name, pos);
                }
                Ok(Expr {
                    kind: ExprKind::Name(name),
                    pos,
                })
            }
            _ => Err(self.err("expected a number, reference, call, or `(`")),
        }
    }

    fn call(&mut self, func: Func, pos: Pos, depth: u32) -> Result<Expr, DslError> {
        self.bump(); // (
        let mut args = vec![self.expr(depth + 1)?];
        while matches!(self.peek(), Tok::Comma) {
            self.bump();
            args.push(self.expr(depth + 1)?);
        }
        if !matches!(self.peek(), Tok::RParen) {
            return Err(self.err("expected `)` or `,` in argument list"));
        }
        self.bump();
        Ok(Expr {
            kind: ExprKind::Call(func, args),
            pos,
        })
    }

    fn action_ref(&mut self, pos: Pos) -> Result<Expr, DslError> {
        if !matches!(self.peek(), Tok::LBracket) {
            return Err(self.err("expected `[` after `action`"));
        }
        self.bump();
        let index = match self.peek() {
            Tok::Number(v) => {
                let v = *v;
                if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                    return Err(self.err("action index must be a non-negative integer"));
                }
                self.bump();
                v as usize
            }
            _ => return Err(self.err("expected an integer action index")),
        };
        if !matches!(self.peek(), Tok::RBracket) {
            return Err(self.err("expected `]`"));
        }
        self.bump();
        Ok(Expr {
            kind: ExprKind::Action(index),
            pos,
        })
    }

    fn joint_ref(&mut self, joint: String, pos: Pos) -> Result<Expr, DslError> {
        self.bump(); // .
        let channel = match self.peek().clone() {
            Tok::Ident(c) => match c.as_str() {
                "pos" => Channel::Pos,
                "rot" => Channel::Rot,
                "vel" => Channel::Vel,
                "angvel" => Channel::AngVel,
                other => {
                    return Err(self.err(format!(
                        "unknown channel `{other}` (expected pos, rot, vel, or angvel)"
                    )))
                }
            },
            _ => return Err(self.err("expected a channel name after `.`")),
        };
        self.bump();
        let mut axis = None;
        if matches!(self.peek(), Tok::Dot) {
            self.bump();
            axis = match self.peek().clone() {
                Tok::Ident(a) => match a.as_str() {
                    "x" => Some(Axis::X),
                    "y" => Some(Axis::Y),
                    "z" => Some(Axis::Z),
                    "w" => Some(Axis::W),
                    other => {
                        return Err(self.err(format!(
                            "unknown axis `{other}` (expected x, y, z, or w)"
                        )))
                    }
                },
                _ => return Err(self.err("expected an axis name after `.`")),
            };
            self.bump();
        }
        Ok(Expr {
            kind: ExprKind::Joint {
                joint,
                channel,
                axis,
            },
            pos,
        })
    }
}
