use std::fmt;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    UnknownIdentifier,
    TypeMismatch,
    NonFiniteLiteral,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ErrorKind::Syntax => "syntax",
            ErrorKind::UnknownIdentifier => "unknown-identifier",
            ErrorKind::TypeMismatch => "type-mismatch",
            ErrorKind::NonFiniteLiteral => "non-finite-literal",
        };
        f.write_str(s)
    }
}

/// Parse- or validate-time error with a position into the source text.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} error at {pos}: {message}")]
pub struct DslError {
    pub pos: Pos,
    pub kind: ErrorKind,
    pub message: String,
}

impl DslError {
    pub fn new(pos: Pos, kind: ErrorKind, message: impl Into<String>) -> DslError {
        DslError {
            pos,
            kind,
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Pos,
    Rot,
    Vel,
    AngVel,
}

impl Channel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Channel::Pos => "pos",
            Channel::Rot => "rot",
            Channel::Vel => "vel",
            Channel::AngVel => "angvel",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
    W,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
            Axis::W => "w",
        }
    }

    pub fn index(&self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
            Axis::W => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Abs,
    Norm,
    Dot,
    Min,
    Max,
    Clamp,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Norm => "norm",
            Func::Dot => "dot",
            Func::Min => "min",
            Func::Max => "max",
            Func::Clamp => "clamp",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Func::Exp | Func::Abs | Func::Norm => 1,
            Func::Dot | Func::Min | Func::Max => 2,
            Func::Clamp => 3,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "norm" => Func::Norm,
            "dot" => Func::Dot,
            "min" => Func::Min,
            "max" => Func::Max,
            "clamp" => Func::Clamp,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Lit(f64),
    /// Reference to a prior binding.
    Name(String),
    /// joint.channel or joint.channel.axis
    Joint {
        joint: String,
        channel: Channel,
        axis: Option<Axis>,
    },
    /// action[i]
    Action(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Parsed constraint-reward program: ordered bindings and a return expression.
#[derive(Clone, Debug)]
pub struct RewardProgram {
    pub bindings: Vec<(String, Expr)>,
    pub total: Expr,
}
