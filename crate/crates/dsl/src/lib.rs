//! Constraint-reward DSL: grammar, parser, validator, and sandboxed
//! evaluator for generated reward programs.
//!
//! ```text
//! program := {binding} "return" expr
//! binding := IDENT "=" expr NEWLINE
//! expr    := term {("+"|"-") term}
//! term    := factor {("*"|"/") factor}
//! factor  := NUMBER | ref | call | "(" expr ")" | "-" factor
//! call    := ("exp"|"abs"|"norm"|"dot"|"min"|"max"|"clamp") "(" expr {"," expr} ")"
//! ref     := IDENT | IDENT "." CHANNEL ["." AXIS] | "action" "[" INT "]"
//! CHANNEL := pos|rot|vel|angvel        AXIS := x|y|z|w
//! ```
//!
//! Scalars, 3-vectors (pos/vel/angvel), and quaternions (rot) are the only
//! types. A program is validated against one environment's joint names and
//! action width, producing a [`CompiledProgram`] whose `evaluate` is pure and
//! total: division by a near-zero denominator and non-finite intermediates
//! surface as [`EvalError`]s naming the offending binding, never as panics.

mod ast;
mod eval;
mod lexer;
mod parser;
mod printer;
pub mod testutil;
mod validate;

pub use ast::{Axis, BinOp, Channel, DslError, ErrorKind, Expr, ExprKind, Func, Pos, RewardProgram};
pub use eval::{EvalError, EvalResult, Value, DIV_GUARD};
pub use parser::{parse, RESERVED};
pub use printer::pretty_print;
pub use validate::{validate, CompiledProgram, Ty};
