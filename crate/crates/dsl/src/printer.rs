use crate::ast::{BinOp, Expr, ExprKind, RewardProgram};
use std::fmt::Write;

/// Canonical text form. `parse(pretty_print(p))` pretty-prints to the same
/// string, making pretty-print ∘ parse a fixed point.
pub fn pretty_print(program: &RewardProgram) -> String {
    let mut out = String::new();
    for (name, expr) in &program.bindings {
        let _ = writeln!(out, "{name} = {}", print_expr(expr, 0));
    }
    let _ = writeln!(out, "return {}", print_expr(&program.total, 0));
    out
}

/// Precedence levels: 0 additive, 1 multiplicative, 2 unary, 3 atom.
fn level(expr: &Expr) -> u8 {
    match &expr.kind {
        ExprKind::Bin(BinOp::Add | BinOp::Sub, _, _) => 0,
        ExprKind::Bin(BinOp::Mul | BinOp::Div, _, _) => 1,
        ExprKind::Neg(_) => 2,
        _ => 3,
    }
}

fn print_expr(expr: &Expr, ctx: u8) -> String {
    let own = level(expr);
    let body = match &expr.kind {
        ExprKind::Lit(v) => format!("{v:?}"),
        ExprKind::Name(n) => n.clone(),
        ExprKind::Joint {
            joint,
            channel,
            axis,
        } => match axis {
            Some(a) => format!("{joint}.{}.{}", channel.as_str(), a.as_str()),
            None => format!("{joint}.{}", channel.as_str()),
        },
        ExprKind::Action(i) => format!("action[{i}]"),
        ExprKind::Neg(inner) => format!("-{}", print_expr(inner, 2)),
        ExprKind::Bin(op, lhs, rhs) => format!(
            "{} {} {}",
            print_expr(lhs, own),
            op.symbol(),
            print_expr(rhs, own + 1)
        ),
        ExprKind::Call(func, args) => {
            let parts: Vec<String> = args.iter().map(|a| print_expr(a, 0)).collect();
            format!("{}({})", func.name(), parts.join(", "))
        }
    };
    if own < ctx {
        format!("({body})")
    } else {
        body
    }
}
